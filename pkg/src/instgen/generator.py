"""Probabilistic ground-term generation.

Head symbols are chosen top-down by one of three pick strategies:

``random``
    uniform over the candidate symbols.
``weights``
    proportional to how often each symbol occurred in observed terms.
``paths``
    proportional to occurrence counts at the current path, with every other
    candidate given weight 1.

With probability ``flip`` a single pick inverts its weights (``w -> 1/w``),
favouring rarely observed symbols.

Random numbers come from :class:`random.Random` (MT19937).  Only
``Random.random()`` is consumed by the sampling code, so draw sequences are
fixed by the seed alone and do not depend on the platform.
"""

from __future__ import annotations

import enum
import logging
import random
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

from .errors import EmptyWeightVector, InstGenError, NoConstant, NoSymbolsForSort
from .stats import Path, StatsStore, WeightVector, weights_global, weights_path
from .terms import GroundTerm, Sort, SymbolDecl, symbols_of_sort

log = logging.getLogger(__name__)

MAX_SEED = 2**64 - 1


class Pick(str, enum.Enum):
    RANDOM = "random"
    WEIGHTS = "weights"
    PATHS = "paths"


class Effort(str, enum.Enum):
    LASTCALL = "lastcall"
    INTERLEAVE = "interleave"


@dataclass(frozen=True)
class GenConfig:
    pick: Pick = Pick.RANDOM
    depth: int = 0
    flip: float | None = None
    effort: Effort = Effort.LASTCALL
    seed: int = 0
    batch_size: int = 20

    def __post_init__(self) -> None:
        object.__setattr__(self, "pick", Pick(self.pick))
        object.__setattr__(self, "effort", Effort(self.effort))
        if self.depth < 0:
            raise ValueError(f"depth must be non-negative, got {self.depth}")
        if self.flip is not None and not 0.0 <= self.flip <= 1.0:
            raise ValueError(f"flip must lie in [0, 1], got {self.flip}")
        if not 0 <= self.seed <= MAX_SEED:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be positive, got {self.batch_size}")

    @property
    def uses_flip(self) -> bool:
        return self.pick is not Pick.RANDOM

    @property
    def strategy_id(self) -> str:
        parts = [self.effort.value, self.pick.value, f"d{self.depth}"]
        if self.uses_flip:
            parts.append(f"f{self.flip or 0.0:g}")
        return "/".join(parts)

    def with_seed(self, seed: int) -> "GenConfig":
        return replace(self, seed=seed)


def make_rng(seed: int) -> random.Random:
    if not 0 <= seed <= MAX_SEED:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return random.Random(seed)


def invert_weights(w: WeightVector) -> WeightVector:
    return {s: 1.0 / x for s, x in w.items()}


def sample_categorical(w: WeightVector, rng: random.Random) -> str:
    """Draw a key of ``w`` with probability proportional to its weight.

    The weights are laid out as consecutive intervals in lexicographic key
    order; a uniform point in ``[0, total)`` selects the interval it falls in.
    """
    if not w:
        raise EmptyWeightVector("cannot sample from an empty weight vector")
    keys = sorted(w)
    weights = [float(w[k]) for k in keys]
    u = rng.random() * sum(weights)
    acc = 0.0
    for k, x in zip(keys, weights):
        acc += x
        if u < acc:
            return k
    # u can reach the rounded total only through float error
    return keys[-1]


def _uniform(names: Sequence[str], rng: random.Random) -> str:
    return names[min(int(rng.random() * len(names)), len(names) - 1)]


def shuffle(items: list, rng: random.Random) -> None:
    """In-place Fisher-Yates shuffle driven by ``rng.random()`` only."""
    for i in range(len(items) - 1, 0, -1):
        j = min(int(rng.random() * (i + 1)), i)
        items[i], items[j] = items[j], items[i]


def pick(
    cfg: GenConfig,
    candidates: Iterable[SymbolDecl],
    store: StatsStore,
    path: Path,
    rng: random.Random,
    sort: Sort | None = None,
) -> SymbolDecl:
    by_name = {c.name: c for c in candidates}
    if not by_name:
        raise NoSymbolsForSort(f"NoSymbolsForSort({sort})" if sort else "NoSymbolsForSort")
    names = sorted(by_name)
    if cfg.pick is Pick.RANDOM:
        return by_name[_uniform(names, rng)]
    if cfg.pick is Pick.WEIGHTS:
        w = weights_global(store, names)
        if not w:
            return by_name[_uniform(names, rng)]
    else:
        w = weights_path(store, path, names)
    flip = cfg.flip or 0.0
    if flip >= 1.0 or (flip > 0.0 and rng.random() < flip):
        w = invert_weights(w)
    return by_name[sample_categorical(w, rng)]


class TermMaker:
    """Runs the recursive generator for one (config, store, universe).

    Caches the per-sort candidate sets so repeated calls stay cheap.
    """

    def __init__(
        self,
        cfg: GenConfig,
        store: StatsStore,
        universe: Iterable[SymbolDecl] | None = None,
    ):
        self.cfg = cfg
        self.store = store
        self.universe = list(store.observed_symbols.values() if universe is None else universe)
        self._by_sort: dict[Sort, list[SymbolDecl]] = {}
        self._consts: dict[Sort, list[SymbolDecl]] = {}

    def _candidates(self, sort: Sort, leaves_only: bool) -> list[SymbolDecl]:
        if sort not in self._by_sort:
            syms = sorted(symbols_of_sort(self.universe, sort), key=lambda s: s.name)
            self._by_sort[sort] = syms
            self._consts[sort] = [s for s in syms if s.is_constant]
        return self._consts[sort] if leaves_only else self._by_sort[sort]

    def make(self, sort: Sort, rng: random.Random, d: int = 0, path: Path = ()) -> GroundTerm:
        if not self._candidates(sort, False):
            raise NoSymbolsForSort(f"NoSymbolsForSort({sort})")
        cands = self._candidates(sort, d >= self.cfg.depth)
        if not cands:
            raise NoConstant(f"NoConstant({sort})")
        s = pick(self.cfg, cands, self.store, path, rng, sort)
        if s.is_constant:
            return GroundTerm(s)
        below = path + (s.name,)
        args = tuple(self.make(t, rng, d + 1, below) for t in s.arg_sorts)
        return GroundTerm(s, args)

    def batch(self, sort: Sort, rng: random.Random) -> list[GroundTerm]:
        seen: dict[GroundTerm, None] = {}
        for _ in range(self.cfg.batch_size):
            seen.setdefault(self.make(sort, rng), None)
        return list(seen)


def make_term(
    sort: Sort,
    cfg: GenConfig,
    store: StatsStore,
    rng: random.Random,
    d: int = 0,
    path: Path = (),
    universe: Iterable[SymbolDecl] | None = None,
) -> GroundTerm:
    """Generate one term of ``sort`` with depth at most ``cfg.depth``.

    Candidates are the observed symbols of ``store`` unless ``universe`` is
    given.  Raises :class:`NoSymbolsForSort` or :class:`NoConstant` when no
    term can be built.
    """
    return TermMaker(cfg, store, universe).make(sort, rng, d, path)


def generate_batch(
    sort: Sort,
    cfg: GenConfig,
    store: StatsStore,
    rng: random.Random,
    universe: Iterable[SymbolDecl] | None = None,
) -> list[GroundTerm]:
    """``cfg.batch_size`` terms of ``sort`` with duplicates dropped, first occurrence kept."""
    return TermMaker(cfg, store, universe).batch(sort, rng)


def try_generate_batch(
    sort: Sort,
    cfg: GenConfig,
    store: StatsStore,
    rng: random.Random,
    universe: Iterable[SymbolDecl] | None = None,
) -> tuple[list[GroundTerm], str | None]:
    """Like :func:`generate_batch` but returns ``([], diagnostic)`` on failure."""
    try:
        return generate_batch(sort, cfg, store, rng, universe), None
    except InstGenError as e:
        log.debug("generation failed for sort %s: %s", sort, e)
        return [], str(e)
