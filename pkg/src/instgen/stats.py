"""Symbol occurrence statistics learned from observed instantiation terms.

Two tables are kept: a global count per symbol, and per-path counts where a
path is the tuple of ancestor head names above a node (argument positions
ignored).  The path table always refines the global one: summing a symbol's
counts over all paths gives its global count.
"""

from __future__ import annotations

import copy
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable

from .errors import ParseError, SExprSyntaxError, UnknownSymbol
from .sexpr import Atom, SList, read_all
from .terms import GroundTerm, Signature, SymbolDecl

Path = tuple[str, ...]
WeightVector = dict[str, float]


@dataclass
class StatsStore:
    global_counts: Counter = field(default_factory=Counter)
    path_counts: defaultdict = field(default_factory=lambda: defaultdict(Counter))
    observed_symbols: dict[str, SymbolDecl] = field(default_factory=dict)
    terms_observed: int = 0

    def observe(self, t: GroundTerm) -> "StatsStore":
        for path, node in t.nodes():
            name = node.head.name
            self.global_counts[name] += 1
            self.path_counts[path][name] += 1
            self.observed_symbols.setdefault(name, node.head)
        self.terms_observed += 1
        return self

    def observe_all(self, terms: Iterable[GroundTerm]) -> "StatsStore":
        for t in terms:
            self.observe(t)
        return self

    def snapshot(self) -> "StatsStore":
        return copy.deepcopy(self)

    def path_table(self) -> dict[Path, dict[str, int]]:
        """Plain-dict view of the non-empty path tables."""
        return {p: dict(c) for p, c in self.path_counts.items() if c}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StatsStore):
            return NotImplemented
        return (
            +self.global_counts == +other.global_counts
            and self.path_table() == other.path_table()
            and self.observed_symbols == other.observed_symbols
            and self.terms_observed == other.terms_observed
        )


def observe_term(store: StatsStore, t: GroundTerm) -> StatsStore:
    return store.observe(t)


def _names(candidates: Iterable[SymbolDecl | str]) -> list[str]:
    return [c if isinstance(c, str) else c.name for c in candidates]


def weights_global(store: StatsStore, candidates: Iterable[SymbolDecl | str]) -> WeightVector:
    """Global counts restricted to candidates that have been observed.

    May be empty; callers decide how to fall back.
    """
    counts = store.global_counts
    return {n: counts[n] for n in _names(candidates) if counts.get(n, 0) > 0}


def weights_path(
    store: StatsStore, path: Path, candidates: Iterable[SymbolDecl | str]
) -> WeightVector:
    """Counts at ``path`` for every candidate, with 1 for candidates unseen there."""
    counts = store.path_counts.get(tuple(path), {})
    return {n: counts.get(n, 0) or 1 for n in _names(candidates)}


# -- dump / load -------------------------------------------------------------


def _pairs(counts) -> str:
    return " ".join(f"({name} {counts[name]})" for name in sorted(counts) if counts[name] > 0)


def dump_stats(store: StatsStore) -> str:
    """Serialize ``store`` as byte-stable s-expressions, one per line."""
    lines = [f"(terms {store.terms_observed})"]
    g = _pairs(store.global_counts)
    lines.append(f"(global {g})" if g else "(global)")
    for path in sorted(store.path_table()):
        lines.append(f"(path ({' '.join(path)}) {_pairs(store.path_counts[path])})")
    return "\n".join(lines) + "\n"


def _count_pair(node) -> tuple[str, int]:
    if (
        not isinstance(node, SList)
        or len(node.items) != 2
        or not all(isinstance(x, Atom) for x in node.items)
        or not node.items[1].text.isdigit()
    ):
        raise SExprSyntaxError("expected (<symbol> <count>)", node.line, node.col)
    return node.items[0].text, int(node.items[1].text)


def load_stats(text: str, sig: Signature) -> StatsStore:
    """Inverse of :func:`dump_stats`; symbol declarations come from ``sig``."""
    store = StatsStore()
    for node in read_all(text):
        if not isinstance(node, SList) or not node.items or not isinstance(node.items[0], Atom):
            raise SExprSyntaxError("expected (terms ...), (global ...) or (path ...)",
                                   node.line, node.col)
        head, rest = node.items[0].text, node.items[1:]
        if head == "terms":
            if len(rest) != 1 or not isinstance(rest[0], Atom) or not rest[0].text.isdigit():
                raise SExprSyntaxError("expected (terms <n>)", node.line, node.col)
            store.terms_observed = int(rest[0].text)
        elif head == "global":
            for pair in rest:
                name, n = _count_pair(pair)
                if name not in sig.symbols:
                    raise UnknownSymbol(f"UnknownSymbol({name})", pair.line, pair.col)
                store.global_counts[name] += n
                store.observed_symbols[name] = sig.symbols[name]
        elif head == "path":
            if not rest or not isinstance(rest[0], SList):
                raise SExprSyntaxError("expected (path (<symbol>*) ...)", node.line, node.col)
            path = tuple(a.text for a in rest[0].items if isinstance(a, Atom))
            for pair in rest[1:]:
                name, n = _count_pair(pair)
                store.path_counts[path][name] += n
        else:
            raise SExprSyntaxError(f"unknown stats entry {head!r}", node.line, node.col)
    for name, total in store.global_counts.items():
        by_path = sum(c.get(name, 0) for c in store.path_counts.values())
        if by_path != total:
            raise ParseError(f"path counts for {name} sum to {by_path}, global count is {total}")
    return store
