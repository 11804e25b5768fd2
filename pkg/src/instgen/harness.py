"""Strategy grids, solver result matrices, reference comparison and greedy cover."""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Sequence

from .errors import (
    DuplicateProblem,
    DuplicateStrategy,
    EmptyGridAxis,
    NoReference,
    NonBinaryCell,
    RaggedRow,
    ResultsError,
)
from .generator import Effort, GenConfig, Pick


@dataclass(frozen=True)
class GridSpec:
    efforts: Sequence[Effort | str]
    picks: Sequence[Pick | str]
    depths: Sequence[int]
    flips: Sequence[float]

    @classmethod
    def full_evaluation(cls) -> "GridSpec":
        """The 110-strategy grid: 2 efforts, 3 picks, depths 0..4, 5 flip values."""
        return cls(
            efforts=(Effort.LASTCALL, Effort.INTERLEAVE),
            picks=(Pick.RANDOM, Pick.WEIGHTS, Pick.PATHS),
            depths=(0, 1, 2, 3, 4),
            flips=(0.0, 0.2, 0.5, 0.8, 1.0),
        )


def grid_size(spec: GridSpec) -> int:
    per_pick = [len(spec.flips) if Pick(p) is not Pick.RANDOM else 1 for p in spec.picks]
    return len(spec.efforts) * len(spec.depths) * sum(per_pick)


def enumerate_grid(spec: GridSpec, seed: int = 0, batch_size: int = 20) -> list[GenConfig]:
    """Expand ``spec`` in (effort, pick, depth, flip) order.

    ``random`` has no flip dimension and contributes one config per
    (effort, depth).
    """
    for axis in ("efforts", "picks", "depths", "flips"):
        if not getattr(spec, axis):
            raise EmptyGridAxis(f"EmptyGridAxis({axis})")
    out = []
    for effort, pick, depth in itertools.product(spec.efforts, spec.picks, spec.depths):
        pick = Pick(pick)
        flips = [None] if pick is Pick.RANDOM else spec.flips
        for flip in flips:
            out.append(GenConfig(pick=pick, depth=depth, flip=flip, effort=Effort(effort),
                                 seed=seed, batch_size=batch_size))
    return out


@dataclass(frozen=True)
class ResultsMatrix:
    problems: tuple[str, ...]
    strategies: tuple[str, ...]
    solved: tuple[tuple[bool, ...], ...]  # one row per strategy
    reference: str | None = None

    def __post_init__(self) -> None:
        if len(set(self.strategies)) != len(self.strategies):
            raise DuplicateStrategy("DuplicateStrategy")
        if len(self.solved) != len(self.strategies):
            raise RaggedRow("one row of results per strategy is required")
        for row in self.solved:
            if len(row) != len(self.problems):
                raise RaggedRow("every strategy row must cover every problem")
        if self.reference is not None and self.reference not in self.strategies:
            raise NoReference(f"reference strategy {self.reference!r} is not in the matrix")

    @classmethod
    def from_sets(cls, problems: Sequence[str], solved_by: dict[str, set[str]],
                  reference: str | None = None) -> "ResultsMatrix":
        problems = tuple(problems)
        return cls(
            problems,
            tuple(solved_by),
            tuple(tuple(p in s for p in problems) for s in solved_by.values()),
            reference,
        )

    def solved_set(self, strategy: str) -> frozenset[int]:
        row = self.solved[self.strategies.index(strategy)]
        return frozenset(i for i, x in enumerate(row) if x)

    def to_csv(self) -> str:
        buf = io.StringIO()
        if self.reference is not None:
            buf.write(f"#reference={self.reference}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["problem", *self.strategies])
        for j, p in enumerate(self.problems):
            w.writerow([p, *(int(row[j]) for row in self.solved)])
        return buf.getvalue()


def load_results(csv_text: str) -> ResultsMatrix:
    """Read a ``problem,<strategy>...`` CSV of 0/1 cells.

    Lines starting with ``#`` are directives; ``#reference=<id>`` names the
    reference strategy.
    """
    reference = None
    data_lines = []
    for line in csv_text.splitlines():
        stripped = line.strip()
        if stripped.startswith("#"):
            key, _, value = stripped[1:].partition("=")
            if key.strip() == "reference":
                reference = value.strip()
            continue
        if stripped:
            data_lines.append(line)
    rows = list(csv.reader(data_lines))
    if not rows:
        raise ResultsError("missing header row")
    header = [h.strip() for h in rows[0]]
    if len(header) < 2 or header[0] != "problem":
        raise ResultsError("header must be problem,<strategy id>...")
    strategies = header[1:]
    seen = set()
    for s in strategies:
        if s in seen:
            raise DuplicateStrategy(f"DuplicateStrategy({s})")
        seen.add(s)
    problems = []
    columns: list[list[bool]] = [[] for _ in strategies]
    for r, row in enumerate(rows[1:], start=1):
        if len(row) != len(header):
            raise RaggedRow(f"row {r} has {len(row)} cells, expected {len(header)}")
        problems.append(row[0].strip())
        for c, cell in enumerate(row[1:], start=1):
            cell = cell.strip()
            if cell not in ("0", "1"):
                raise NonBinaryCell(r, c, cell)
            columns[c - 1].append(cell == "1")
    if len(set(problems)) != len(problems):
        raise DuplicateProblem("duplicate problem id")
    if reference is not None and reference not in strategies:
        raise NoReference(f"reference strategy {reference!r} is not a column")
    return ResultsMatrix(tuple(problems), tuple(strategies),
                         tuple(tuple(col) for col in columns), reference)


@dataclass(frozen=True)
class Aggregate:
    total: int
    gained: int
    lost: int


def aggregate_vs_reference(m: ResultsMatrix, reference: str | None = None) -> dict[str, Aggregate]:
    ref = reference or m.reference
    if ref is None:
        raise NoReference("NoReference")
    if ref not in m.strategies:
        raise NoReference(f"reference strategy {ref!r} is not in the matrix")
    ref_set = m.solved_set(ref)
    out = {}
    for s in m.strategies:
        mine = m.solved_set(s)
        out[s] = Aggregate(len(mine), len(mine - ref_set), len(ref_set - mine))
    return out


@dataclass(frozen=True)
class CoverRow:
    strategy: str
    solves: int
    new: int
    adds: float | None  # new / previous total; None for the first row
    total: int

    @property
    def adds_display(self) -> str:
        return "-" if self.adds is None else f"+{percent(self.adds)}%"


def percent(fraction: float) -> str:
    """``fraction`` as a percentage with two decimals, rounded half-up."""
    value = Decimal(repr(fraction)) * 100
    return str(value.quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def check_cover_rows(rows: Sequence[CoverRow]) -> None:
    """Raise ``ValueError`` unless the running-total and adds identities hold."""
    prev = None
    for k, row in enumerate(rows):
        if prev is None:
            if not (row.total == row.new == row.solves):
                raise ValueError(f"row 1: total, new and solves must agree: {row}")
            if row.adds is not None:
                raise ValueError("row 1 has no adds fraction")
        else:
            if row.total != prev.total + row.new:
                raise ValueError(f"row {k + 1}: total {row.total} != {prev.total} + {row.new}")
            expected = row.new / prev.total if prev.total else 0.0
            if row.adds is None or abs(row.adds - expected) > 1e-12:
                raise ValueError(f"row {k + 1}: adds must be new / previous total")
        prev = row


def _argmax(candidates, covered, solo):
    # key: marginal gain, solo solves, then smallest id
    return min(candidates, key=lambda s: (-len(solo[s] - covered), -len(solo[s]), s))


def greedy_cover(m: ResultsMatrix, top: int | None = None, exhaustive: bool = False) -> list[CoverRow]:
    """Order strategies by how many still-unsolved problems each adds.

    Stops when the best remaining strategy adds nothing (unless
    ``exhaustive``), when every strategy is placed, or after ``top`` rows.
    """
    if not m.strategies:
        raise ResultsError("greedy cover needs at least one strategy")
    solo = {s: m.solved_set(s) for s in m.strategies}
    remaining = set(m.strategies)
    covered: frozenset[int] = frozenset()
    rows: list[CoverRow] = []
    while remaining and (top is None or len(rows) < top):
        best = _argmax(remaining, covered, solo)
        new = len(solo[best] - covered)
        if rows and new == 0 and not exhaustive:
            break
        prev_total = len(covered)
        covered = covered | solo[best]
        adds = None if not rows else (new / prev_total if prev_total else 0.0)
        rows.append(CoverRow(best, len(solo[best]), new, adds, len(covered)))
        remaining.remove(best)
    return rows


def format_table(header: Sequence[str], rows: Sequence[Sequence[object]], fmt: str = "text") -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return buf.getvalue()
    cells = [list(map(str, header))] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = []
    for r in cells:
        line = "  ".join(c.ljust(w) if i == 0 else c.rjust(w) for i, (c, w) in enumerate(zip(r, widths)))
        lines.append(line.rstrip())
    return "\n".join(lines) + "\n"


def cover_table(rows: Sequence[CoverRow], fmt: str = "text") -> str:
    header = ["strategy", "solves", "+new", "adds", "total"]
    if fmt == "csv":
        body = [[r.strategy, r.solves, r.new, "" if r.adds is None else repr(r.adds), r.total]
                for r in rows]
    else:
        body = [[r.strategy, r.solves, f"+{r.new}", r.adds_display, f"={r.total}"] for r in rows]
    return format_table(header, body, fmt)


def aggregate_table(aggs: dict[str, Aggregate], fmt: str = "text") -> str:
    header = ["strategy", "total", "gained", "lost"]
    if fmt == "csv":
        body = [[s, a.total, a.gained, a.lost] for s, a in aggs.items()]
    else:
        body = [[s, a.total, f"+{a.gained}", f"-{a.lost}"] for s, a in aggs.items()]
    return format_table(header, body, fmt)
