"""Round-by-round replay of a recorded instantiation trace.

A trace file declares a signature, the asserted quantifiers with the sorts of
their bound variables, and the rounds the solver went through::

    (declare-sort S 0)
    (declare-fun f (S) S)
    (declare-const a S)
    (quantifier q1 (S S))
    (round :effort lastcall :lemma false (inst q1 a (f a)))

Each round lists the instantiations other modules produced (``inst``), the
highest effort level reached, and whether another module produced a lemma.
Replaying feeds those instantiations into the statistics and, whenever the
effort policy allows, generates one batch of terms per bound-variable sort.
"""

from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import dataclass, field

from .errors import (
    ArityMismatch,
    BadEffortLevel,
    InstGenError,
    SExprSyntaxError,
    SortMismatch,
    UndeclaredSort,
    UnknownQuantifier,
)
from .generator import Effort, GenConfig, TermMaker, make_rng, shuffle
from .sexpr import Atom, SList, read_all
from .stats import StatsStore, dump_stats
from .terms import GroundTerm, Signature, SignatureBuilder, Sort, SymbolDecl, print_term, term_from_sexpr


class EffortLevel(enum.IntEnum):
    CONFLICT = 0
    STANDARD = 1
    MODEL = 2
    LASTCALL = 3

    @property
    def label(self) -> str:
        return self.name.lower()

    @classmethod
    def parse(cls, text: str) -> "EffortLevel":
        try:
            return cls[text.upper()]
        except KeyError:
            raise BadEffortLevel(f"BadEffortLevel({text})") from None


@dataclass(frozen=True)
class InstRecord:
    quantifier_id: str
    terms: tuple[GroundTerm, ...]


@dataclass(frozen=True)
class Round:
    effort_reached: EffortLevel
    observed: tuple[InstRecord, ...] = ()
    lemma_produced_by_others: bool = False


@dataclass(frozen=True)
class Trace:
    signature: Signature
    quantifiers: tuple[tuple[str, tuple[Sort, ...]], ...]
    rounds: tuple[Round, ...]


def _keyword_args(items, node) -> tuple[dict[str, Atom], list]:
    opts: dict[str, Atom] = {}
    rest = []
    i = 0
    while i < len(items):
        it = items[i]
        if isinstance(it, Atom) and it.text.startswith(":"):
            if i + 1 >= len(items) or not isinstance(items[i + 1], Atom):
                raise SExprSyntaxError(f"missing value for {it.text}", it.line, it.col)
            opts[it.text] = items[i + 1]
            i += 2
        else:
            rest.append(it)
            i += 1
    return opts, rest


def parse_trace(text: str, signature: Signature | None = None) -> Trace:
    """Parse a trace document.

    Declarations in the document extend ``signature`` when one is given.
    """
    builder = SignatureBuilder(signature)
    sig: Signature | None = None
    quants: dict[str, tuple[Sort, ...]] = {}
    rounds: list[Round] = []

    for node in read_all(text):
        if not isinstance(node, SList) or not node.items or not isinstance(node.items[0], Atom):
            raise SExprSyntaxError("expected a command", node.line, node.col)
        head = node.items[0].text
        if builder.command(node):
            sig = None
            continue
        if sig is None:
            sig = builder.build()
        if head == "quantifier":
            if len(node.items) != 3 or not isinstance(node.items[1], Atom) \
                    or not isinstance(node.items[2], SList):
                raise SExprSyntaxError("expected (quantifier <id> (<sort>*))", node.line, node.col)
            qid = node.items[1].text
            if qid in quants:
                raise SExprSyntaxError(f"duplicate quantifier {qid}", node.line, node.col)
            sorts = []
            for s in node.items[2].items:
                if not isinstance(s, Atom):
                    raise SExprSyntaxError("expected a sort name", s.line, s.col)
                if s.text not in sig.sorts:
                    raise UndeclaredSort(f"UndeclaredSort({s.text})", s.line, s.col)
                sorts.append(sig.sorts[s.text])
            quants[qid] = tuple(sorts)
        elif head == "round":
            opts, body = _keyword_args(node.items[1:], node)
            unknown = set(opts) - {":effort", ":lemma"}
            if unknown:
                raise SExprSyntaxError(f"unknown round option {sorted(unknown)[0]}", node.line, node.col)
            if ":effort" not in opts:
                raise SExprSyntaxError("round is missing :effort", node.line, node.col)
            level = opts[":effort"]
            try:
                effort = EffortLevel.parse(level.text)
            except BadEffortLevel as e:
                raise BadEffortLevel(e.message, level.line, level.col) from None
            lemma_atom = opts.get(":lemma")
            lemma = False
            if lemma_atom is not None:
                if lemma_atom.text not in ("true", "false"):
                    raise SExprSyntaxError("expected true or false", lemma_atom.line, lemma_atom.col)
                lemma = lemma_atom.text == "true"
            records = []
            for inst in body:
                if not isinstance(inst, SList) or len(inst.items) < 2 \
                        or not isinstance(inst.items[0], Atom) or inst.items[0].text != "inst" \
                        or not isinstance(inst.items[1], Atom):
                    raise SExprSyntaxError("expected (inst <id> <term>*)", inst.line, inst.col)
                qid = inst.items[1].text
                if qid not in quants:
                    raise UnknownQuantifier(f"UnknownQuantifier({qid})", inst.items[1].line, inst.items[1].col)
                sorts = quants[qid]
                term_nodes = inst.items[2:]
                if len(term_nodes) != len(sorts):
                    raise ArityMismatch(
                        f"ArityMismatch({qid}, expected {len(sorts)}, got {len(term_nodes)})",
                        inst.line, inst.col,
                    )
                terms = []
                for i, (tn, sort) in enumerate(zip(term_nodes, sorts), start=1):
                    t = term_from_sexpr(tn, sig)
                    if t.sort != sort:
                        raise SortMismatch(
                            f"SortMismatch({qid}, variable {i}: expected {sort}, got {t.sort})",
                            tn.line, tn.col,
                        )
                    terms.append(t)
                records.append(InstRecord(qid, tuple(terms)))
            rounds.append(Round(effort, tuple(records), lemma))
        else:
            raise SExprSyntaxError(f"unknown command {head!r}", node.line, node.col)

    return Trace(sig or builder.build(), tuple(quants.items()), tuple(rounds))


def should_fire(mode: Effort | str, r: Round) -> bool:
    """Whether the generator runs in round ``r`` under effort ``mode``.

    ``lastcall`` runs only at the last-call level when no other module produced
    a lemma; ``interleave`` runs at standard effort and above.
    """
    if Effort(mode) is Effort.LASTCALL:
        return r.effort_reached is EffortLevel.LASTCALL and not r.lemma_produced_by_others
    return r.effort_reached >= EffortLevel.STANDARD


@dataclass
class RoundReport:
    index: int
    effort: EffortLevel
    lemma: bool
    fired: bool
    terms_observed: int
    stats_digest: str
    batches: list[tuple[Sort, list[GroundTerm]]] = field(default_factory=list)
    diagnostics: list[tuple[Sort, str]] = field(default_factory=list)


@dataclass
class SessionReport:
    config: GenConfig
    rounds: list[RoundReport]

    @property
    def fired_rounds(self) -> list[int]:
        return [r.index for r in self.rounds if r.fired]

    def to_sexpr(self) -> str:
        c = self.config
        flip = "-" if not c.uses_flip else f"{c.flip or 0.0:g}"
        out = [
            f"(session :effort {c.effort.value} :pick {c.pick.value} :depth {c.depth}"
            f" :flip {flip} :seed {c.seed} :batch-size {c.batch_size})"
        ]
        for r in self.rounds:
            out.append(
                f"(round {r.index} :effort {r.effort.label} :lemma {str(r.lemma).lower()}"
                f" :fired {str(r.fired).lower()} :observed {r.terms_observed}"
                f" :stats {r.stats_digest}"
            )
            for sort, terms in r.batches:
                body = "".join(" " + print_term(t) for t in terms)
                out.append(f"  (batch {sort}{body})")
            for sort, msg in r.diagnostics:
                out.append(f"  (diagnostic {sort} {json.dumps(msg)})")
            out[-1] += ")"
        return "\n".join(out) + "\n"

    def to_json(self) -> str:
        c = self.config
        doc = {
            "config": {
                "effort": c.effort.value,
                "pick": c.pick.value,
                "depth": c.depth,
                "flip": c.flip if c.uses_flip else None,
                "seed": c.seed,
                "batch_size": c.batch_size,
            },
            "rounds": [
                {
                    "index": r.index,
                    "effort": r.effort.label,
                    "lemma": r.lemma,
                    "fired": r.fired,
                    "terms_observed": r.terms_observed,
                    "stats": r.stats_digest,
                    "batches": {s.name: [print_term(t) for t in ts] for s, ts in r.batches},
                    "diagnostics": {s.name: m for s, m in r.diagnostics},
                }
                for r in self.rounds
            ],
        }
        return json.dumps(doc, indent=2) + "\n"


def _digest(store: StatsStore) -> str:
    return hashlib.sha256(dump_stats(store).encode()).hexdigest()[:16]


def run_session(
    trace: Trace,
    cfg: GenConfig,
    universe: list[SymbolDecl] | None = None,
    feed_back: bool = False,
    store: StatsStore | None = None,
) -> SessionReport:
    """Replay ``trace`` under ``cfg``.

    Per round: observe the other modules' instantiations, then, if the effort
    policy fires, shuffle the quantifiers and generate one batch for each
    distinct bound-variable sort in shuffled order.  Generated terms are only
    fed back into the statistics when ``feed_back`` is set.
    """
    rng = make_rng(cfg.seed)
    store = StatsStore() if store is None else store
    reports = []
    for index, rnd in enumerate(trace.rounds, start=1):
        for rec in rnd.observed:
            store.observe_all(rec.terms)
        fired = should_fire(cfg.effort, rnd)
        report = RoundReport(index, rnd.effort_reached, rnd.lemma_produced_by_others, fired,
                             store.terms_observed, _digest(store))
        if fired:
            quants = list(trace.quantifiers)
            shuffle(quants, rng)
            sorts: dict[Sort, None] = {}
            for _, var_sorts in quants:
                for s in var_sorts:
                    sorts.setdefault(s, None)
            maker = TermMaker(cfg, store, universe)
            generated = []
            for sort in sorts:
                try:
                    batch = maker.batch(sort, rng)
                except InstGenError as e:
                    report.batches.append((sort, []))
                    report.diagnostics.append((sort, str(e)))
                    continue
                report.batches.append((sort, batch))
                generated.extend(batch)
            if feed_back:
                store.observe_all(generated)
        reports.append(report)
    return SessionReport(cfg, reports)
