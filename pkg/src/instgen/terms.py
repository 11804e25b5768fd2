"""Sorts, symbol declarations, ground terms and their textual syntax.

Signatures use a small subset of SMT-LIB::

    (declare-sort S 0)
    (declare-fun f (S S) S)
    (declare-const a S)

Terms are written as ``a`` for constants and ``(f t1 ... tn)`` for
applications.  Quoted symbols ``|...|`` are not supported.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .errors import (
    ArityMismatch,
    BadIdentifier,
    DuplicateDeclaration,
    ParseError,
    SExprSyntaxError,
    SortMismatch,
    UndeclaredSort,
    UnknownSymbol,
    UnsupportedSortArity,
)
from .sexpr import Atom, SExpr, SList, read_all, read_one

_SIMPLE_SYMBOL = re.compile(r"[A-Za-z~!@$%^&*_\-+=<>.?/][A-Za-z0-9~!@$%^&*_\-+=<>.?/]*")


def is_identifier(name: str) -> bool:
    return _SIMPLE_SYMBOL.fullmatch(name) is not None


@dataclass(frozen=True, order=True)
class Sort:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class SymbolDecl:
    name: str
    arg_sorts: tuple[Sort, ...]
    result_sort: Sort

    @property
    def arity(self) -> int:
        return len(self.arg_sorts)

    @property
    def is_constant(self) -> bool:
        return not self.arg_sorts

    def __str__(self) -> str:
        if self.is_constant:
            return f"{self.name}:{self.result_sort}"
        args = "×".join(s.name for s in self.arg_sorts)
        return f"{self.name}:{args}→{self.result_sort}"


@dataclass(frozen=True)
class GroundTerm:
    """An immutable, well-sorted, variable-free term.

    Construction checks arity and argument sorts, so an ill-sorted
    ``GroundTerm`` cannot exist.
    """

    head: SymbolDecl
    args: tuple["GroundTerm", ...] = ()
    _hash: int = field(default=0, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(self.args) != self.head.arity:
            raise ArityMismatch(
                f"ArityMismatch({self.head.name}, expected {self.head.arity}, got {len(self.args)})"
            )
        for i, (arg, sort) in enumerate(zip(self.args, self.head.arg_sorts)):
            if arg.head.result_sort != sort:
                raise SortMismatch(
                    f"SortMismatch({self.head.name}, argument {i + 1}: "
                    f"expected {sort}, got {arg.head.result_sort})"
                )
        object.__setattr__(self, "_hash", hash((self.head, self.args)))

    def __hash__(self) -> int:
        return self._hash

    @property
    def sort(self) -> Sort:
        return self.head.result_sort

    def depth(self) -> int:
        if not self.args:
            return 0
        return 1 + max(a.depth() for a in self.args)

    def nodes(self, path: tuple[str, ...] = ()) -> Iterator[tuple[tuple[str, ...], "GroundTerm"]]:
        """Yield ``(path, subterm)`` for every node, pre-order.

        The path holds the ancestor head names from the root down to the
        parent; argument positions are not recorded.
        """
        yield path, self
        if self.args:
            below = path + (self.head.name,)
            for a in self.args:
                yield from a.nodes(below)

    def __str__(self) -> str:
        return print_term(self)


def const(decl: SymbolDecl) -> GroundTerm:
    return GroundTerm(decl, ())


def app(decl: SymbolDecl, *args: GroundTerm) -> GroundTerm:
    return GroundTerm(decl, tuple(args))


@dataclass(frozen=True)
class Signature:
    sorts: Mapping[str, Sort] = field(default_factory=dict)
    symbols: Mapping[str, SymbolDecl] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for decl in self.symbols.values():
            for s in (*decl.arg_sorts, decl.result_sort):
                if s.name not in self.sorts:
                    raise UndeclaredSort(f"UndeclaredSort({s.name})")

    def sort(self, name: str) -> Sort:
        try:
            return self.sorts[name]
        except KeyError:
            raise UndeclaredSort(f"UndeclaredSort({name})") from None

    def symbol(self, name: str) -> SymbolDecl:
        try:
            return self.symbols[name]
        except KeyError:
            raise UnknownSymbol(f"UnknownSymbol({name})") from None

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Signature):
            return NotImplemented
        return dict(self.sorts) == dict(other.sorts) and dict(self.symbols) == dict(other.symbols)

    def __hash__(self) -> int:
        return hash((frozenset(self.sorts.values()), frozenset(self.symbols.values())))


def symbols_of_sort(universe: Iterable[SymbolDecl], sort: Sort) -> set[SymbolDecl]:
    """All symbols in ``universe`` whose result sort is ``sort``."""
    return {s for s in universe if s.result_sort == sort}


def validate_term(t: GroundTerm, sig: Signature | None = None) -> None:
    """Walk ``t`` and re-check arity, sorts and (optionally) membership in ``sig``.

    Raises on the first violation.  Meant for tests and debugging since
    :class:`GroundTerm` already checks itself on construction.
    """
    stack = [t]
    while stack:
        node = stack.pop()
        if len(node.args) != node.head.arity:
            raise ArityMismatch(f"ArityMismatch({node.head.name})")
        for arg, sort in zip(node.args, node.head.arg_sorts):
            if arg.sort != sort:
                raise SortMismatch(f"SortMismatch({node.head.name})")
        if sig is not None and sig.symbols.get(node.head.name) != node.head:
            raise UnknownSymbol(f"UnknownSymbol({node.head.name})")
        stack.extend(node.args)


# -- parsing ---------------------------------------------------------------


def _ident(node: SExpr, what: str) -> str:
    if not isinstance(node, Atom):
        raise SExprSyntaxError(f"expected {what}, got a list", node.line, node.col)
    if not is_identifier(node.text):
        raise BadIdentifier(f"invalid {what} {node.text!r}", node.line, node.col)
    return node.text


class SignatureBuilder:
    """Accumulates declarations; shared by the signature and trace readers."""

    def __init__(self, base: Signature | None = None):
        self.sorts: dict[str, Sort] = dict(base.sorts) if base else {}
        self.symbols: dict[str, SymbolDecl] = dict(base.symbols) if base else {}

    def _sort_ref(self, node: SExpr) -> Sort:
        name = _ident(node, "sort")
        if name not in self.sorts:
            raise UndeclaredSort(f"UndeclaredSort({name})", node.line, node.col)
        return self.sorts[name]

    def _add_symbol(self, name_node: SExpr, args: tuple[Sort, ...], result: Sort) -> None:
        name = _ident(name_node, "symbol name")
        if name in self.symbols:
            raise DuplicateDeclaration(
                f"duplicate declaration of symbol {name}", name_node.line, name_node.col
            )
        self.symbols[name] = SymbolDecl(name, args, result)

    def command(self, node: SList) -> bool:
        """Handle one declaration; return False if ``node`` is not a declaration."""
        items = node.items
        if not items or not isinstance(items[0], Atom):
            return False
        head = items[0].text
        if head == "declare-sort":
            if len(items) != 3:
                raise SExprSyntaxError("expected (declare-sort <name> 0)", node.line, node.col)
            name = _ident(items[1], "sort name")
            arity = items[2]
            if not isinstance(arity, Atom) or not arity.text.isdigit():
                raise SExprSyntaxError("sort arity must be a numeral", arity.line, arity.col)
            if int(arity.text) != 0:
                raise UnsupportedSortArity(
                    f"parametric sort {name} (arity {arity.text}) is not supported",
                    arity.line,
                    arity.col,
                )
            if name in self.sorts:
                raise DuplicateDeclaration(
                    f"duplicate declaration of sort {name}", items[1].line, items[1].col
                )
            self.sorts[name] = Sort(name)
        elif head == "declare-fun":
            if len(items) != 4 or not isinstance(items[2], SList):
                raise SExprSyntaxError(
                    "expected (declare-fun <name> (<sort>*) <sort>)", node.line, node.col
                )
            args = tuple(self._sort_ref(s) for s in items[2].items)
            self._add_symbol(items[1], args, self._sort_ref(items[3]))
        elif head == "declare-const":
            if len(items) != 3:
                raise SExprSyntaxError("expected (declare-const <name> <sort>)", node.line, node.col)
            self._add_symbol(items[1], (), self._sort_ref(items[2]))
        else:
            return False
        return True

    def build(self) -> Signature:
        return Signature(dict(self.sorts), dict(self.symbols))


def parse_signature(text: str) -> Signature:
    builder = SignatureBuilder()
    for node in read_all(text):
        if not isinstance(node, SList) or not builder.command(node):
            raise SExprSyntaxError("expected a declare-sort/declare-fun/declare-const command",
                                   node.line, node.col)
    return builder.build()


def term_from_sexpr(node: SExpr, sig: Signature, path: tuple[str, ...] = ()) -> GroundTerm:
    """Convert an s-expression to a term, reporting errors with the subterm path."""
    where = f" at path ({' '.join(path)})" if path else ""
    if isinstance(node, Atom):
        decl = sig.symbols.get(node.text)
        if decl is None:
            raise UnknownSymbol(f"UnknownSymbol({node.text}){where}", node.line, node.col)
        if not decl.is_constant:
            raise ArityMismatch(
                f"ArityMismatch({decl.name}, expected {decl.arity}, got 0){where}",
                node.line,
                node.col,
            )
        return GroundTerm(decl)
    if not node.items or not isinstance(node.items[0], Atom):
        raise SExprSyntaxError(f"expected (<symbol> <term>*){where}", node.line, node.col)
    head, *args = node.items
    decl = sig.symbols.get(head.text)
    if decl is None:
        raise UnknownSymbol(f"UnknownSymbol({head.text}){where}", head.line, head.col)
    if len(args) != decl.arity:
        raise ArityMismatch(
            f"ArityMismatch({decl.name}, expected {decl.arity}, got {len(args)}){where}",
            node.line,
            node.col,
        )
    below = path + (decl.name,)
    sub = []
    for i, (a, sort) in enumerate(zip(args, decl.arg_sorts), start=1):
        t = term_from_sexpr(a, sig, below)
        if t.sort != sort:
            raise SortMismatch(
                f"SortMismatch({decl.name}, argument {i}: expected {sort}, got {t.sort})"
                f" at path ({' '.join(below)})",
                a.line,
                a.col,
            )
        sub.append(t)
    return GroundTerm(decl, tuple(sub))


def parse_term(text: str, sig: Signature) -> GroundTerm:
    return term_from_sexpr(read_one(text), sig)


def print_term(t: GroundTerm) -> str:
    if not t.args:
        return t.head.name
    return "(" + " ".join([t.head.name, *(print_term(a) for a in t.args)]) + ")"


def print_signature(sig: Signature) -> str:
    lines = [f"(declare-sort {s} 0)" for s in sorted(sig.sorts)]
    for name in sorted(sig.symbols):
        d = sig.symbols[name]
        args = " ".join(s.name for s in d.arg_sorts)
        lines.append(f"(declare-fun {name} ({args}) {d.result_sort})")
    return "\n".join(lines) + ("\n" if lines else "")


__all__ = [
    "GroundTerm",
    "ParseError",
    "Signature",
    "SignatureBuilder",
    "Sort",
    "SymbolDecl",
    "app",
    "const",
    "is_identifier",
    "parse_signature",
    "parse_term",
    "print_signature",
    "print_term",
    "symbols_of_sort",
    "term_from_sexpr",
    "validate_term",
]
