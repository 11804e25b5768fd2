"""Minimal s-expression reader with source positions."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .errors import SExprSyntaxError


@dataclass(frozen=True)
class Atom:
    text: str
    line: int
    col: int


@dataclass(frozen=True)
class SList:
    items: tuple["SExpr", ...]
    line: int
    col: int


SExpr = Union[Atom, SList]

_TOKEN = re.compile(r"\s+|;[^\n]*|\(|\)|[^\s();]+")


def _tokens(text: str):
    line, line_start = 1, 0
    for m in _TOKEN.finditer(text):
        tok = m.group()
        col = m.start() - line_start + 1
        if tok[0].isspace() or tok[0] == ";":
            nl = tok.count("\n")
            if nl:
                line += nl
                line_start = m.start() + tok.rindex("\n") + 1
            continue
        yield tok, line, col


def read_all(text: str) -> list[SExpr]:
    """Read every top-level s-expression in ``text``."""
    stack: list[tuple[list[SExpr], int, int]] = []
    out: list[SExpr] = []
    for tok, line, col in _tokens(text):
        if tok == "(":
            stack.append(([], line, col))
        elif tok == ")":
            if not stack:
                raise SExprSyntaxError("unbalanced ')'", line, col)
            items, l0, c0 = stack.pop()
            node = SList(tuple(items), l0, c0)
            (stack[-1][0] if stack else out).append(node)
        else:
            node = Atom(tok, line, col)
            (stack[-1][0] if stack else out).append(node)
    if stack:
        _, l0, c0 = stack[-1]
        raise SExprSyntaxError("unclosed '('", l0, c0)
    return out


def read_one(text: str) -> SExpr:
    exprs = read_all(text)
    if len(exprs) != 1:
        raise SExprSyntaxError(f"expected exactly one s-expression, found {len(exprs)}", 1, 1)
    return exprs[0]
