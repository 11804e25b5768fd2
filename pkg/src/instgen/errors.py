"""Exception hierarchy.

Every error raised on bad input derives from :class:`InstGenError`, which the
CLI maps to exit status 1.
"""

from __future__ import annotations


class InstGenError(Exception):
    """Base class for all input and generation errors."""


class ParseError(InstGenError):
    """An error tied to a location in some input text."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.message = message
        self.line = line
        self.col = col
        if line is not None:
            message = f"{line}:{col}: {message}"
        super().__init__(message)


class SExprSyntaxError(ParseError):
    pass


class DuplicateDeclaration(ParseError):
    pass


class UndeclaredSort(ParseError):
    pass


class UnsupportedSortArity(ParseError):
    pass


class BadIdentifier(ParseError):
    pass


class UnknownSymbol(ParseError):
    pass


class ArityMismatch(ParseError):
    pass


class SortMismatch(ParseError):
    pass


class UnknownQuantifier(ParseError):
    pass


class BadEffortLevel(ParseError):
    pass


class EmptyWeightVector(InstGenError):
    pass


class NoSymbolsForSort(InstGenError):
    pass


class NoConstant(InstGenError):
    pass


class EmptyGridAxis(InstGenError):
    pass


class ResultsError(InstGenError):
    """Malformed results matrix."""


class RaggedRow(ResultsError):
    pass


class NonBinaryCell(ResultsError):
    def __init__(self, row: int, col: int, value: str):
        self.row = row
        self.col = col
        super().__init__(f"row {row}, column {col}: expected 0 or 1, got {value!r}")


class DuplicateStrategy(ResultsError):
    pass


class DuplicateProblem(ResultsError):
    pass


class NoReference(ResultsError):
    pass
