"""Exceptions raised by the balab library.

Checkers report failures as verdicts; these exceptions are reserved for
malformed input, violated preconditions and refused enumerations.
"""

from typing import Optional


class BalabError(Exception):
    """Base class for every error raised by balab."""


class TermSyntaxError(BalabError, ValueError):
    """A term string does not follow the term grammar."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class GeneratorRangeError(BalabError, IndexError):
    """A term mentions a generator outside the algebra's index set."""

    def __init__(self, index: int, size: int):
        super().__init__(f"generator x{index} out of range for {size} generator(s)")
        self.index = index
        self.size = size


class FormatError(BalabError, ValueError):
    """An input file is malformed or has an unknown version header."""

    def __init__(self, message: str, line: Optional[int] = None, column: int = 1):
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(f"{where}{message}")
        self.line = line
        self.column = column


class PreconditionError(BalabError, ValueError):
    """An operation was called on inputs violating one of its hypotheses.

    Attributes:
        clause: Short label of the violated hypothesis (e.g. "heart", "(alpha)")
    """

    def __init__(self, clause: str, message: str):
        super().__init__(f"hypothesis {clause} violated: {message}")
        self.clause = clause


class SizeBoundError(BalabError):
    """An exhaustive enumeration or oracle call would exceed its bound."""

    def __init__(self, what: str, requested: int, bound: int):
        super().__init__(f"{what}: {requested} exceeds the bound {bound}")
        self.requested = requested
        self.bound = bound


class ConstructionError(BalabError):
    """A construction produced pieces that do not glue together.

    Attributes:
        point: The point whose function failed, when one is known
    """

    def __init__(self, message: str, point: Optional[object] = None):
        super().__init__(message)
        self.point = point
