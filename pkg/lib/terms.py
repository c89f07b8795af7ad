"""Boolean terms over numbered generators.

Terms are immutable trees built from constants, generator atoms, negation
and n-ary conjunction/disjunction. This module parses and prints the
textual grammar, evaluates terms under a 0/1 assignment and computes
disjunctive normal forms over elementary conjunctions.

Grammar (whitespace insignificant):
    term  := or
    or    := and {"|" and}
    and   := lit {"&" lit}
    lit   := "!" lit | "0" | "1" | "x" digits | "(" term ")"
"""

from dataclasses import dataclass
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple, Union

from lib.errors import GeneratorRangeError, TermSyntaxError


@dataclass(frozen=True)
class Const:
    value: int


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Not:
    operand: "Term"


@dataclass(frozen=True)
class And:
    operands: Tuple["Term", ...]


@dataclass(frozen=True)
class Or:
    operands: Tuple["Term", ...]


Term = Union[Const, Var, Not, And, Or]

# (generator index, positive?) -- a positive literal is x_i, a negative one !x_i
Literal = Tuple[int, bool]

DIGITS = "0123456789"

ZERO = Const(0)
ONE = Const(1)


def literal_term(literal: Literal) -> Term:
    index, positive = literal
    return Var(index) if positive else Not(Var(index))


def conjunction(operands: Sequence[Term]) -> Term:
    """Meet of the operands; the empty meet is 1 and singletons are unwrapped."""
    if not operands:
        return ONE
    if len(operands) == 1:
        return operands[0]
    return And(tuple(operands))


def disjunction(operands: Sequence[Term]) -> Term:
    """Join of the operands; the empty join is 0 and singletons are unwrapped."""
    if not operands:
        return ZERO
    if len(operands) == 1:
        return operands[0]
    return Or(tuple(operands))


def elementary(literals: Sequence[Literal]) -> Term:
    """Build the elementary conjunction of the given literals, in order."""
    return conjunction([literal_term(lit) for lit in literals])


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

class _Parser:
    """Recursive-descent parser over a single term string."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def _skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def _peek(self) -> Optional[str]:
        self._skip()
        if self.pos < len(self.text):
            return self.text[self.pos]
        return None

    def parse(self) -> Term:
        term = self._or()
        if self._peek() is not None:
            raise TermSyntaxError(f"unexpected {self.text[self.pos]!r}", self.pos)
        return term

    def _or(self) -> Term:
        operands = [self._and()]
        while self._peek() == "|":
            self.pos += 1
            operands.append(self._and())
        return disjunction(operands)

    def _and(self) -> Term:
        operands = [self._lit()]
        while self._peek() == "&":
            self.pos += 1
            operands.append(self._lit())
        return conjunction(operands)

    def _lit(self) -> Term:
        char = self._peek()
        start = self.pos
        if char is None:
            raise TermSyntaxError("unexpected end of input", self.pos)
        if char == "!":
            self.pos += 1
            return Not(self._lit())
        if char == "(":
            self.pos += 1
            inner = self._or()
            if self._peek() != ")":
                raise TermSyntaxError("expected ')'", self.pos)
            self.pos += 1
            return inner
        if char in "01":
            self.pos += 1
            if self.pos < len(self.text) and self.text[self.pos] in DIGITS:
                raise TermSyntaxError("constants are 0 or 1", start)
            return Const(int(char))
        if char == "x":
            self.pos += 1
            digits_start = self.pos
            while self.pos < len(self.text) and self.text[self.pos] in DIGITS:
                self.pos += 1
            if self.pos == digits_start:
                raise TermSyntaxError("expected digits after 'x'", digits_start)
            return Var(int(self.text[digits_start:self.pos]))
        raise TermSyntaxError(f"unexpected {char!r}", start)


def parse_term(text: str) -> Term:
    """Parse a term string.

    Args:
        text: Term in the grammar documented at module level

    Returns:
        The parse tree

    Raises:
        TermSyntaxError: With the offending character position
    """
    return _Parser(text).parse()


def format_term(term: Term) -> str:
    """Print a term so that parse_term gives back the same tree."""
    if isinstance(term, Const):
        return str(term.value)
    if isinstance(term, Var):
        return f"x{term.index}"
    if isinstance(term, Not):
        inner = format_term(term.operand)
        if isinstance(term.operand, (And, Or)):
            inner = f"({inner})"
        return "!" + inner
    if isinstance(term, And):
        parts = []
        for operand in term.operands:
            text = format_term(operand)
            parts.append(f"({text})" if isinstance(operand, (And, Or)) else text)
        return " & ".join(parts)
    parts = []
    for operand in term.operands:
        text = format_term(operand)
        parts.append(f"({text})" if isinstance(operand, Or) else text)
    return " | ".join(parts)


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def evaluate(term: Term, row: Sequence[int]) -> int:
    """Evaluate a term under the assignment x_i := row[i].

    Raises:
        GeneratorRangeError: If the term mentions an index >= len(row)
    """
    if isinstance(term, Const):
        return term.value
    if isinstance(term, Var):
        if term.index >= len(row):
            raise GeneratorRangeError(term.index, len(row))
        return 1 if row[term.index] else 0
    if isinstance(term, Not):
        return 1 - evaluate(term.operand, row)
    if isinstance(term, And):
        # no short-circuit: every atom is range-checked
        values = [evaluate(operand, row) for operand in term.operands]
        return 1 if all(values) else 0
    values = [evaluate(operand, row) for operand in term.operands]
    return 1 if any(values) else 0


def max_generator(term: Term) -> int:
    """Largest generator index in the term, or -1 for a constant term."""
    if isinstance(term, Const):
        return -1
    if isinstance(term, Var):
        return term.index
    if isinstance(term, Not):
        return max_generator(term.operand)
    return max((max_generator(operand) for operand in term.operands), default=-1)


def check_range(term: Term, size: int):
    """Raise GeneratorRangeError unless every atom is below size."""
    top = max_generator(term)
    if top >= size:
        raise GeneratorRangeError(top, size)


# ---------------------------------------------------------------------------
# Normal forms
# ---------------------------------------------------------------------------

Conjunct = Tuple[Literal, ...]


def _merge(left: Dict[int, bool], right: Dict[int, bool]) -> Optional[Dict[int, bool]]:
    merged = dict(left)
    for index, positive in right.items():
        if merged.get(index, positive) != positive:
            return None
        merged[index] = positive
    return merged


def _dnf(term: Term, negate: bool) -> List[Dict[int, bool]]:
    if isinstance(term, Const):
        return [{}] if bool(term.value) != negate else []
    if isinstance(term, Var):
        return [{term.index: not negate}]
    if isinstance(term, Not):
        return _dnf(term.operand, not negate)
    conjunctive = isinstance(term, And) != negate
    parts = [_dnf(operand, negate) for operand in term.operands]
    if not conjunctive:
        return [clause for part in parts for clause in part]
    result: List[Dict[int, bool]] = []
    for combo in product(*parts):
        merged: Optional[Dict[int, bool]] = {}
        for clause in combo:
            merged = _merge(merged, clause)
            if merged is None:
                break
        if merged is not None:
            result.append(merged)
    return result


def to_dnf(term: Term) -> List[Conjunct]:
    """Disjunctive normal form as a list of elementary conjunctions.

    Each conjunct lists distinct generators in increasing order; contradictory
    conjuncts are dropped and duplicates removed (first occurrence kept). The
    empty list is the constant 0 and a list holding the empty conjunct is 1.
    """
    seen = set()
    conjuncts: List[Conjunct] = []
    for clause in _dnf(term, False):
        conjunct = tuple(sorted(clause.items()))
        if conjunct not in seen:
            seen.add(conjunct)
            conjuncts.append(conjunct)
    return conjuncts


def dnf_term(term: Term) -> Term:
    """The DNF of a term, rebuilt as a term."""
    return disjunction([elementary(conjunct) for conjunct in to_dnf(term)])
