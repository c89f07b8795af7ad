"""Boolean algebras presented by families of 0/1 homomorphism rows.

A PresentedAlgebra is the pair (w, F): an ordered finite set of generators
and a finite set F of rows f: w -> {0,1}. The algebra is generated freely
by w subject to the rule that a term is nonzero exactly when some row in
F evaluates it to 1, so every decision below is a scan over F.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from lib.errors import SizeBoundError
from lib.terms import And, Const, Not, Term, Var, check_range, elementary, evaluate

logger = logging.getLogger(__name__)

HomRow = Tuple[int, ...]

# Largest generator count accepted by the set-based oracle
ORACLE_MAX_GENERATORS = 16


def parse_row(bits: str) -> HomRow:
    """Decode a bitstring such as "101" into a row."""
    if not bits or any(ch not in "01" for ch in bits):
        raise ValueError(f"not a bitstring: {bits!r}")
    return tuple(int(ch) for ch in bits)


def row_bits(row: Sequence[int]) -> str:
    return "".join("1" if bit else "0" for bit in row)


@dataclass(frozen=True)
class PresentedAlgebra:
    """The algebra B_(w,F).

    Attributes:
        labels: Names of the generators, in the order of w
        rows: The deduplicated rows of F, first occurrences kept in order
        dropped: How many duplicate rows were removed on construction
    """

    labels: Tuple[str, ...]
    rows: Tuple[HomRow, ...]
    dropped: int = field(default=0, compare=False)

    @classmethod
    def create(
        cls,
        size: int,
        rows: Iterable[Sequence[int]],
        labels: Optional[Sequence[str]] = None,
    ) -> "PresentedAlgebra":
        """Build an algebra over `size` generators, deduplicating rows.

        Raises:
            ValueError: If a row length differs from size or labels clash
        """
        if labels is None:
            labels = [str(index) for index in range(size)]
        if len(labels) != size:
            raise ValueError(f"{len(labels)} label(s) given for {size} generator(s)")
        if len(set(labels)) != size:
            raise ValueError("generator labels must be distinct")

        kept: List[HomRow] = []
        seen = set()
        dropped = 0
        for row in rows:
            row = tuple(1 if bit else 0 for bit in row)
            if len(row) != size:
                raise ValueError(f"row {row_bits(row)} has length {len(row)}, expected {size}")
            if row in seen:
                dropped += 1
                continue
            seen.add(row)
            kept.append(row)

        if dropped:
            logger.info(f"Dropped {dropped} duplicate row(s)")
        return cls(tuple(labels), tuple(kept), dropped)

    @classmethod
    def free(cls, size: int) -> "PresentedAlgebra":
        """The free algebra: F is every row over `size` generators."""
        rows = [tuple((mask >> (size - 1 - k)) & 1 for k in range(size)) for mask in range(2 ** size)]
        return cls.create(size, rows)

    @property
    def size(self) -> int:
        return len(self.labels)

    def index_of(self, label: str) -> int:
        return self.labels.index(label)


def evaluate_hom(row: Sequence[int], term: Term) -> int:
    """Value of a term under the homomorphism extending a row."""
    return evaluate(term, row)


def closure(rows: Iterable[Sequence[int]], size: int) -> FrozenSet[HomRow]:
    """cl(F): rows g whose every finite restriction is matched by some f in F.

    For a finite index set the restriction to all of w is one of the finite
    restrictions, so g qualifies exactly when g itself belongs to F.
    """
    family = {tuple(row) for row in rows}
    result = set()
    for row in family:
        if len(row) != size:
            raise ValueError(f"row {row_bits(row)} has length {len(row)}, expected {size}")
        if in_closure(row, family):
            result.add(row)
    return frozenset(result)


def in_closure(candidate: Sequence[int], rows: Iterable[Sequence[int]]) -> bool:
    """Whether a row lies in cl(F) over a finite index set."""
    target = tuple(candidate)
    full = range(len(target))
    return any(all(row[k] == target[k] for k in full) for row in rows)


def is_nonzero(alg: PresentedAlgebra, term: Term) -> bool:
    check_range(term, alg.size)
    return any(evaluate(term, row) for row in alg.rows)


def leq_counterexample(alg: PresentedAlgebra, lhs: Term, rhs: Sequence[Term]) -> Optional[HomRow]:
    """A row f with f(lhs)=1 and f(t)=0 for all t in rhs, or None.

    None means alg satisfies lhs <= the join of rhs.
    """
    check_range(lhs, alg.size)
    for term in rhs:
        check_range(term, alg.size)
    for row in alg.rows:
        if evaluate(lhs, row) and not any(evaluate(term, row) for term in rhs):
            return row
    return None


def leq_holds(alg: PresentedAlgebra, lhs: Term, rhs: Sequence[Term]) -> bool:
    """Decide lhs <= (rhs_0 | rhs_1 | ...) in the algebra."""
    return leq_counterexample(alg, lhs, rhs) is None


def equal_holds(alg: PresentedAlgebra, a: Term, b: Term) -> bool:
    return leq_holds(alg, a, [b]) and leq_holds(alg, b, [a])


def atoms(alg: PresentedAlgebra) -> List[Term]:
    """One minterm per class of rows with the same generator pattern.

    Rows are already distinct, so every row is its own class; the minterm of
    a row is the elementary conjunction fixing all generators to its values.
    """
    return [elementary([(k, bool(bit)) for k, bit in enumerate(row)]) for row in alg.rows]


def term_mask(alg: PresentedAlgebra, term: Term) -> int:
    """Bitmask of the rows that evaluate the term to 1 (bit k is row k)."""
    mask = 0
    for k, row in enumerate(alg.rows):
        if evaluate(term, row):
            mask |= 1 << k
    return mask


def _set_of(term: Term, columns: List[int], full: int) -> int:
    if isinstance(term, Const):
        return full if term.value else 0
    if isinstance(term, Var):
        return columns[term.index]
    if isinstance(term, Not):
        return full & ~_set_of(term.operand, columns, full)
    parts = [_set_of(operand, columns, full) for operand in term.operands]
    if isinstance(term, And):
        result = full
        for part in parts:
            result &= part
        return result
    result = 0
    for part in parts:
        result |= part
    return result


def oracle_leq(
    alg: PresentedAlgebra,
    lhs: Term,
    rhs: Sequence[Term],
    max_generators: int = ORACLE_MAX_GENERATORS,
) -> bool:
    """Set-model check of lhs <= join(rhs), independent of leq_holds.

    Each generator is read as the set of rows where its column is 1 and
    terms are computed with set operations on those column sets.

    Raises:
        SizeBoundError: If the algebra has more than max_generators generators
    """
    if alg.size > max_generators:
        raise SizeBoundError("oracle generator count", alg.size, max_generators)
    check_range(lhs, alg.size)
    for term in rhs:
        check_range(term, alg.size)

    full = (1 << len(alg.rows)) - 1
    columns = [0] * alg.size
    for k, row in enumerate(alg.rows):
        for index, bit in enumerate(row):
            if bit:
                columns[index] |= 1 << k

    union = 0
    for term in rhs:
        union |= _set_of(term, columns, full)
    return _set_of(lhs, columns, full) & ~union == 0


def subalgebra_reason(small: PresentedAlgebra, big: PresentedAlgebra) -> Optional[str]:
    """Explain why B_small is not a subalgebra of B_big, or None if it is.

    The generators of small are matched to those of big by label.

    Raises:
        ValueError: If some label of small is missing from big
    """
    missing = [label for label in small.labels if label not in big.labels]
    if missing:
        raise ValueError(f"generator(s) {', '.join(missing)} not among the larger algebra's generators")
    positions = [big.index_of(label) for label in small.labels]
    restrictions: Dict[HomRow, HomRow] = {}
    for row in big.rows:
        restrictions.setdefault(tuple(row[pos] for pos in positions), row)

    for row in small.rows:
        if row not in restrictions:
            return f"row {row_bits(row)} extends to no row of the larger algebra"
    family = set(small.rows)
    for restricted, row in restrictions.items():
        if not in_closure(restricted, family):
            return f"row {row_bits(row)} restricts to {row_bits(restricted)}, outside cl(F)"
    return None


def subalgebra_check(small: PresentedAlgebra, big: PresentedAlgebra) -> bool:
    """Whether every f in F extends into F* and every g in F* restricts into cl(F)."""
    return subalgebra_reason(small, big) is None

