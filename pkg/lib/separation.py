"""Ideal-independent, left-separated and right-separated sequences.

A sequence a_0..a_{n-1} in a presented algebra is
  - ideal-independent when no a_k lies below the join of all the others,
  - left-separated when no a_k lies below the join of the later elements,
  - right-separated when no a_k lies below the join of the earlier ones.
For finite sequences the full join covers every finite subfamily, so one
leq_holds call per element decides each property.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations, product
from typing import Dict, List, Optional, Sequence, Tuple

from lib.algebra import (
    HomRow, PresentedAlgebra, atoms, leq_holds, term_mask,
)
from lib.terms import Term, check_range, elementary, evaluate

logger = logging.getLogger(__name__)

DEFAULT_BUDGET = 200000


class SeparationKind(Enum):
    IDEAL_INDEPENDENT = "ideal"
    LEFT_SEPARATED = "left"
    RIGHT_SEPARATED = "right"


def _others(kind: SeparationKind, length: int, index: int) -> List[int]:
    if kind is SeparationKind.LEFT_SEPARATED:
        return list(range(index + 1, length))
    if kind is SeparationKind.RIGHT_SEPARATED:
        return list(range(index))
    return [k for k in range(length) if k != index]


@dataclass(frozen=True)
class SequenceWitness:
    """A sequence with one separating row per element.

    When refused_at is set the sequence is not separated and refused_at is
    the first position without a witness row.
    """

    kind: SeparationKind
    elements: Tuple[Term, ...]
    rows: Tuple[Optional[HomRow], ...]
    refused_at: Optional[int] = None

    @property
    def ok(self) -> bool:
        return self.refused_at is None


def is_separated(alg: PresentedAlgebra, seq: Sequence[Term], kind: SeparationKind) -> bool:
    for term in seq:
        check_range(term, alg.size)
    for index, term in enumerate(seq):
        rest = [seq[k] for k in _others(kind, len(seq), index)]
        if leq_holds(alg, term, rest):
            return False
    return True


def witness_homomorphisms(
    alg: PresentedAlgebra,
    seq: Sequence[Term],
    kind: SeparationKind,
) -> SequenceWitness:
    """Find, for every element, a row that is 1 on it and 0 on the elements
    the kind compares it with.

    Returns:
        A SequenceWitness; on failure it is marked with the first position
        that has no witness row
    """
    for term in seq:
        check_range(term, alg.size)
    found: List[Optional[HomRow]] = []
    for index, term in enumerate(seq):
        rest = [seq[k] for k in _others(kind, len(seq), index)]
        witness = None
        for row in alg.rows:
            if evaluate(term, row) and not any(evaluate(other, row) for other in rest):
                witness = row
                break
        if witness is None:
            padding = [None] * (len(seq) - index)
            return SequenceWitness(kind, tuple(seq), tuple(found + padding), refused_at=index)
        found.append(witness)
    return SequenceWitness(kind, tuple(seq), tuple(found))


def separation_profile(alg: PresentedAlgebra, seq: Sequence[Term]) -> Dict[SeparationKind, bool]:
    return {kind: is_separated(alg, seq, kind) for kind in SeparationKind}


def ideal_membership(alg: PresentedAlgebra, a: Term, ys: Sequence[Term]) -> bool:
    """Whether a lies in the ideal generated by the finite family ys."""
    return leq_holds(alg, a, ys)


def elementary_candidates(alg: PresentedAlgebra, max_arity: int) -> List[Term]:
    """Nonzero elementary conjunctions of arity 1..max_arity, one per element.

    Candidates are produced by arity, then generator tuple, then sign pattern
    (positive before negated); a candidate equal in the algebra to an earlier
    one is skipped.

    Raises:
        ValueError: If max_arity exceeds the number of generators
    """
    if max_arity > alg.size:
        raise ValueError(f"arity {max_arity} exceeds the {alg.size} generator(s)")
    seen = set()
    pool: List[Term] = []
    for arity in range(1, max_arity + 1):
        for indices in combinations(range(alg.size), arity):
            for signs in product((True, False), repeat=arity):
                term = elementary(list(zip(indices, signs)))
                mask = term_mask(alg, term)
                if mask == 0 or mask in seen:
                    continue
                seen.add(mask)
                pool.append(term)
    logger.debug(f"{len(pool)} elementary candidate(s) up to arity {max_arity}")
    return pool


@dataclass
class SearchResult:
    """Outcome of max_separated_length.

    Attributes:
        exact: True when the length is certified maximal
        upper_bound: Bound used for early certification (the row count)
        expansions: Search nodes visited
    """

    kind: SeparationKind
    length: int
    witness: SequenceWitness
    exact: bool
    upper_bound: int
    expansions: int = 0
    pool_size: int = 0


class _SubsetSearch:
    """Depth-first search over subsets of the pool, in pool order.

    The three families of admissible sets are closed under taking subsets,
    so every admissible set is reached through admissible prefixes.
    """

    def __init__(self, masks: List[int], kind: SeparationKind, budget: int):
        self.masks = masks
        self.kind = kind
        self.budget = budget
        self.expansions = 0
        self.best: List[int] = []
        self.exhausted = False

    def _join(self, chosen: Sequence[int], skip: int = -1) -> int:
        join = 0
        for index in chosen:
            if index != skip:
                join |= self.masks[index]
        return join

    def admissible(self, chosen: List[int]) -> bool:
        if self.kind is SeparationKind.IDEAL_INDEPENDENT:
            return all(self.masks[i] & ~self._join(chosen, i) for i in chosen)
        return self.peel_order(chosen) is not None

    def peel_order(self, chosen: Sequence[int]) -> Optional[List[int]]:
        """Order a set so each element escapes the join of the ones after it.

        Any element escaping the join of the rest can go first, because
        admissibility passes to subsets; the greedy peel therefore decides
        whether some left-separated ordering exists.
        """
        remaining = list(chosen)
        order: List[int] = []
        while remaining:
            for index in remaining:
                rest = 0
                for other in remaining:
                    if other != index:
                        rest |= self.masks[other]
                if self.masks[index] & ~rest:
                    order.append(index)
                    remaining.remove(index)
                    break
            else:
                return None
        return order

    def run(self, upper_bound: int):
        self._extend([], 0, upper_bound)

    def _extend(self, chosen: List[int], start: int, upper_bound: int):
        if len(self.best) >= upper_bound:
            return
        if len(chosen) > len(self.best):
            self.best = list(chosen)
        join = self._join(chosen)
        for index in range(start, len(self.masks)):
            if len(chosen) + (len(self.masks) - index) <= len(self.best):
                return
            if self.expansions >= self.budget:
                self.exhausted = True
                return
            if self.kind is SeparationKind.IDEAL_INDEPENDENT and not self.masks[index] & ~join:
                continue
            self.expansions += 1
            chosen.append(index)
            if self.admissible(chosen):
                self._extend(chosen, index + 1, upper_bound)
            chosen.pop()
            if self.exhausted or len(self.best) >= upper_bound:
                return


def _greedy_seed(search: _SubsetSearch) -> List[int]:
    # smallest elements first; atoms of the algebra come out first
    order = sorted(range(len(search.masks)), key=lambda k: (bin(search.masks[k]).count("1"), k))
    chosen: List[int] = []
    for index in order:
        chosen.append(index)
        if not search.admissible(chosen):
            chosen.pop()
    return sorted(chosen)


def max_separated_length(
    alg: PresentedAlgebra,
    kind: SeparationKind,
    pool: Sequence[Term],
    budget: int = DEFAULT_BUDGET,
) -> SearchResult:
    """Longest separated sequence of the given kind drawn from the pool.

    Every separated sequence needs pairwise distinct witness rows, so the
    row count bounds the length; reaching it, or finishing the search within
    the budget, certifies the result as exact.

    Raises:
        ValueError: If the pool is empty
    """
    if not pool:
        raise ValueError("candidate pool is empty")
    masks = [term_mask(alg, term) for term in pool]
    upper_bound = len(alg.rows)

    search = _SubsetSearch(masks, kind, budget)
    search.best = _greedy_seed(search)
    search.run(upper_bound)

    chosen = search.best
    if kind is SeparationKind.IDEAL_INDEPENDENT:
        ordered = list(chosen)
    else:
        ordered = search.peel_order(chosen) or []
        if kind is SeparationKind.RIGHT_SEPARATED:
            ordered.reverse()

    elements = [pool[k] for k in ordered]
    witness = witness_homomorphisms(alg, elements, kind)
    exact = len(chosen) >= upper_bound or not search.exhausted
    if not exact:
        logger.warning(f"{kind.value} search stopped after {search.expansions} expansions; length {len(chosen)} is a lower bound")
    else:
        logger.info(f"{kind.value} search: length {len(chosen)} (exact, {search.expansions} expansions)")
    return SearchResult(
        kind=kind,
        length=len(elements),
        witness=witness,
        exact=exact,
        upper_bound=upper_bound,
        expansions=search.expansions,
        pool_size=len(pool),
    )


@dataclass
class InvariantReport:
    """Desk-scale spread, hd and hL values of one algebra."""

    atom_count: int
    pool_size: int
    results: Dict[SeparationKind, SearchResult] = field(default_factory=dict)

    @property
    def spread(self) -> int:
        return self.results[SeparationKind.IDEAL_INDEPENDENT].length

    @property
    def left(self) -> int:
        return self.results[SeparationKind.LEFT_SEPARATED].length

    @property
    def right(self) -> int:
        return self.results[SeparationKind.RIGHT_SEPARATED].length

    @property
    def exact(self) -> bool:
        return all(result.exact for result in self.results.values())


def invariant_report(
    alg: PresentedAlgebra,
    max_arity: int,
    budget: int = DEFAULT_BUDGET,
    max_workers: int = 3,
) -> InvariantReport:
    """Run the three searches over the elementary candidates of the algebra.

    The searches are independent and deterministic, so they run in parallel
    worker threads and are collected by kind.
    """
    pool = elementary_candidates(alg, max_arity)
    report = InvariantReport(atom_count=len(atoms(alg)), pool_size=len(pool))
    if not pool:
        logger.warning("No nonzero candidates; every separated sequence is empty")
        for kind in SeparationKind:
            empty = SequenceWitness(kind, (), ())
            report.results[kind] = SearchResult(kind, 0, empty, True, len(alg.rows))
        return report

    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        futures = {
            kind: executor.submit(max_separated_length, alg, kind, pool, budget)
            for kind in SeparationKind
        }
        for kind, future in futures.items():
            report.results[kind] = future.result()
    return report

