"""Delta-system (sunflower) extraction and free sets for set-valued maps."""

from collections import Counter
from dataclasses import dataclass
from math import factorial
from typing import Dict, FrozenSet, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple
import logging

logger = logging.getLogger(__name__)

# Families up to this size are searched exhaustively
EXACT_DELTA_LIMIT = 20
EXACT_FREE_SET_LIMIT = 24


@dataclass(frozen=True)
class DeltaSystem:
    """Selected member indices and the common heart of their intersections."""

    indices: Tuple[int, ...]
    heart: FrozenSet
    exact: bool = True


@dataclass(frozen=True)
class SequenceDeltaSystem:
    """Selected sequences and the positions (with values) they all share."""

    indices: Tuple[int, ...]
    heart: Dict[int, Hashable]
    exact: bool = True


@dataclass(frozen=True)
class FreeSet:
    members: Tuple[int, ...]
    exact: bool = True


def sunflower_bound(k: int, lam: int) -> int:
    """k!(lam-1)^k; more distinct k-sets than this contain a lam-sunflower."""
    return factorial(k) * (lam - 1) ** k


def duplicate_members(members: Sequence[Iterable]) -> List[int]:
    """Indices of members equal to an earlier member."""
    seen = set()
    duplicates = []
    for index, member in enumerate(members):
        key = frozenset(member)
        if key in seen:
            duplicates.append(index)
        seen.add(key)
    return duplicates


def verify_delta_system(members: Sequence[Iterable], indices: Sequence[int], heart: Iterable) -> bool:
    heart = frozenset(heart)
    sets = [frozenset(members[k]) for k in indices]
    if len(set(indices)) != len(indices):
        return False
    for a in range(len(sets)):
        for b in range(a + 1, len(sets)):
            if sets[a] & sets[b] != heart:
                return False
    return True


def _extend_exact(sets: List[FrozenSet], target: int) -> Optional[DeltaSystem]:
    count = len(sets)
    for first in range(count):
        for second in range(first + 1, count):
            heart = sets[first] & sets[second]
            pool = [
                k for k in range(second + 1, count)
                if sets[k] & sets[first] == heart and sets[k] & sets[second] == heart
            ]
            chosen = _clique(sets, pool, heart, target - 2)
            if chosen is not None:
                return DeltaSystem(tuple([first, second] + chosen), heart)
    return None


def _clique(sets: List[FrozenSet], pool: List[int], heart: FrozenSet, needed: int) -> Optional[List[int]]:
    """Pick `needed` members of pool whose pairwise intersections equal heart."""
    if needed <= 0:
        return []
    for position, index in enumerate(pool):
        if len(pool) - position < needed:
            return None
        rest = [k for k in pool[position + 1:] if sets[k] & sets[index] == heart]
        tail = _clique(sets, rest, heart, needed - 1)
        if tail is not None:
            return [index] + tail
    return None


def _first_occurrences(sets: List[FrozenSet], group: List[int]) -> List[int]:
    seen = set()
    kept = []
    for k in group:
        if sets[k] not in seen:
            seen.add(sets[k])
            kept.append(k)
    return kept


def _petals(sets: List[FrozenSet], pool: List[int], core: FrozenSet, target: int) -> Optional[List[int]]:
    """Disjoint-petals recursion: succeeds whenever pool holds more than
    sunflower_bound(k, target) distinct k-sets.

    Takes a maximal family of members that are disjoint outside core; if it
    is too small, every member meets its union, so some element of the union
    lies in many members and the search continues below it.
    """
    disjoint: List[int] = []
    used: set = set()
    for k in pool:
        petal = sets[k] - core
        if not petal & used:
            disjoint.append(k)
            used |= petal
    if len(disjoint) >= target:
        return disjoint[:target]
    counts = Counter(x for k in pool for x in sets[k] - core if x in used)
    if not counts:
        return None
    x, count = counts.most_common(1)[0]
    if count < target:
        return None
    return _petals(sets, [k for k in pool if x in sets[k]], core | {x}, target)


def _greedy(sets: List[FrozenSet], target: int) -> Optional[DeltaSystem]:
    # same-size groups first, largest first: petals, then pair-seeded hearts
    groups: Dict[int, List[int]] = {}
    for index, member in enumerate(sets):
        groups.setdefault(len(member), []).append(index)
    ordered = sorted(groups.values(), key=lambda group: (-len(group), group[0]))
    for group in ordered:
        chosen = _petals(sets, _first_occurrences(sets, group), frozenset(), target)
        if chosen is not None:
            heart = sets[chosen[0]] & sets[chosen[1]]
            return DeltaSystem(tuple(sorted(chosen)), heart, exact=False)
    for group in ordered + [list(range(len(sets)))]:
        for first in group:
            for second in group:
                if second <= first:
                    continue
                heart = sets[first] & sets[second]
                chosen = [first, second]
                for k in group:
                    if len(chosen) == target:
                        break
                    if k in chosen:
                        continue
                    if all(sets[k] & sets[other] == heart for other in chosen):
                        chosen.append(k)
                if len(chosen) == target:
                    return DeltaSystem(tuple(sorted(chosen)), heart, exact=False)
    return None


def delta_system_extract(
    members: Sequence[Iterable],
    target: int,
    exact_limit: int = EXACT_DELTA_LIMIT,
) -> Optional[DeltaSystem]:
    """Find `target` members whose pairwise intersections all equal one heart.

    Families of at most exact_limit members are searched exhaustively, so
    None there means no such subfamily exists. Larger families go through the
    disjoint-petals recursion on each same-size group (it cannot miss once a
    group exceeds the sunflower bound), then a greedy pass; such results are
    flagged inexact.

    Raises:
        ValueError: If target < 2
    """
    if target < 2:
        raise ValueError(f"target must be at least 2, got {target}")
    sets = [frozenset(member) for member in members]
    duplicates = duplicate_members(sets)
    if duplicates:
        logger.info(f"Family has {len(duplicates)} duplicate member(s): {duplicates}")
    if target > len(sets):
        logger.info(f"Refused: target {target} exceeds family size {len(sets)}")
        return None

    if len(sets) <= exact_limit:
        result = _extend_exact(sets, target)
    else:
        logger.info(f"Family of {len(sets)} members exceeds the exact limit {exact_limit}; using greedy extraction")
        result = _greedy(sets, target)

    if result is None:
        logger.info(f"No delta-system of size {target} found")
        return None
    if not verify_delta_system(sets, result.indices, result.heart):
        raise AssertionError(f"extracted delta-system {result.indices} does not verify")
    return result


def delta_system_sequences(
    seqs: Sequence[Sequence[Hashable]],
    target: int,
    exact_limit: int = EXACT_DELTA_LIMIT,
) -> Optional[SequenceDeltaSystem]:
    """Delta-system of equal-length sequences.

    Each sequence is read as the set of its (position, value) pairs. The
    selected sequences agree exactly on the heart positions and pairwise
    disagree at every other position.

    Raises:
        ValueError: If the sequences have different lengths or target < 2
    """
    lengths = {len(seq) for seq in seqs}
    if len(lengths) > 1:
        raise ValueError(f"sequences have different lengths: {sorted(lengths)}")
    labelled = [frozenset(enumerate(seq)) for seq in seqs]
    result = delta_system_extract(labelled, target, exact_limit)
    if result is None:
        return None
    return SequenceDeltaSystem(result.indices, dict(sorted(result.heart)), result.exact)


def _check_setmap(setmap: Mapping[int, Iterable[int]]) -> Dict[int, FrozenSet[int]]:
    domain = set(setmap)
    checked = {}
    for y, image in setmap.items():
        image = frozenset(image)
        stray = image - domain
        if stray:
            raise ValueError(f"F({y}) contains {sorted(stray)} outside the domain")
        checked[y] = image
    return checked


def verify_free_set(setmap: Mapping[int, Iterable[int]], chosen: Iterable[int]) -> bool:
    chosen = list(chosen)
    for y in chosen:
        if y not in setmap:
            return False
    for y in chosen:
        image = set(setmap[y])
        if any(other != y and other in image for other in chosen):
            return False
    return len(set(chosen)) == len(chosen)


class _IndependentSetSearch:
    """Branch and bound for an independent set of given size in the conflict graph."""

    def __init__(self, order: List[int], conflicts: Dict[int, set]):
        self.order = order
        self.conflicts = conflicts

    def find(self, target: int) -> Optional[List[int]]:
        return self._extend([], self.order, target)

    def _extend(self, chosen: List[int], candidates: List[int], target: int) -> Optional[List[int]]:
        if len(chosen) == target:
            return list(chosen)
        for position, y in enumerate(candidates):
            if len(chosen) + len(candidates) - position < target:
                return None
            rest = [z for z in candidates[position + 1:] if z not in self.conflicts[y]]
            chosen.append(y)
            found = self._extend(chosen, rest, target)
            chosen.pop()
            if found is not None:
                return found
        return None


def free_set_search(
    setmap: Mapping[int, Iterable[int]],
    target: int,
    exact_limit: int = EXACT_FREE_SET_LIMIT,
) -> Optional[FreeSet]:
    """Find S with |S| = target and y not in F(y') for distinct y, y' in S.

    Exact branch and bound for domains up to exact_limit elements, a
    fewest-conflicts-first greedy pass above that (flagged inexact).

    Raises:
        ValueError: If target exceeds the domain or F(y) leaves the domain
    """
    checked = _check_setmap(setmap)
    domain = sorted(checked)
    if target > len(domain) or target < 0:
        raise ValueError(f"target {target} outside 0..{len(domain)}")

    conflicts: Dict[int, set] = {y: set() for y in domain}
    for y, image in checked.items():
        for other in image:
            if other != y:
                conflicts[y].add(other)
                conflicts[other].add(y)

    if len(domain) <= exact_limit:
        found = _IndependentSetSearch(domain, conflicts).find(target)
        exact = True
    else:
        order = sorted(domain, key=lambda y: (len(conflicts[y]), y))
        found = []
        for y in order:
            if len(found) == target:
                break
            if not conflicts[y] & set(found):
                found.append(y)
        if len(found) < target:
            found = None
        exact = False

    if found is None:
        logger.info(f"No free set of size {target} ({'exact' if exact else 'greedy'} search)")
        return None
    return FreeSet(tuple(sorted(found)), exact)
