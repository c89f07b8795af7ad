from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from lib.combinatorics import (
    delta_system_extract, delta_system_sequences, duplicate_members, free_set_search, sunflower_bound,
    verify_delta_system, verify_free_set,
)
from lib.formats import load_family, load_setmap

small_sets = st.frozensets(st.integers(0, 5), max_size=3)


def brute_delta(members, target) -> bool:
    sets = [frozenset(m) for m in members]
    for chosen in combinations(range(len(sets)), target):
        heart = sets[chosen[0]] & sets[chosen[1]]
        if verify_delta_system(sets, chosen, heart):
            return True
    return False


class TestDeltaSystems:
    def test_sunflower_bound(self):
        assert sunflower_bound(1, 2) == 1
        assert sunflower_bound(2, 3) == 8
        assert sunflower_bound(3, 4) == 162

    def test_sample_family(self, data_dir):
        found = delta_system_extract(load_family(data_dir / "family.txt"), 3)
        assert found.indices == (0, 1, 2)
        assert found.heart == frozenset({1})
        assert found.exact

    def test_no_system_of_size_four(self, data_dir):
        assert delta_system_extract(load_family(data_dir / "family.txt"), 4) is None

    def test_target_larger_than_family(self):
        assert delta_system_extract([{1}, {2}], 3) is None

    def test_target_below_two(self):
        with pytest.raises(ValueError):
            delta_system_extract([{1}, {2}], 1)

    def test_duplicates_are_reported(self):
        assert duplicate_members([{1, 2}, {3}, {2, 1}]) == [2]

    def test_repeated_index_does_not_verify(self):
        assert not verify_delta_system([{1}, {2}], [0, 0], set())

    @given(st.lists(small_sets, min_size=2, max_size=7), st.integers(2, 4))
    def test_exact_search_is_complete(self, members, target):
        found = delta_system_extract(members, target)
        if target > len(members):
            assert found is None
            return
        assert (found is not None) == brute_delta(members, target)
        if found is not None:
            assert verify_delta_system(members, found.indices, found.heart)

    @given(st.integers(1, 2), st.integers(2, 3), st.randoms(use_true_random=False))
    def test_large_families_meet_the_sunflower_bound(self, k, lam, rng):
        pool = [frozenset(c) for c in combinations(range(3 * k + 6), k)]
        members = rng.sample(pool, sunflower_bound(k, lam) + 1)
        found = delta_system_extract(members, lam, exact_limit=0)
        assert found is not None
        assert not found.exact
        assert verify_delta_system(members, found.indices, found.heart)

    def test_sequences(self, data_dir):
        found = delta_system_sequences(load_family(data_dir / "sequences.txt"), 3)
        assert found.indices == (0, 1, 2)
        assert found.heart == {0: 0}

    def test_sequences_of_different_lengths(self):
        with pytest.raises(ValueError):
            delta_system_sequences([[0, 1], [0]], 2)


class TestFreeSets:
    def test_sample_setmap(self, data_dir):
        setmap = load_setmap(data_dir / "setmap.txt")
        found = free_set_search(setmap, 2)
        assert found.members == (0, 3)
        assert found.exact
        assert free_set_search(setmap, 3) is None

    def test_target_outside_domain(self):
        with pytest.raises(ValueError):
            free_set_search({0: []}, 2)

    def test_image_outside_domain(self):
        with pytest.raises(ValueError):
            free_set_search({0: [5]}, 1)

    def test_verify(self):
        setmap = {0: [1], 1: [], 2: []}
        assert verify_free_set(setmap, [1, 2])
        assert not verify_free_set(setmap, [0, 1])
        assert not verify_free_set(setmap, [1, 1])
        assert not verify_free_set(setmap, [7])

    @given(st.data())
    def test_search_matches_enumeration(self, data):
        size = data.draw(st.integers(1, 7))
        setmap = {
            y: data.draw(st.lists(st.integers(0, size - 1), max_size=3, unique=True))
            for y in range(size)
        }
        target = data.draw(st.integers(0, size))
        brute = any(verify_free_set(setmap, chosen) for chosen in combinations(range(size), target))
        found = free_set_search(setmap, target)
        assert (found is not None) == brute
        if found is not None:
            assert len(found.members) == target
            assert verify_free_set(setmap, found.members)

    def test_greedy_pass_above_the_exact_limit(self):
        setmap = {y: [] for y in range(5)}
        found = free_set_search(setmap, 5, exact_limit=2)
        assert found.members == (0, 1, 2, 3, 4)
        assert not found.exact
