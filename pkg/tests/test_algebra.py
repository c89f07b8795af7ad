import pytest
from hypothesis import given, strategies as st

from lib.algebra import (
    PresentedAlgebra, atoms, closure, equal_holds, in_closure, is_nonzero, leq_counterexample, leq_holds,
    oracle_leq, parse_row, row_bits, subalgebra_check, subalgebra_reason, term_mask,
)
from lib.errors import GeneratorRangeError, SizeBoundError
from lib.terms import Var, parse_term

from tests.test_terms import terms


@st.composite
def algebras(draw, max_size: int = 4, max_rows: int = 8):
    size = draw(st.integers(1, max_size))
    rows = draw(st.lists(st.tuples(*[st.integers(0, 1)] * size), max_size=max_rows))
    return PresentedAlgebra.create(size, rows)


class TestRows:
    def test_parse_and_print(self):
        assert parse_row("101") == (1, 0, 1)
        assert row_bits((1, 0, 1)) == "101"

    @pytest.mark.parametrize("bits", ["", "102", "1 0"])
    def test_bad_bitstrings(self, bits):
        with pytest.raises(ValueError):
            parse_row(bits)


class TestPresentedAlgebra:
    def test_duplicates_are_dropped_in_order(self):
        alg = PresentedAlgebra.create(3, [(1, 1, 0), (0, 1, 1), (1, 0, 0), (1, 1, 0)])
        assert alg.rows == ((1, 1, 0), (0, 1, 1), (1, 0, 0))
        assert alg.dropped == 1

    def test_row_length_mismatch(self):
        with pytest.raises(ValueError):
            PresentedAlgebra.create(2, [(1, 0, 1)])

    def test_labels_must_be_distinct(self):
        with pytest.raises(ValueError):
            PresentedAlgebra.create(2, [], labels=["a", "a"])

    def test_free_algebra_lists_every_row(self):
        assert PresentedAlgebra.free(2).rows == ((0, 0), (0, 1), (1, 0), (1, 1))

    def test_closure_of_a_finite_family_is_itself(self, sample_algebra):
        assert closure(sample_algebra.rows, 3) == frozenset(sample_algebra.rows)
        assert in_closure((1, 0, 0), sample_algebra.rows)
        assert not in_closure((0, 0, 1), sample_algebra.rows)


class TestDecisions:
    def test_nonzero(self, sample_algebra):
        assert is_nonzero(sample_algebra, parse_term("x0 & !x1"))
        assert not is_nonzero(sample_algebra, parse_term("x0 & x2"))

    def test_counterexample_is_first_failing_row(self, sample_algebra):
        assert leq_counterexample(sample_algebra, Var(0), [Var(1)]) == (1, 0, 0)

    def test_join_of_others(self, sample_algebra):
        assert leq_holds(sample_algebra, Var(1), [Var(0), Var(2)])

    def test_zero_is_below_the_empty_join(self, sample_algebra):
        assert leq_holds(sample_algebra, parse_term("x0 & x2"), [])

    def test_equality(self, sample_algebra):
        # every row with x2 = 1 already has x1 = 1
        assert equal_holds(sample_algebra, parse_term("x0 | x1"), parse_term("x0 | x1 | x2"))
        assert not equal_holds(sample_algebra, Var(0), Var(1))

    def test_range_is_checked(self, sample_algebra):
        with pytest.raises(GeneratorRangeError):
            leq_holds(sample_algebra, Var(0), [Var(3)])

    def test_atoms_are_row_minterms(self, sample_algebra):
        minterms = atoms(sample_algebra)
        assert len(minterms) == len(sample_algebra.rows)
        for k, term in enumerate(minterms):
            assert term_mask(sample_algebra, term) == 1 << k

    @given(algebras(), terms(4), st.lists(terms(4), max_size=3))
    def test_oracle_agrees(self, alg, lhs, rhs):
        try:
            expected = leq_holds(alg, lhs, rhs)
        except GeneratorRangeError:
            with pytest.raises(GeneratorRangeError):
                oracle_leq(alg, lhs, rhs)
            return
        assert oracle_leq(alg, lhs, rhs) == expected

    def test_oracle_size_bound(self):
        alg = PresentedAlgebra.create(3, [(1, 1, 1)])
        with pytest.raises(SizeBoundError):
            oracle_leq(alg, Var(0), [], max_generators=2)


class TestSubalgebra:
    def test_embedding(self):
        small = PresentedAlgebra.create(1, [(1,), (0,)], labels=["a"])
        big = PresentedAlgebra.create(2, [(1, 0), (0, 1)], labels=["a", "b"])
        assert subalgebra_check(small, big)

    def test_row_without_extension(self):
        small = PresentedAlgebra.create(1, [(1,), (0,)], labels=["a"])
        big = PresentedAlgebra.create(2, [(1, 0), (1, 1)], labels=["a", "b"])
        assert not subalgebra_check(small, big)
        assert "extends to no row" in subalgebra_reason(small, big)

    def test_restriction_outside_the_family(self):
        small = PresentedAlgebra.create(1, [(1,)], labels=["a"])
        big = PresentedAlgebra.create(2, [(1, 0), (0, 1)], labels=["a", "b"])
        assert "outside cl(F)" in subalgebra_reason(small, big)

    def test_missing_label(self):
        small = PresentedAlgebra.create(1, [(1,)], labels=["c"])
        big = PresentedAlgebra.create(1, [(1,)], labels=["a"])
        with pytest.raises(ValueError):
            subalgebra_check(small, big)
