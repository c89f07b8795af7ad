import pytest

from lib.algebra import subalgebra_check
from lib.errors import ConstructionError, PreconditionError, SizeBoundError
from lib.forcing import (
    Condition, ConditionIso, Flavor, GridPoint, SParams, chain_union_algebra, condition_algebra, condition_iso,
    condition_leq, condition_rows, cut_levels, enumerate_conditions, generator_separation, glue, p_leq,
    pair_amalgamate, q_leq, q_pair_amalgamate, shift_above, shift_below, validate_condition,
)
from lib.formats import load_condition

P00, P01, P10, P11 = GridPoint(0, 0), GridPoint(0, 1), GridPoint(1, 0), GridPoint(1, 1)


@pytest.fixture(scope="module")
def universe():
    params = SParams(chi=(1, 2), ucap=3)
    return {flavor: enumerate_conditions(params, flavor) for flavor in Flavor}


def load(data_dir, name):
    return load_condition(data_dir / name)


class TestValidity:
    def test_sample_conditions(self, data_dir):
        for name in ("q_p1.txt", "q_p2.txt", "p_p1.txt", "p_p2.txt"):
            params, c = load(data_dir, name)
            assert validate_condition(params, c).valid

    @pytest.mark.parametrize("flavor,levels,points,rows,clause", [
        (Flavor.Q, (0, 1), (P00, P10), ((1, 0), (1, 1)), "(c)"),
        (Flavor.P, (0, 1), (P00, P10), ((1, 1), (0, 1)), "(c)"),
        (Flavor.Q, (0,), (P00, P10), ((1, 0), (0, 1)), "(b)"),
        (Flavor.Q, (0, 1), (P10,), ((1,),), "(b)"),
        (Flavor.Q, (0,), (P00, P01), ((1, 0), (0, 1)), "grid"),
        (Flavor.Q, (0, 1), (P00,), ((0,),), "(b)"),
    ])
    def test_violations(self, tiny_params, flavor, levels, points, rows, clause):
        verdict = validate_condition(tiny_params, Condition(flavor, levels, points, rows))
        assert not verdict.valid
        assert verdict.clause == clause

    def test_violation_names_the_function(self, tiny_params):
        verdict = validate_condition(tiny_params, Condition(Flavor.Q, (0, 1), (P00, P10), ((1, 0), (1, 1))))
        assert (verdict.clause, verdict.point, verdict.row) == ("(c)", P10, (1, 1))

    def test_cap(self):
        c = Condition(Flavor.Q, (1,), (P10, P11), ((1, 0), (0, 1)))
        verdict = validate_condition(SParams((1, 2), ucap=1), c)
        assert verdict.clause == "(a)"

    def test_points_must_be_sorted(self):
        with pytest.raises(ValueError):
            Condition(Flavor.Q, (0, 1), (P10, P00), ((1, 0), (0, 1)))


class TestShifts:
    f = {P00: 1, P01: 1, P10: 1}

    def test_shift_below(self):
        assert shift_below(self.f, 0, 1) == {P00: 0, P01: 1, P10: 1}

    def test_shift_above(self):
        assert shift_above(self.f, 0, 1) == {P00: 1, P01: 0, P10: 1}

    def test_cut(self):
        assert cut_levels(self.f, 1) == {P00: 1, P01: 1, P10: 0}

    def test_glue_conflict(self):
        with pytest.raises(ConstructionError) as info:
            glue(P00, [{P00: 1}, {P00: 0}])
        assert info.value.point == P00


class TestOrder:
    def test_q_certificate(self, data_dir):
        params, p = load(data_dir, "q_p1.txt")
        _, q = load(data_dir, "q_p2.txt")
        verdict = q_leq(params, p, q)
        assert verdict.holds
        assert verdict.certificate(P00).case == "shift"
        assert verdict.certificate(P00).parameter == 0
        assert verdict.certificate(P10).case == "zero"

    def test_p_certificate(self, data_dir):
        params, p = load(data_dir, "p_p1.txt")
        _, q = load(data_dir, "p_p2.txt")
        verdict = p_leq(params, p, q)
        assert verdict.holds
        cert = verdict.certificate(P10)
        assert (cert.case, cert.source, cert.parameter) == ("shift-other", P00, 1)

    def test_missing_level(self, data_dir):
        params, p = load(data_dir, "q_p1.txt")
        _, q = load(data_dir, "q_p2.txt")
        verdict = condition_leq(params, q, p)
        assert not verdict.holds
        assert verdict.clause == "(alpha)"

    def test_changed_function(self, tiny_params):
        p = Condition(Flavor.Q, (0, 1), (P00, P10), ((1, 1), (0, 1)))
        q = Condition(Flavor.Q, (0, 1), (P00, P10), ((1, 0), (0, 1)))
        verdict = condition_leq(tiny_params, p, q)
        assert (verdict.clause, verdict.point, verdict.row) == ("(beta)", P00, (1, 0))

    def test_new_row_must_be_a_shift(self, tiny_params):
        # f_(1,1) is 1 at (1,0), and f_(1,0) has no shift that keeps it and drops (0,0)
        p = Condition(Flavor.P, (0, 1), (P00, P10), ((1, 0), (1, 1)))
        q = Condition(Flavor.P, (0, 1), (P00, P10, P11), ((1, 0, 0), (1, 1, 0), (0, 1, 1)))
        verdict = condition_leq(tiny_params, p, q)
        assert (verdict.clause, verdict.point, verdict.row) == ("(gamma)", P11, (0, 1))

    def test_flavors_must_match(self, data_dir):
        params, p = load(data_dir, "q_p1.txt")
        _, q = load(data_dir, "p_p1.txt")
        with pytest.raises(ValueError):
            condition_leq(params, p, q)

    def test_invalid_input(self, tiny_params):
        bad = Condition(Flavor.Q, (0, 1), (P00, P10), ((1, 0), (1, 1)))
        with pytest.raises(PreconditionError):
            condition_leq(tiny_params, bad, bad)

    def test_poset_axioms(self, tiny_params, universe):
        for flavor, conditions in universe.items():
            leq = {(a, b): condition_leq(tiny_params, a, b).holds for a in conditions for b in conditions}
            for a in conditions:
                assert leq[a, a], f"{flavor.value}: not reflexive at {a}"
            for a in conditions:
                for b in conditions:
                    if not leq[a, b]:
                        continue
                    for c in conditions:
                        if leq[b, c]:
                            assert leq[a, c]


class TestIsomorphism:
    def test_sizes_differ(self, data_dir):
        _, p = load(data_dir, "q_p1.txt")
        _, q = load(data_dir, "q_p2.txt")
        assert condition_iso(p, q).clause == "order"

    def test_level_shift(self, data_dir):
        _, p = load(data_dir, "q_left.txt")
        _, q = load(data_dir, "q_right.txt")
        verdict = condition_iso(p, q)
        assert verdict.holds
        assert verdict.iso.forward(P00) == P10
        assert verdict.iso.inverse().forward(P10) == P00
        assert verdict.iso.then(verdict.iso.inverse()).fixes([P00])
        assert verdict.iso.transport([(P00, False)]) == ((P10, False),)

    def test_column_zero_is_kept(self):
        p = Condition(Flavor.Q, (1,), (P10, P11), ((1, 0), (0, 1)))
        q = Condition(Flavor.Q, (0, 1), (P00, P10), ((1, 0), (0, 1)))
        assert condition_iso(p, q).clause == "(alpha)"


class TestAmalgamation:
    @pytest.mark.parametrize("flavor", ["q", "p"])
    def test_disjoint_levels(self, data_dir, fixtures_dir, flavor):
        params, p = load(data_dir, f"{flavor}_left.txt")
        _, q = load(data_dir, f"{flavor}_right.txt")
        r = pair_amalgamate(params, p, q)
        _, expected = load_condition(fixtures_dir / f"amalgam_{flavor}.txt")
        assert r == expected
        assert condition_leq(params, p, r).holds and condition_leq(params, q, r).holds

    def test_p_pieces_are_cut_at_their_level(self, data_dir):
        params, p = load(data_dir, "p_left.txt")
        _, q = load(data_dir, "p_right.txt")
        r = pair_amalgamate(params, p, q)
        assert r.function(P00) == {P00: 1, P10: 0}
        assert r.function(P10) == {P00: 1, P10: 1}

    def test_level_order(self, data_dir):
        params, p = load(data_dir, "q_left.txt")
        _, q = load(data_dir, "q_right.txt")
        with pytest.raises(PreconditionError) as info:
            q_pair_amalgamate(params, q, p)
        assert info.value.clause == "levels"

    def test_cap(self, data_dir):
        _, p = load(data_dir, "q_left.txt")
        _, q = load(data_dir, "q_right.txt")
        with pytest.raises(PreconditionError) as info:
            pair_amalgamate(SParams((1, 1), ucap=1), p, q)
        assert info.value.clause == "cap"

    def test_not_isomorphic(self, data_dir):
        params, p = load(data_dir, "q_p1.txt")
        _, q = load(data_dir, "q_p2.txt")
        with pytest.raises(PreconditionError) as info:
            pair_amalgamate(params, p, q)
        assert info.value.clause == "iso"

    def test_universe(self, tiny_params, universe):
        amalgams = 0
        for conditions in universe.values():
            for p in conditions:
                for q in conditions:
                    try:
                        r = pair_amalgamate(tiny_params, p, q)
                    except PreconditionError:
                        continue
                    amalgams += 1
                    assert condition_leq(tiny_params, p, r).holds
                    assert condition_leq(tiny_params, q, r).holds
        assert amalgams > 0


class TestConditionAlgebras:
    def test_rows(self, data_dir):
        params, c = load(data_dir, "q_p1.txt")
        assert len(condition_rows(params, c)) == 3
        alg = condition_algebra(params, c)
        assert alg.labels == ("(0,0)",)
        assert alg.rows == ((0,), (1,))

    def test_monotone(self, tiny_params, universe):
        for conditions in universe.values():
            for p in conditions:
                for q in conditions:
                    if condition_leq(tiny_params, p, q).holds:
                        assert subalgebra_check(condition_algebra(tiny_params, p), condition_algebra(tiny_params, q))

    @pytest.mark.parametrize("flavor", list(Flavor))
    def test_empty_condition_has_the_zero_row(self, tiny_params, flavor):
        empty = Condition(flavor, (), (), ())
        assert validate_condition(tiny_params, empty).valid
        assert condition_algebra(tiny_params, empty).rows == ((),)

    def test_empty_p_condition_embeds(self, data_dir):
        params, p = load(data_dir, "p_p1.txt")
        empty = Condition(Flavor.P, (), (), ())
        assert condition_leq(params, empty, p).holds
        assert subalgebra_check(condition_algebra(params, empty), condition_algebra(params, p))

    def test_generator_separation(self, tiny_params, universe):
        for conditions in universe.values():
            for c in conditions:
                assert generator_separation(tiny_params, c).ok

    def test_chain(self, data_dir):
        params, p = load(data_dir, "q_p1.txt")
        _, q = load(data_dir, "q_p2.txt")
        alg = chain_union_algebra(params, [p, q])
        assert alg.labels == ("(0,0)", "(1,0)")
        with pytest.raises(PreconditionError) as info:
            chain_union_algebra(params, [q, p])
        assert info.value.clause == "chain"
        with pytest.raises(ValueError):
            chain_union_algebra(params, [])


class TestEnumeration:
    @pytest.mark.parametrize("flavor", list(Flavor))
    def test_counts(self, flavor):
        conditions = enumerate_conditions(SParams((2,), ucap=3), flavor)
        assert [len(c.points) for c in conditions] == [0, 1, 2, 2]

    def test_universe_size(self, universe):
        assert len(universe[Flavor.Q]) == 15
        assert len(universe[Flavor.P]) == 15

    def test_bound(self):
        with pytest.raises(SizeBoundError):
            enumerate_conditions(SParams((2,), ucap=3), Flavor.Q, max_enum=2)
