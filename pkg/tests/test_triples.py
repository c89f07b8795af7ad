import random
from dataclasses import replace

import pytest

from lib.errors import PreconditionError, SizeBoundError
from lib.forcing import Flavor, GridPoint, SParams, condition_leq, validate_condition
from lib.formats import load_condition, load_tau
from lib.triples import (
    DEFAULT_TRIPLE_PARAMS, TripleSetup, build_p_triple_instance, build_q_triple_instance, build_triple_instance,
    case_counts, p_triple_amalgamate, q_triple_amalgamate, triple_amalgamate, validate_p_triple_setup,
    validate_q_triple_setup,
)

SEEDS = range(25)


@pytest.fixture
def shipped_setup(data_dir):
    directory = data_dir / "triple_q"
    conditions = {}
    params = None
    for name in ("q", "q0", "q1", "q2"):
        params, conditions[name] = load_condition(directory / f"{name}.txt")
    tau = load_tau(directory / "tau.txt")
    return params, TripleSetup(tau0=tau["tau0"], tau1=tau["tau1"], tau2=tau["tau2"], **conditions)


class TestShippedSetup:
    def test_cases(self, shipped_setup):
        params, setup = shipped_setup
        result = q_triple_amalgamate(params, setup)
        assert result.holds
        assert result.cases == {GridPoint(0, 0): "2", GridPoint(1, 0): "3d", GridPoint(2, 0): "5"}
        assert result.condition.rows == ((1, 0, 0), (0, 1, 1), (0, 0, 1))

    def test_wrong_flavor(self, shipped_setup):
        params, setup = shipped_setup
        with pytest.raises(ValueError):
            p_triple_amalgamate(params, setup)

    def test_terms_must_be_copies(self, shipped_setup):
        params, setup = shipped_setup
        with pytest.raises(PreconditionError) as info:
            validate_q_triple_setup(params, replace(setup, tau2=setup.tau1))
        assert info.value.clause == "terms"

    def test_heart_must_be_shared(self, shipped_setup):
        params, setup = shipped_setup
        # with q1 = q0 the heart is all of u^q0, which q2 does not contain
        tampered = replace(setup, q1=setup.q0, tau1=setup.tau0)
        with pytest.raises(PreconditionError) as info:
            validate_q_triple_setup(params, tampered)
        assert info.value.clause == "heart"

    def test_cap(self, shipped_setup):
        params, setup = shipped_setup
        with pytest.raises(PreconditionError) as info:
            validate_q_triple_setup(SParams(params.chi, ucap=2), setup)
        assert info.value.clause == "cap"


class TestGeneratedInstances:
    @pytest.mark.parametrize("flavor", list(Flavor))
    def test_postcondition(self, flavor):
        results = []
        for seed in SEEDS:
            setup = build_triple_instance(random.Random(seed), flavor)
            result = triple_amalgamate(DEFAULT_TRIPLE_PARAMS, setup)
            assert result.holds, f"seed {seed}: counterexample {result.counterexample}"
            assert set(result.cases) == set(result.condition.points)
            assert validate_condition(DEFAULT_TRIPLE_PARAMS, result.condition).valid
            for c in (setup.q, setup.q1, setup.q2):
                assert condition_leq(DEFAULT_TRIPLE_PARAMS, c, result.condition).holds
            results.append(result)
        counts = case_counts(results)
        assert sum(counts.values()) == sum(len(r.condition.points) for r in results)

    def test_builders_validate(self):
        rng = random.Random(11)
        validate_q_triple_setup(DEFAULT_TRIPLE_PARAMS, build_q_triple_instance(rng))
        validate_p_triple_setup(DEFAULT_TRIPLE_PARAMS, build_p_triple_instance(rng))

    def test_builders_are_reproducible(self):
        first = build_triple_instance(random.Random(5), Flavor.P)
        second = build_triple_instance(random.Random(5), Flavor.P)
        assert first == second

    def test_refusal(self):
        # P instances need at least two levels
        with pytest.raises(SizeBoundError):
            build_triple_instance(random.Random(0), Flavor.P, SParams((3,)), retries=10)
