import pytest
from hypothesis import given, strategies as st

from lib.errors import GeneratorRangeError, TermSyntaxError
from lib.terms import (
    And, Const, Not, ONE, Or, Var, ZERO, check_range, conjunction, disjunction, dnf_term, elementary,
    evaluate, format_term, max_generator, parse_term, to_dnf,
)

GENERATORS = 4


def terms(size: int = GENERATORS):
    leaves = st.one_of(st.builds(Const, st.integers(0, 1)), st.builds(Var, st.integers(0, size - 1)))
    return st.recursive(
        leaves,
        lambda inner: st.one_of(
            st.builds(Not, inner),
            st.builds(And, st.lists(inner, min_size=2, max_size=3).map(tuple)),
            st.builds(Or, st.lists(inner, min_size=2, max_size=3).map(tuple)),
        ),
        max_leaves=8,
    )


rows = st.lists(st.integers(0, 1), min_size=GENERATORS, max_size=GENERATORS).map(tuple)


class TestParse:
    def test_precedence(self):
        assert parse_term("x0 | x1 & x2") == Or((Var(0), And((Var(1), Var(2)))))

    def test_negation_and_parentheses(self):
        assert parse_term("!(x0 | x1) & x2") == And((Not(Or((Var(0), Var(1)))), Var(2)))

    def test_whitespace_is_insignificant(self):
        assert parse_term(" x0&!x1 ") == parse_term("x0 & ! x1")

    def test_constants(self):
        assert parse_term("0") == ZERO
        assert parse_term("!1") == Not(ONE)

    @pytest.mark.parametrize("text,position", [
        ("x0 &", 4),
        ("x", 1),
        ("2", 0),
        ("10", 0),
        ("(x0", 3),
        ("x0 x1", 3),
    ])
    def test_syntax_errors_carry_position(self, text, position):
        with pytest.raises(TermSyntaxError) as info:
            parse_term(text)
        assert info.value.position == position

    def test_syntax_error_is_value_error(self):
        with pytest.raises(ValueError):
            parse_term("")


class TestFormat:
    def test_nested_operators_are_parenthesized(self):
        assert format_term(And((Or((Var(0), Var(1))), Var(2)))) == "(x0 | x1) & x2"
        assert format_term(Not(And((Var(0), Var(1))))) == "!(x0 & x1)"

    @given(terms())
    def test_printed_term_parses_back(self, term):
        assert parse_term(format_term(term)) == term


class TestEvaluate:
    def test_literal_conjunction(self):
        term = parse_term("x0 & !x1")
        assert evaluate(term, (1, 0)) == 1
        assert evaluate(term, (1, 1)) == 0

    def test_out_of_range_generator(self):
        with pytest.raises(GeneratorRangeError) as info:
            evaluate(Var(3), (1, 0))
        assert info.value.index == 3
        assert info.value.size == 2

    def test_every_atom_is_range_checked(self):
        # the first operand is already 0, the second is still out of range
        with pytest.raises(GeneratorRangeError):
            evaluate(And((Var(0), Var(5))), (0,))

    def test_max_generator_and_range(self):
        assert max_generator(ONE) == -1
        assert max_generator(parse_term("x2 | !x7")) == 7
        check_range(parse_term("x1"), 2)
        with pytest.raises(GeneratorRangeError):
            check_range(parse_term("x2"), 2)


class TestNormalForms:
    def test_builders_unwrap(self):
        assert conjunction([]) == ONE
        assert disjunction([]) == ZERO
        assert conjunction([Var(0)]) == Var(0)
        assert elementary([(0, True), (2, False)]) == And((Var(0), Not(Var(2))))

    def test_contradictions_are_dropped(self):
        assert to_dnf(parse_term("x0 & !x0")) == []
        assert to_dnf(parse_term("x0 | !x0")) == [((0, True),), ((0, False),)]

    def test_constant_one(self):
        assert to_dnf(ONE) == [()]
        assert dnf_term(ONE) == ONE

    @given(terms(), rows)
    def test_dnf_agrees_with_term(self, term, row):
        assert evaluate(dnf_term(term), row) == evaluate(term, row)

    @given(terms())
    def test_conjuncts_use_distinct_sorted_generators(self, term):
        for conjunct in to_dnf(term):
            indices = [index for index, _ in conjunct]
            assert indices == sorted(set(indices))
