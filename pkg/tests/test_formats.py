import pytest

from lib.errors import FormatError
from lib.forcing import Flavor, GridPoint
from lib.formats import (
    format_algebra, format_base, format_condition, format_family, format_setmap, format_strings, format_tau,
    load_algebra, load_base, load_condition, load_family, load_setmap, load_strings, load_tau, parse_algebra,
    parse_base, parse_condition, parse_family, parse_setmap, parse_tau, read_text,
)

CONDITION_FILES = [
    "q_p1.txt", "q_p2.txt", "p_p1.txt", "p_p2.txt", "q_left.txt", "q_right.txt", "p_left.txt", "p_right.txt",
]


class TestAlgebraFiles:
    def test_duplicate_rows_are_dropped(self, data_dir):
        alg = load_algebra(data_dir / "algebra.txt")
        assert alg.size == 3
        assert alg.rows == ((1, 1, 0), (0, 1, 1), (1, 0, 0))
        assert alg.dropped == 1

    def test_canonical_form(self, data_dir):
        assert format_algebra(load_algebra(data_dir / "algebra.txt")) == "algebra v1\nw 3\nf 110\nf 011\nf 100\n"
        free = (data_dir / "free2.txt").read_text()
        assert format_algebra(parse_algebra(free)) == free

    def test_unknown_version(self):
        with pytest.raises(FormatError) as info:
            parse_algebra("algebra v2\nw 1\n")
        assert info.value.line == 1

    def test_row_length_reports_line_and_column(self):
        with pytest.raises(FormatError) as info:
            parse_algebra("algebra v1\n# comment\nw 2\nf 101\n")
        assert info.value.line == 4
        assert info.value.column == 3

    def test_missing_w(self):
        with pytest.raises(FormatError):
            parse_algebra("algebra v1\n")

    def test_empty_file(self):
        with pytest.raises(FormatError):
            parse_algebra("  # nothing here\n")


class TestBaseFiles:
    def test_round_trip(self, data_dir):
        text = (data_dir / "base.txt").read_text()
        assert format_base(parse_base(text)) == text

    def test_missing_eta(self):
        text = "base v1\ndepth 2\nalphabet 2\nchi 0 2\neta 0 01\n"
        with pytest.raises(FormatError):
            parse_base(text)

    def test_invalid_base(self):
        text = "base v1\ndepth 2\nalphabet 2\nchi 0 2\neta 0 01\neta 1 01\n"
        with pytest.raises(FormatError):
            parse_base(text)

    def test_strings(self, data_dir):
        assert load_strings(data_dir / "rho.txt") == ["00", "01", "10", "11"]
        assert format_strings(["", "0"]) == "-\n0\n"


class TestConditionFiles:
    @pytest.mark.parametrize("name", CONDITION_FILES)
    def test_round_trip(self, data_dir, name):
        text = (data_dir / name).read_text()
        params, c = parse_condition(text)
        assert format_condition(params, c) == text

    def test_default_cap_is_omitted(self, data_dir):
        params, c = load_condition(data_dir / "triple_q" / "q.txt")
        assert params.ucap == 64
        assert "ucap" not in format_condition(params, c)

    def test_flavor_from_header(self, data_dir):
        assert load_condition(data_dir / "p_p2.txt")[1].flavor is Flavor.P

    def test_u_out_of_order(self):
        text = "qcond v1\nchi 1 2\nw 0 1\nu (1,0) (0,0)\nf (0,0): 10\nf (1,0): 01\n"
        with pytest.raises(FormatError) as info:
            parse_condition(text)
        assert info.value.line == 4

    def test_identical_duplicate_f_line(self):
        text = "qcond v1\nchi 1\nw 0\nu (0,0)\nf (0,0): 1\nf (0,0): 1\n"
        _, c = parse_condition(text)
        assert c.rows == ((1,),)

    def test_conflicting_f_lines(self):
        text = "qcond v1\nchi 1\nw 0\nu (0,0)\nf (0,0): 1\nf (0,0): 0\n"
        with pytest.raises(FormatError) as info:
            parse_condition(text)
        assert info.value.line == 6

    def test_missing_f_line(self):
        with pytest.raises(FormatError):
            parse_condition("pcond v1\nchi 1\nw 0\nu (0,0)\n")

    def test_bad_point(self):
        with pytest.raises(FormatError) as info:
            parse_condition("qcond v1\nchi 1\nw 0\nu (0,0) (x,1)\n")
        assert info.value.line == 4
        assert info.value.column == 9

    def test_empty_condition(self):
        params, c = parse_condition("qcond v1\nchi 1\nw\nu\n")
        assert c.points == ()
        assert format_condition(params, c) == "qcond v1\nchi 1\nw\nu\n"


class TestTauFiles:
    def test_shipped(self, data_dir):
        tau = load_tau(data_dir / "triple_q" / "tau.txt")
        assert tau["tau0"] == ((GridPoint(1, 0), True),)
        assert format_tau(tau["tau0"], tau["tau1"], tau["tau2"]) == "tau0 (1,0)\ntau1 (0,0)\ntau2 (2,0)\n"

    def test_negated_literals(self):
        tau = parse_tau("tau0 !(0,1) & (1,0)\ntau1 (0,0)\ntau2 (0,2)\n")
        assert tau["tau0"] == ((GridPoint(0, 1), False), (GridPoint(1, 0), True))

    def test_missing_line(self):
        with pytest.raises(FormatError):
            parse_tau("tau0 (0,0)\ntau1 (0,1)\n")


class TestFamiliesAndSetmaps:
    def test_family(self, data_dir):
        assert load_family(data_dir / "family.txt") == [[1, 2], [1, 3], [1, 4], [2, 3]]

    def test_empty_member(self):
        members = parse_family("-\n3 1\n")
        assert members == [[], [3, 1]]
        assert format_family(members) == "-\n3 1\n"

    def test_bad_element(self):
        with pytest.raises(FormatError) as info:
            parse_family("1 2\n1 a\n")
        assert info.value.line == 2
        assert info.value.column == 3

    def test_setmap(self, data_dir):
        setmap = load_setmap(data_dir / "setmap.txt")
        assert setmap == {0: [1], 1: [2], 2: [0], 3: []}
        assert format_setmap(setmap) == (data_dir / "setmap.txt").read_text()

    def test_setmap_needs_colon(self):
        with pytest.raises(FormatError):
            parse_setmap("0 1\n")

    def test_repeated_key(self):
        with pytest.raises(FormatError):
            parse_setmap("0: 1\n0: 2\n")


def test_unreadable_file(tmp_path):
    with pytest.raises(FormatError):
        read_text(tmp_path / "missing.txt")


def test_shipped_base_loads(data_dir):
    assert load_base(data_dir / "base.txt").params.chi == (0, 2, 4)
