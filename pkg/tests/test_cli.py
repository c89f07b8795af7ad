"""End-to-end checks of main.py run as a subprocess."""

import json

import pytest

from tests.conftest import DATA, FIXTURES


def data(name: str) -> str:
    return str(DATA / name)


def fixture_json(name: str):
    return json.loads((FIXTURES / name).read_text())


class TestGoldenReports:
    @pytest.mark.parametrize("fixture,args", [
        ("leq_x1.json", ["leq", "--algebra", data("algebra.txt"), "--lhs", "x1", "--rhs", "x0", "--rhs", "x2"]),
        ("forcing_leq_q.json", ["forcing", "leq", "--flavor", "q", data("q_p1.txt"), data("q_p2.txt")]),
        ("forcing_leq_p.json", ["forcing", "leq", "--flavor", "p", data("p_p1.txt"), data("p_p2.txt")]),
        ("delta_family.json", ["delta", "--file", data("family.txt"), "--target", "3"]),
        ("triple_q.json", ["forcing", "triple", "--setup", data("triple_q")]),
    ])
    def test_matches_fixture(self, run_cli, fixture, args):
        proc = run_cli(*args, "--json")
        assert proc.returncode == 0, proc.stderr
        assert json.loads(proc.stdout) == fixture_json(fixture)

    def test_json_is_byte_stable(self, run_cli):
        args = ["forcing", "triple", "--flavor", "p", "--trials", "3", "--seed", "4", "--json"]
        first = run_cli(*args)
        second = run_cli(*args)
        assert first.returncode == second.returncode
        assert first.stdout == second.stdout
        assert json.loads(first.stdout)["config"]["seed"] == 4


class TestCanonicalText:
    def test_interleaved_base(self, run_cli):
        proc = run_cli("base", "gen", "--interleave", data("nu.txt"), data("rho.txt"), "--chi", "0", "2", "4")
        assert proc.returncode == 0, proc.stderr
        assert proc.stdout == (DATA / "base.txt").read_text()

    def test_base_algebra(self, run_cli):
        proc = run_cli("base", "algebra", "--base", data("base.txt"))
        assert proc.stdout == (FIXTURES / "base_algebra.txt").read_text()

    @pytest.mark.parametrize("flavor", ["q", "p"])
    def test_amalgam(self, run_cli, flavor):
        proc = run_cli("forcing", "amalgamate", data(f"{flavor}_left.txt"), data(f"{flavor}_right.txt"))
        assert proc.returncode == 0, proc.stderr
        assert proc.stdout == (FIXTURES / f"amalgam_{flavor}.txt").read_text()

    def test_out_file(self, run_cli, tmp_path):
        proc = run_cli("forcing", "amalgamate", data("q_left.txt"), data("q_right.txt"), "--out", "r.txt")
        assert proc.returncode == 0
        assert (tmp_path / "r.txt").read_text() == (FIXTURES / "amalgam_q.txt").read_text()


class TestVerdicts:
    def test_nonzero_term(self, run_cli):
        proc = run_cli("eval", "--algebra", data("algebra.txt"), "--term", "x0 & !x1", "--json")
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["result"]["witness_row"] == "100"

    def test_zero_term(self, run_cli):
        proc = run_cli("eval", "--algebra", data("algebra.txt"), "--term", "x0 & x1 & x2")
        assert proc.returncode == 1

    def test_failed_inequality(self, run_cli):
        proc = run_cli("leq", "--algebra", data("algebra.txt"), "--lhs", "x0", "--rhs", "x1", "--oracle", "--json")
        assert proc.returncode == 1
        result = json.loads(proc.stdout)["result"]
        assert result["counterexample"] == "100"
        assert result["oracle_agrees"]

    def test_forcing_leq_counterexample_replays(self, run_cli, tmp_path):
        wider = tmp_path / "wider.txt"
        wider.write_text(
            "qcond v1\nchi 1 2\nucap 3\nw 0 1\nu (0,0) (1,0) (1,1)\n"
            "f (0,0): 100\nf (1,0): 010\nf (1,1): 001\n"
        )
        proc = run_cli("forcing", "leq", data("q_p2.txt"), str(wider), "--json")
        assert proc.returncode == 1
        block = json.loads(proc.stdout)["result"]["counterexample"]
        assert (block["clause"], block["point"], block["row"]) == ("(beta)", "(0,0)", "10")
        assert block["over"] == ["(0,0)", "(1,0)"]

        for role, text in block["conditions"].items():
            (tmp_path / f"{role}.txt").write_text(text)
        replay = run_cli("forcing", "leq", str(tmp_path / "p.txt"), str(tmp_path / "q.txt"), "--json")
        assert replay.returncode == 1
        assert json.loads(replay.stdout)["result"]["counterexample"] == block

        human = run_cli("forcing", "leq", data("q_p2.txt"), str(wider))
        assert "counterexample: clause (beta) at (0,0)" in human.stdout
        assert "row 10 over (0,0) (1,0)" in human.stdout

    def test_forcing_validate_counterexample_replays(self, run_cli, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("qcond v1\nchi 1 2\nw 0 1\nu (0,0) (1,0)\nf (0,0): 11\nf (1,0): 11\n")
        proc = run_cli("forcing", "validate", str(bad), "--json")
        assert proc.returncode == 1
        block = json.loads(proc.stdout)["result"]["counterexample"]
        assert (block["clause"], block["point"], block["row"]) == ("(c)", "(1,0)", "11")

        replayed = tmp_path / "replayed.txt"
        replayed.write_text(block["conditions"]["condition"])
        again = run_cli("forcing", "validate", str(replayed), "--json")
        assert json.loads(again.stdout)["result"]["counterexample"] == block

    def test_report(self, run_cli):
        proc = run_cli("report", "--algebra", data("free2.txt"), "--json")
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["result"]["spread"] == 4

    def test_enumerate(self, run_cli):
        proc = run_cli("forcing", "enumerate", "--flavor", "q", "--chi", "2", "--json")
        result = json.loads(proc.stdout)["result"]
        assert result["count"] == 4
        assert result["by_size"] == {"0": 1, "1": 1, "2": 2}

    def test_free_set(self, run_cli):
        assert run_cli("freeset", "--file", data("setmap.txt"), "--target", "2").returncode == 0
        assert run_cli("freeset", "--file", data("setmap.txt"), "--target", "3").returncode == 1

    def test_config_file(self, run_cli):
        proc = run_cli("--config", data("config.json"), "delta", "--file", data("family.txt"), "--target", "4", "--json")
        assert proc.returncode == 1
        assert json.loads(proc.stdout)["config"] == {"seed": 7, "budget": 50000, "max_enum": 200000}


class TestTrials:
    def test_clx2_lines(self, run_cli):
        proc = run_cli("base", "clx2", "--base", data("base.txt"), "--trials", "10", "--seed", "1")
        assert proc.returncode in (0, 1)
        lines = [line for line in proc.stdout.splitlines() if line.startswith(("PASS", "FAIL"))]
        assert len(lines) == 10

    def test_clx2_json(self, run_cli):
        proc = run_cli("base", "clx2", "--base", data("base.txt"), "--trials", "4", "--json")
        result = json.loads(proc.stdout)["result"]
        assert result["trials"] == 4
        assert len(result["outcomes"]) == 4

    def test_clx2_split_chains(self, run_cli, tmp_path):
        chi = ["0", "2", "4", "6", "8", "10", "12"]
        gen = run_cli("base", "gen", "--interleave", data("nu12.txt"), data("rho12.txt"), "--chi", *chi, "--out", "b12.txt")
        assert gen.returncode == 0, gen.stderr
        proc = run_cli("base", "clx2", "--base", str(tmp_path / "b12.txt"), "--case", "ii", "--trials", "5", "--json")
        assert proc.returncode == 0, proc.stderr
        outcomes = json.loads(proc.stdout)["result"]["outcomes"]
        assert all(o["cases"] == ["ii", "ii"] and o["holds"] for o in outcomes)


class TestErrors:
    def test_format_error(self, run_cli, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("qcond v1\nchi 1 2\nw 0 1\nu (1,0) (0,0)\n")
        proc = run_cli("forcing", "validate", str(bad), "--json")
        assert proc.returncode == 2
        report = json.loads(proc.stdout)
        assert report["error"]["type"] == "FormatError"
        assert "line 4" in report["error"]["message"]

    def test_term_syntax_error(self, run_cli):
        proc = run_cli("eval", "--algebra", data("algebra.txt"), "--term", "x0 &")
        assert proc.returncode == 2
        assert proc.stdout == ""

    def test_generator_out_of_range(self, run_cli):
        proc = run_cli("eval", "--algebra", data("algebra.txt"), "--term", "x7")
        assert proc.returncode == 2

    def test_flavor_mismatch(self, run_cli):
        proc = run_cli("forcing", "leq", "--flavor", "q", data("q_p1.txt"), data("p_p1.txt"))
        assert proc.returncode == 2

    def test_usage_error(self, run_cli):
        assert run_cli("delta", "--file", data("family.txt")).returncode == 2

    def test_log_file(self, run_cli, tmp_path):
        run_cli("report", "--algebra", data("free2.txt"))
        assert "balab report" in (tmp_path / "balab.log").read_text()
