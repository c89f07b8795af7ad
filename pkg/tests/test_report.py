import json

from lib.config import RunConfig
from lib.forcing import GridPoint, condition_leq
from lib.formats import load_condition
from lib.report import (
    SCHEMA, counterexample_block, counterexample_lines, dump_json, envelope, order_payload, pass_fail_lines,
    status_line, trials_table,
)


def test_envelope():
    payload = envelope("forcing leq", RunConfig(seed=3), {"holds": True})
    assert payload == {
        "schema": SCHEMA,
        "command": "forcing leq",
        "config": {"seed": 3, "budget": 200000, "max_enum": 200000},
        "result": {"holds": True},
    }


def test_dump_json_is_canonical():
    text = dump_json({"b": 1, "a": {"d": None, "c": [1, 2]}})
    assert text.endswith("}\n")
    assert list(json.loads(text)) == ["a", "b"]
    assert text == dump_json(json.loads(text))
    assert text.index('"c"') < text.index('"d"')


def test_order_payload(data_dir):
    params, p = load_condition(data_dir / "q_p1.txt")
    _, q = load_condition(data_dir / "q_p2.txt")
    payload = order_payload(condition_leq(params, p, q))
    assert payload["holds"]
    assert payload["clause"] is None
    assert payload["certificates"][1] == {"point": "(1,0)", "case": "zero", "source": None, "parameter": None}


def test_status_line():
    assert status_line(True, "ok").endswith("✓[/green] ok")
    assert "[red]" in status_line(False, "bad")


def test_pass_fail_lines():
    assert pass_fail_lines([(0, True, "cases=i,i"), (1, False, "")]) == ["PASS 0 cases=i,i", "FAIL 1"]


def test_trials_table():
    table = trials_table("clx2 Summary", 3, 1)
    assert table.row_count == 3
    assert table.border_style == "red"
    assert trials_table("clx2 Summary", 3, 0).border_style == "green"


def test_counterexample_block():
    block = counterexample_block("(beta)", GridPoint(0, 0), (1, 0), [GridPoint(0, 0), GridPoint(1, 0)], {"p": "qcond v1\nchi 1\n"})
    assert block == {
        "clause": "(beta)", "point": "(0,0)", "row": "10", "over": ["(0,0)", "(1,0)"],
        "conditions": {"p": "qcond v1\nchi 1\n"},
    }
    assert counterexample_lines(block) == [
        "counterexample: clause (beta) at (0,0)", "  row 10 over (0,0) (1,0)", "  p:", "    qcond v1", "    chi 1",
    ]
