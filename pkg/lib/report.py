"""JSON envelopes and rich tables for command output."""

import json
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from rich import box
from rich.console import Console
from rich.progress import BarColumn, Progress, SpinnerColumn, TaskProgressColumn, TextColumn, TimeRemainingColumn
from rich.table import Table

from lib.algebra import row_bits
from lib.config import RunConfig
from lib.forcing import OrderVerdict
from lib.separation import InvariantReport, SearchResult, SequenceWitness
from lib.terms import format_term

SCHEMA = "balab/1"

console = Console()
# progress bars and notices go to stderr so stdout stays a clean report
err_console = Console(stderr=True)


def envelope(command: str, config: RunConfig, result: Dict[str, Any]) -> Dict[str, Any]:
    return {"schema": SCHEMA, "command": command, "config": config.echo(), "result": result}


def dump_json(payload: Dict[str, Any]) -> str:
    """Canonical JSON: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def bits_or_none(row: Optional[Sequence[int]]) -> Optional[str]:
    return None if row is None else row_bits(row)


def witness_payload(witness: SequenceWitness) -> Dict[str, Any]:
    return {
        "kind": witness.kind.value,
        "ok": witness.ok,
        "refused_at": witness.refused_at,
        "elements": [format_term(term) for term in witness.elements],
        "rows": [bits_or_none(row) for row in witness.rows],
    }


def search_payload(result: SearchResult) -> Dict[str, Any]:
    return {
        "kind": result.kind.value,
        "length": result.length,
        "exact": result.exact,
        "upper_bound": result.upper_bound,
        "expansions": result.expansions,
        "pool_size": result.pool_size,
        "witness": [format_term(term) for term in result.witness.elements],
        "witness_rows": [bits_or_none(row) for row in result.witness.rows],
    }


def invariant_payload(report: InvariantReport) -> Dict[str, Any]:
    return {
        "atoms": report.atom_count,
        "pool_size": report.pool_size,
        "spread": report.spread,
        "left": report.left,
        "right": report.right,
        "exact": report.exact,
        "searches": {kind.value: search_payload(result) for kind, result in report.results.items()},
    }


def order_payload(verdict: OrderVerdict) -> Dict[str, Any]:
    return {
        "holds": verdict.holds,
        "clause": verdict.clause,
        "detail": verdict.detail,
        "certificates": [
            {"point": str(cert.point), "case": cert.case,
             "source": None if cert.source is None else str(cert.source), "parameter": cert.parameter}
            for cert in verdict.certificates
        ],
    }


def counterexample_block(
    clause: Optional[str],
    point: Optional[Any],
    row: Optional[Sequence[int]],
    domain: Sequence[Any],
    conditions: Dict[str, str],
) -> Dict[str, Any]:
    """A failed verdict in replayable form.

    conditions maps a role ("p", "q" or "condition") to canonical condition
    text; writing each to a file and rerunning the command reproduces the
    clause and point.
    """
    return {
        "clause": clause,
        "point": None if point is None else str(point),
        "row": bits_or_none(row),
        "over": [str(s) for s in domain],
        "conditions": dict(conditions),
    }


def counterexample_lines(block: Dict[str, Any]) -> List[str]:
    head = f"counterexample: clause {block['clause']}"
    if block["point"] is not None:
        head += f" at {block['point']}"
    lines = [head]
    if block["row"] is not None:
        lines.append(f"  row {block['row']} over {' '.join(block['over'])}")
    for role, text in block["conditions"].items():
        lines.append(f"  {role}:")
        lines.extend(f"    {line}" for line in text.splitlines())
    return lines


def metric_table(title: str, rows: Iterable[Tuple[str, Any]], border_style: str = "green") -> Table:
    """Two-column summary table of named values."""
    table = Table(title=title, box=box.DOUBLE, border_style=border_style)
    table.add_column("Metric", style="bold")
    table.add_column("Value", justify="right")
    for name, value in rows:
        table.add_row(name, str(value))
    return table


def trials_table(title: str, passed: int, failed: int) -> Table:
    table = Table(title=title, box=box.DOUBLE, border_style="green" if not failed else "red")
    table.add_column("Metric", style="bold")
    table.add_column("Count", justify="right")
    table.add_row("Trials", str(passed + failed))
    table.add_row("Passed", f"[green]{passed}[/green]")
    table.add_row("Failed", f"[red]{failed}[/red]" if failed > 0 else "0")
    return table


def search_table(results: Sequence[SearchResult]) -> Table:
    table = Table(title="Separated Sequences", box=box.SIMPLE)
    table.add_column("Kind", style="cyan")
    table.add_column("Length", justify="right")
    table.add_column("Exact")
    table.add_column("Expansions", justify="right")
    table.add_column("Witness", style="dim")
    for result in results:
        witness = ", ".join(format_term(term) for term in result.witness.elements)
        table.add_row(
            result.kind.value,
            str(result.length),
            "[green]yes[/green]" if result.exact else "[yellow]lower bound[/yellow]",
            str(result.expansions),
            witness,
        )
    return table


def certificate_table(verdict: OrderVerdict) -> Table:
    table = Table(title="Order Certificate", box=box.SIMPLE)
    table.add_column("Point", style="cyan")
    table.add_column("Case")
    table.add_column("Source")
    table.add_column("Parameter", justify="right")
    for cert in verdict.certificates:
        table.add_row(
            str(cert.point),
            cert.case,
            "" if cert.source is None else str(cert.source),
            "" if cert.parameter is None else str(cert.parameter),
        )
    return table


def status_line(holds: bool, text: str) -> str:
    return f"[green]✓[/green] {text}" if holds else f"[red]✗[/red] {text}"


def trial_progress() -> Progress:
    """Progress bar for long trial loops, drawn on stderr."""
    return Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        TaskProgressColumn(),
        TimeRemainingColumn(),
        console=err_console,
        transient=True,
    )


def pass_fail_lines(outcomes: Sequence[Tuple[int, bool, str]]) -> List[str]:
    return [f"{'PASS' if ok else 'FAIL'} {index} {detail}".rstrip() for index, ok, detail in outcomes]
