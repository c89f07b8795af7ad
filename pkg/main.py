#!/usr/bin/env python3
"""balab - Main Entry Point

Finite laboratory for Boolean algebras presented by homomorphism rows:
term decisions, separated sequences, Delta-systems and free sets, bases
with their derived algebras, and the Q/P forcing conditions.
"""

import sys
import logging
import argparse
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from rich.markup import escape

from lib.algebra import (
    evaluate_hom, is_nonzero, leq_counterexample, oracle_leq, parse_row, row_bits,
)
from lib.bases import (
    BlockParams, algebra_from_base, check_base, check_clx1, check_clx2_config,
    interleaved_base, marked_interleaved_base, random_clx2_config, random_interleaved_base,
)
from lib.combinatorics import (
    EXACT_DELTA_LIMIT, EXACT_FREE_SET_LIMIT, delta_system_extract, delta_system_sequences, free_set_search,
)
from lib.config import DEFAULT_LOG_FILE, RunConfig, build_config
from lib.errors import ConstructionError, FormatError, GeneratorRangeError, SizeBoundError
from lib.forcing import (
    Condition, Flavor, SParams, chain_union_algebra, condition_algebra, condition_iso, condition_leq,
    enumerate_conditions, generator_separation, pair_amalgamate, validate_condition,
)
from lib.formats import (
    format_algebra, format_base, format_condition, format_literals, load_algebra, load_base,
    load_condition, load_family, load_setmap, load_strings, load_tau, write_text,
)
from lib.report import (
    console, counterexample_block, counterexample_lines, dump_json, envelope, err_console, invariant_payload,
    metric_table, order_payload, pass_fail_lines, search_payload, search_table, certificate_table, status_line,
    trial_progress, trials_table, witness_payload, bits_or_none,
)
from lib.separation import (
    SeparationKind, elementary_candidates, invariant_report, max_separated_length, witness_homomorphisms,
)
from lib.terms import format_term, parse_term
from lib.triples import DEFAULT_TRIPLE_PARAMS, TripleSetup, build_triple_instance, triple_amalgamate

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FALSE = 1
EXIT_USAGE = 2

# (verdict, JSON payload) returned by every command handler
Outcome = Tuple[bool, Dict[str, Any]]


def setup_logging(log_file: str, quiet: bool):
    """File handler for everything at INFO, stderr handler for warnings only."""
    file_handler = logging.FileHandler(log_file)
    file_handler.setLevel(logging.INFO)
    file_handler.setFormatter(logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s'))

    # stdout carries the report, so the console handler writes to stderr
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(logging.ERROR if quiet else logging.WARNING)
    console_handler.setFormatter(logging.Formatter('%(levelname)s: %(message)s'))

    logging.basicConfig(level=logging.INFO, handlers=[file_handler, console_handler], force=True)


class Reporter:
    """Human output on stdout; silent in JSON mode where the envelope is the report."""

    def __init__(self, config: RunConfig):
        self.enabled = not config.json

    def print(self, *items):
        if self.enabled:
            console.print(*items)

    def text(self, text: str):
        # canonical file text goes out verbatim, without rich markup
        if self.enabled:
            sys.stdout.write(text)


# ---------------------------------------------------------------------------
# Term engine commands
# ---------------------------------------------------------------------------

def cmd_eval(args, config: RunConfig, out: Reporter) -> Outcome:
    alg = load_algebra(args.algebra)
    term = parse_term(args.term)
    if args.row is not None:
        row = parse_row(args.row)
        value = evaluate_hom(row, term)
        out.print(f"{format_term(term)} under {args.row} = {value}")
        return True, {"term": format_term(term), "row": args.row, "value": value}
    witness = next((row for row in alg.rows if evaluate_hom(row, term)), None)
    nonzero = is_nonzero(alg, term)
    if nonzero:
        out.print(status_line(True, f"{format_term(term)} is nonzero (row {row_bits(witness)})"))
    else:
        out.print(status_line(False, f"{format_term(term)} = 0 in the algebra"))
    return nonzero, {"term": format_term(term), "nonzero": nonzero, "witness_row": bits_or_none(witness)}


def cmd_leq(args, config: RunConfig, out: Reporter) -> Outcome:
    alg = load_algebra(args.algebra)
    lhs = parse_term(args.lhs)
    rhs = [parse_term(text) for text in args.rhs]
    row = leq_counterexample(alg, lhs, rhs)
    holds = row is None
    payload = {
        "lhs": format_term(lhs),
        "rhs": [format_term(term) for term in rhs],
        "holds": holds,
        "counterexample": bits_or_none(row),
    }
    statement = f"{format_term(lhs)} <= {' | '.join(format_term(t) for t in rhs) or '0'}"
    if holds:
        out.print(status_line(True, statement))
    else:
        out.print(status_line(False, f"{statement} fails at row {row_bits(row)}"))
    if args.oracle:
        agrees = oracle_leq(alg, lhs, rhs) == holds
        payload["oracle_agrees"] = agrees
        out.print(status_line(agrees, "set-model oracle agrees" if agrees else "set-model oracle DISAGREES"))
        if not agrees:
            logger.error(f"Oracle disagreement on {statement}")
            return False, payload
    return holds, payload


def cmd_search(args, config: RunConfig, out: Reporter) -> Outcome:
    alg = load_algebra(args.algebra)
    kind = SeparationKind(args.kind)
    if args.seq:
        seq = [parse_term(text) for text in args.seq]
        witness = witness_homomorphisms(alg, seq, kind)
        if witness.ok:
            out.print(status_line(True, f"sequence is {kind.value}-separated"))
        else:
            out.print(status_line(False, f"sequence is not {kind.value}-separated (no witness for position {witness.refused_at})"))
        return witness.ok, witness_payload(witness)

    pool = elementary_candidates(alg, args.arity)
    if not pool:
        out.print("[yellow]No nonzero candidates; the longest sequence is empty[/yellow]")
        return True, {"kind": kind.value, "length": 0, "exact": True, "witness": [], "witness_rows": []}
    result = max_separated_length(alg, kind, pool, config.budget)
    out.print(search_table([result]))
    return True, search_payload(result)


def cmd_report(args, config: RunConfig, out: Reporter) -> Outcome:
    alg = load_algebra(args.algebra)
    arity = min(args.arity, alg.size)
    report = invariant_report(alg, arity, config.budget)
    out.print(metric_table("Algebra Invariants", [
        ("Generators", alg.size),
        ("Rows", len(alg.rows)),
        ("Atoms", report.atom_count),
        ("Candidates", report.pool_size),
        ("Spread", report.spread),
        ("Left-separated", report.left),
        ("Right-separated", report.right),
        ("Exact", "yes" if report.exact else "lower bounds"),
    ]))
    if report.pool_size:
        out.print(search_table(list(report.results.values())))
    return True, invariant_payload(report)


# ---------------------------------------------------------------------------
# Combinatorics commands
# ---------------------------------------------------------------------------

def cmd_delta(args, config: RunConfig, out: Reporter) -> Outcome:
    members = load_family(args.file)
    if args.sequences:
        found = delta_system_sequences(members, args.target, args.exact_limit)
        heart = None if found is None else [[pos, value] for pos, value in found.heart.items()]
    else:
        found = delta_system_extract(members, args.target, args.exact_limit)
        heart = None if found is None else sorted(found.heart)
    if found is None:
        out.print(status_line(False, f"no Delta-system of size {args.target} among {len(members)} member(s)"))
        return False, {"found": False, "target": args.target}
    out.print(status_line(True, f"Delta-system {list(found.indices)} with heart {heart}"))
    if not found.exact:
        out.print("[dim]found by greedy search[/dim]")
    return True, {"found": True, "target": args.target, "indices": list(found.indices), "heart": heart, "exact": found.exact}


def cmd_freeset(args, config: RunConfig, out: Reporter) -> Outcome:
    setmap = load_setmap(args.file)
    found = free_set_search(setmap, args.target, args.exact_limit)
    if found is None:
        out.print(status_line(False, f"no free set of size {args.target}"))
        return False, {"found": False, "target": args.target}
    out.print(status_line(True, f"free set {list(found.members)}"))
    return True, {"found": True, "target": args.target, "members": list(found.members), "exact": found.exact}


# ---------------------------------------------------------------------------
# Base commands
# ---------------------------------------------------------------------------

def cmd_base_gen(args, config: RunConfig, out: Reporter) -> Outcome:
    if args.interleave:
        nu = load_strings(args.interleave[0])
        rho = load_strings(args.interleave[1])
        if not nu or not rho:
            raise FormatError("nu and rho files must each hold at least one string")
        depth = len(nu[0]) + len(rho[0])
        chi = tuple(args.chi) if args.chi else (0, len(rho))
        params = BlockParams(depth, args.alphabet, chi)
        if args.marks is not None:
            base = marked_interleaved_base(nu, rho, args.marks, params)
        else:
            base = interleaved_base(nu, rho, params)
    else:
        base = random_interleaved_base(config.rng("base-gen"), args.depth, args.alphabet, args.max_size)
    text = format_base(base)
    if args.out:
        write_text(args.out, text)
        out.print(f"[green]✓[/green] Wrote base with {base.params.size} indices to {args.out}")
    else:
        out.text(text)
    return True, {"base": text}


def cmd_base_check(args, config: RunConfig, out: Reporter) -> Outcome:
    base = load_base(args.base)
    verdicts = check_base(base, args.y0, args.plus, config.max_enum)
    for verdict in verdicts:
        detail = "" if verdict.holds else f" (witness {verdict.witness})"
        out.print(status_line(verdict.holds, f"axiom ({verdict.axiom}){detail}"))
    payload = {"y0": args.y0, "axioms": [
        {"axiom": v.axiom, "holds": v.holds, "witness": v.witness} for v in verdicts
    ]}
    return all(v.holds for v in verdicts), payload


def cmd_base_algebra(args, config: RunConfig, out: Reporter) -> Outcome:
    alg = algebra_from_base(load_base(args.base))
    text = format_algebra(alg)
    if args.out:
        write_text(args.out, text)
        out.print(f"[green]✓[/green] Wrote algebra with {alg.size} generators and {len(alg.rows)} rows to {args.out}")
    else:
        out.text(text)
    return True, {"algebra": text}


def cmd_base_clx1(args, config: RunConfig, out: Reporter) -> Outcome:
    verdicts = check_clx1(load_base(args.base))
    for verdict in verdicts:
        out.print(status_line(verdict.holds, f"block {verdict.block} {list(verdict.indices)} ideal-independent"))
    payload = {"blocks": [
        {"block": v.block, "indices": list(v.indices), "holds": v.holds, "witness": witness_payload(v.witness)}
        for v in verdicts
    ]}
    return all(v.holds for v in verdicts), payload


def cmd_base_clx2(args, config: RunConfig, out: Reporter) -> Outcome:
    base = load_base(args.base)
    rng = config.rng("clx2")
    outcomes = []
    with trial_progress() as progress:
        task = progress.add_task("clx2 trials", total=args.trials)
        for trial in range(args.trials):
            cfg = random_clx2_config(base, rng, args.k_star, args.l_star, case=args.case)
            verdict = check_clx2_config(base, cfg)
            outcomes.append({
                "trial": trial,
                "holds": verdict.holds,
                "cases": list(verdict.cases),
                "sigmas": list(cfg.sigmas),
                "alphas": list(cfg.alphas),
                "rows": [list(row) for row in cfg.alpha_rows],
                "signs": list(cfg.signs),
                "counterexample": bits_or_none(verdict.counterexample),
            })
            if not verdict.holds:
                logger.error(f"clx2 trial {trial} fails: counterexample row {row_bits(verdict.counterexample)}")
            progress.advance(task)
    passed = sum(1 for o in outcomes if o["holds"])
    for line in pass_fail_lines([(o["trial"], o["holds"], f"cases={','.join(o['cases'])}") for o in outcomes]):
        out.print(line)
    out.print(trials_table("clx2 Summary", passed, len(outcomes) - passed))
    return passed == len(outcomes), {"trials": args.trials, "passed": passed, "outcomes": outcomes}


# ---------------------------------------------------------------------------
# Forcing commands
# ---------------------------------------------------------------------------

def _load_conditions(paths: Sequence[str], flavor: Optional[str]) -> Tuple[SParams, List[Condition]]:
    params = None
    conditions = []
    for path in paths:
        file_params, c = load_condition(path)
        if flavor is not None and c.flavor.value != flavor:
            raise FormatError(f"{path} holds a {c.flavor.value}-condition, expected {flavor}")
        if params is not None and file_params != params:
            raise FormatError(f"{path} uses chi/ucap different from {paths[0]}")
        params = file_params
        conditions.append(c)
    return params, conditions


def _print_counterexample(out: Reporter, block: Dict[str, Any]):
    out.text("\n".join(counterexample_lines(block)) + "\n")


def cmd_forcing_validate(args, config: RunConfig, out: Reporter) -> Outcome:
    params, (c,) = _load_conditions([args.file], args.flavor)
    verdict = validate_condition(params, c)
    payload = {"valid": verdict.valid, "clause": verdict.clause, "detail": verdict.detail, "counterexample": None}
    if verdict.valid:
        out.print(status_line(True, f"valid {c.flavor.value}-condition with {len(c.points)} point(s)"))
        return True, payload
    out.print(status_line(False, f"clause {verdict.clause}: {verdict.detail}"))
    block = counterexample_block(
        verdict.clause, verdict.point, verdict.row, c.points, {"condition": format_condition(params, c)},
    )
    _print_counterexample(out, block)
    return False, {**payload, "counterexample": block}


def cmd_forcing_leq(args, config: RunConfig, out: Reporter) -> Outcome:
    params, (p, q) = _load_conditions([args.p, args.q], args.flavor)
    verdict = condition_leq(params, p, q)
    payload = {**order_payload(verdict), "counterexample": None}
    if verdict.holds:
        out.print(status_line(True, f"{args.p} <= {args.q}"))
        out.print(certificate_table(verdict))
        return True, payload
    out.print(status_line(False, f"{args.p} <= {args.q} fails at clause {verdict.clause}: {verdict.detail}"))
    conditions = {"p": format_condition(params, p), "q": format_condition(params, q)}
    block = counterexample_block(verdict.clause, verdict.point, verdict.row, p.points, conditions)
    _print_counterexample(out, block)
    return False, {**payload, "counterexample": block}


def cmd_forcing_iso(args, config: RunConfig, out: Reporter) -> Outcome:
    _, (p, q) = _load_conditions([args.p, args.q], args.flavor)
    verdict = condition_iso(p, q)
    if not verdict.holds:
        out.print(status_line(False, f"not isomorphic: clause {verdict.clause}: {verdict.detail}"))
        return False, {"holds": False, "clause": verdict.clause, "detail": verdict.detail}
    mapping = {str(s): str(t) for s, t in verdict.iso.mapping.items()}
    out.print(status_line(True, "isomorphic"))
    for s, t in mapping.items():
        out.print(f"  {s} -> {t}")
    return True, {"holds": True, "mapping": mapping}


def cmd_forcing_amalgamate(args, config: RunConfig, out: Reporter) -> Outcome:
    params, (p, q) = _load_conditions([args.p, args.q], args.flavor)
    try:
        r = pair_amalgamate(params, p, q)
    except ConstructionError as e:
        logger.error(f"Amalgamation failed: {e}")
        out.print(status_line(False, f"no amalgam: {e}"))
        conditions = {"p": format_condition(params, p), "q": format_condition(params, q)}
        block = counterexample_block("construction", e.point, None, (), conditions)
        _print_counterexample(out, block)
        return False, {"condition": None, "error": str(e), "counterexample": block}
    text = format_condition(params, r)
    if args.out:
        write_text(args.out, text)
        out.print(f"[green]✓[/green] Wrote amalgam with {len(r.points)} point(s) to {args.out}")
    else:
        out.text(text)
    return True, {"condition": text}


def cmd_forcing_algebra(args, config: RunConfig, out: Reporter) -> Outcome:
    params, (c,) = _load_conditions([args.file], args.flavor)
    verdict = validate_condition(params, c)
    if not verdict.valid:
        out.print(status_line(False, f"not a valid condition: clause {verdict.clause}: {verdict.detail}"))
        block = counterexample_block(
            verdict.clause, verdict.point, verdict.row, c.points, {"condition": format_condition(params, c)},
        )
        _print_counterexample(out, block)
        return False, {"valid": False, "clause": verdict.clause, "detail": verdict.detail, "counterexample": block}
    alg = condition_algebra(params, c)
    text = format_algebra(alg)
    if args.out:
        write_text(args.out, text)
        out.print(f"[green]✓[/green] Wrote B_c with {len(alg.rows)} rows to {args.out}")
    else:
        out.text(text)
    return True, {"algebra": text, "labels": list(alg.labels)}


def cmd_forcing_chain(args, config: RunConfig, out: Reporter) -> Outcome:
    params, chain = _load_conditions(args.files, args.flavor)
    alg = chain_union_algebra(params, chain)
    out.print(status_line(True, f"chain of {len(chain)} condition(s); every algebra embeds in the next"))
    out.print(metric_table("Top Algebra", [("Generators", alg.size), ("Rows", len(alg.rows))]))
    return True, {"length": len(chain), "algebra": format_algebra(alg), "labels": list(alg.labels)}


def cmd_forcing_enumerate(args, config: RunConfig, out: Reporter) -> Outcome:
    params = SParams(tuple(args.chi), args.ucap)
    flavor = Flavor(args.flavor)
    conditions = enumerate_conditions(params, flavor, config.max_enum)
    sizes: Dict[int, int] = {}
    for c in conditions:
        sizes[len(c.points)] = sizes.get(len(c.points), 0) + 1
    out.print(metric_table(
        f"Valid {flavor.value}-conditions",
        [("Total", len(conditions))] + [(f"|u| = {size}", count) for size, count in sorted(sizes.items())],
    ))
    payload = {
        "flavor": flavor.value,
        "count": len(conditions),
        "by_size": {str(size): count for size, count in sorted(sizes.items())},
        "conditions": [format_condition(params, c) for c in conditions],
    }
    return True, payload


def cmd_forcing_separation(args, config: RunConfig, out: Reporter) -> Outcome:
    params, (c,) = _load_conditions([args.file], args.flavor)
    witness = generator_separation(params, c)
    out.print(status_line(witness.ok, f"generators in grid order are {witness.kind.value}-separated"))
    return witness.ok, witness_payload(witness)


def _triple_from_dir(directory: Path, flavor: Optional[str]) -> Tuple[SParams, TripleSetup]:
    names = ["q.txt", "q0.txt", "q1.txt", "q2.txt"]
    params, (q, q0, q1, q2) = _load_conditions([str(directory / name) for name in names], flavor)
    tau = load_tau(directory / "tau.txt")
    return params, TripleSetup(q, q0, q1, q2, tau["tau0"], tau["tau1"], tau["tau2"])


def _triple_outcome(index: int, params: SParams, setup: TripleSetup) -> Dict[str, Any]:
    try:
        result = triple_amalgamate(params, setup)
    except ConstructionError as e:
        logger.error(f"Triple instance {index}: construction failed: {e}")
        return {"index": index, "holds": False, "error": str(e), "cases": {}}
    if not result.holds:
        logger.error(f"Triple instance {index}: inequality fails at row {row_bits(result.counterexample)}")
    return {
        "index": index,
        "holds": result.holds,
        "points": len(result.condition.points),
        "tau0": format_literals(setup.tau0),
        "cases": {str(point): case for point, case in result.cases.items()},
        "counterexample": bits_or_none(result.counterexample),
        "condition": format_condition(params, result.condition),
    }


def cmd_forcing_triple(args, config: RunConfig, out: Reporter) -> Outcome:
    if args.setup:
        params, setup = _triple_from_dir(Path(args.setup), args.flavor)
        outcome = _triple_outcome(0, params, setup)
        out.print(status_line(outcome["holds"], f"triple amalgam over {len(setup.q.points)} + {len(setup.q1.points)} + {len(setup.q2.points)} point(s)"))
        for point, case in outcome["cases"].items():
            out.print(f"  {point}: case {case}")
        return outcome["holds"], outcome

    if args.flavor is None:
        raise FormatError("--flavor is required unless --setup is given")
    flavor = Flavor(args.flavor)
    params = SParams(tuple(args.chi), args.ucap) if args.chi else DEFAULT_TRIPLE_PARAMS
    rng = config.rng(f"triple-{flavor.value}")
    outcomes = []
    with trial_progress() as progress:
        task = progress.add_task(f"{flavor.value}-triple trials", total=args.trials)
        for index in range(args.trials):
            setup = build_triple_instance(rng, flavor, params)
            outcomes.append(_triple_outcome(index, params, setup))
            progress.advance(task)
    passed = sum(1 for o in outcomes if o["holds"])
    counts: Dict[str, int] = {}
    for o in outcomes:
        for case in o["cases"].values():
            counts[case] = counts.get(case, 0) + 1
    for line in pass_fail_lines([(o["index"], o["holds"], f"|u^r|={o.get('points', '-')}") for o in outcomes]):
        out.print(line)
    out.print(trials_table(f"{flavor.value}-triple Summary", passed, len(outcomes) - passed))
    out.print(metric_table("Construction Cases", sorted(counts.items()), border_style="cyan"))
    for o in outcomes:
        o.pop("condition", None)
    return passed == len(outcomes), {
        "flavor": flavor.value,
        "trials": args.trials,
        "passed": passed,
        "case_counts": dict(sorted(counts.items())),
        "outcomes": outcomes,
    }


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _common_flags() -> argparse.ArgumentParser:
    # SUPPRESS keeps a flag given before the subcommand from being reset after it
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="random seed (default 0)")
    common.add_argument("--budget", type=int, default=argparse.SUPPRESS, help="search node-expansion cap")
    common.add_argument("--max-enum", type=int, default=argparse.SUPPRESS, help="enumeration size cap")
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="print one JSON report")
    common.add_argument("--config", type=Path, default=argparse.SUPPRESS, help="JSON file with defaults")
    common.add_argument("--log-file", default=argparse.SUPPRESS, help=f"log file (default {DEFAULT_LOG_FILE})")
    common.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS, help="only show errors on stderr")
    return common


def _flavor_flag(parser: argparse.ArgumentParser, required: bool = False):
    parser.add_argument("--flavor", choices=[f.value for f in Flavor], required=required, default=None)


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(prog="balab", description=__doc__.split("\n")[0], parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(subparsers, name: str, handler: Callable, help_text: str) -> argparse.ArgumentParser:
        p = subparsers.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(handler=handler)
        return p

    p = add(sub, "eval", cmd_eval, "decide whether a term is nonzero, or evaluate it under a row")
    p.add_argument("--algebra", required=True)
    p.add_argument("--term", required=True)
    p.add_argument("--row", help="bitstring; evaluate the term under this row instead")

    p = add(sub, "leq", cmd_leq, "decide lhs <= rhs1 | rhs2 | ...")
    p.add_argument("--algebra", required=True)
    p.add_argument("--lhs", required=True)
    p.add_argument("--rhs", action="append", default=[])
    p.add_argument("--oracle", action="store_true", help="cross-check with the set-model oracle")

    p = add(sub, "search", cmd_search, "longest separated sequence, or check one sequence")
    p.add_argument("--algebra", required=True)
    p.add_argument("--kind", choices=[k.value for k in SeparationKind], required=True)
    p.add_argument("--arity", type=int, default=2)
    p.add_argument("--seq", nargs="+", help="check this sequence of terms instead of searching")

    p = add(sub, "report", cmd_report, "spread and separated lengths of an algebra")
    p.add_argument("--algebra", required=True)
    p.add_argument("--arity", type=int, default=2)

    p = add(sub, "delta", cmd_delta, "extract a Delta-system from a family")
    p.add_argument("--file", required=True)
    p.add_argument("--target", type=int, required=True)
    p.add_argument("--sequences", action="store_true", help="members are sequences, not sets")
    p.add_argument("--exact-limit", type=int, default=EXACT_DELTA_LIMIT)

    p = add(sub, "freeset", cmd_freeset, "find a free set for a set map")
    p.add_argument("--file", required=True)
    p.add_argument("--target", type=int, required=True)
    p.add_argument("--exact-limit", type=int, default=EXACT_FREE_SET_LIMIT)

    base = sub.add_parser("base", help="bases and their derived algebras")
    base_sub = base.add_subparsers(dest="base_command", required=True)
    p = add(base_sub, "gen", cmd_base_gen, "build an interleaved base")
    p.add_argument("--interleave", nargs=2, metavar=("NU_FILE", "RHO_FILE"))
    p.add_argument("--chi", type=int, nargs="+", help="block boundaries 0 < ... < L")
    p.add_argument("--marks", type=int, nargs="*", help="marked positions (default: even positions)")
    p.add_argument("--alphabet", type=int, default=2)
    p.add_argument("--depth", type=int, default=4, help="depth of a random base")
    p.add_argument("--max-size", type=int, default=12, help="index cap of a random base")
    p.add_argument("--out")
    p = add(base_sub, "check", cmd_base_check, "check axioms (b), (c) and optionally (c+)")
    p.add_argument("--base", required=True)
    p.add_argument("--y0", type=int, required=True)
    p.add_argument("--plus", action="store_true")
    p = add(base_sub, "algebra", cmd_base_algebra, "write the derived algebra")
    p.add_argument("--base", required=True)
    p.add_argument("--out")
    p = add(base_sub, "clx1", cmd_base_clx1, "ideal independence of each block")
    p.add_argument("--base", required=True)
    p = add(base_sub, "clx2", cmd_base_clx2, "sampled meet-below-join trials")
    p.add_argument("--base", required=True)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--k-star", type=int, default=2)
    p.add_argument("--l-star", type=int, default=3)
    p.add_argument("--case", choices=("i", "ii"), help="sample only repeated-index (i) or split-chain (ii) configs")

    forcing = sub.add_parser("forcing", help="Q and P forcing conditions")
    forcing_sub = forcing.add_subparsers(dest="forcing_command", required=True)
    p = add(forcing_sub, "validate", cmd_forcing_validate, "check a condition's clauses")
    _flavor_flag(p)
    p.add_argument("file")
    for name, handler, help_text in (
        ("leq", cmd_forcing_leq, "decide p <= q with a certificate"),
        ("iso", cmd_forcing_iso, "find the isomorphism from p to q"),
        ("amalgamate", cmd_forcing_amalgamate, "common upper bound of an isomorphic pair"),
    ):
        p = add(forcing_sub, name, handler, help_text)
        _flavor_flag(p)
        p.add_argument("p")
        p.add_argument("q")
        if name == "amalgamate":
            p.add_argument("--out")
    p = add(forcing_sub, "triple", cmd_forcing_triple, "triple amalgamation trials or one setup")
    _flavor_flag(p)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--setup", help="directory with q.txt, q0.txt, q1.txt, q2.txt and tau.txt")
    p.add_argument("--chi", type=int, nargs="+", help="level widths for generated instances")
    p.add_argument("--ucap", type=int, default=DEFAULT_TRIPLE_PARAMS.ucap)
    p = add(forcing_sub, "algebra", cmd_forcing_algebra, "write the condition's algebra")
    _flavor_flag(p)
    p.add_argument("file")
    p.add_argument("--out")
    p = add(forcing_sub, "chain", cmd_forcing_chain, "algebra of the top of an increasing chain")
    _flavor_flag(p)
    p.add_argument("files", nargs="+")
    p = add(forcing_sub, "enumerate", cmd_forcing_enumerate, "every valid condition at small parameters")
    _flavor_flag(p, required=True)
    p.add_argument("--chi", type=int, nargs="+", required=True)
    p.add_argument("--ucap", type=int, default=3)
    p = add(forcing_sub, "separation", cmd_forcing_separation, "separation of the generators of B_c")
    _flavor_flag(p)
    p.add_argument("file")
    return parser


def command_name(args) -> str:
    parts = [args.command]
    for attr in ("base_command", "forcing_command"):
        if getattr(args, attr, None):
            parts.append(getattr(args, attr))
    return " ".join(parts)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    quiet = getattr(args, "quiet", False)
    try:
        config = build_config(
            getattr(args, "config", None),
            seed=getattr(args, "seed", None),
            budget=getattr(args, "budget", None),
            max_enum=getattr(args, "max_enum", None),
            output="json" if getattr(args, "json", False) else None,
            log_file=getattr(args, "log_file", None),
        )
    except ValueError as e:
        parser.error(str(e))
    setup_logging(config.log_file, quiet)

    name = command_name(args)
    out = Reporter(config)
    logger.info(f"balab {name} (seed {config.seed}, budget {config.budget}, max_enum {config.max_enum})")
    try:
        ok, payload = args.handler(args, config, out)
    except (ValueError, GeneratorRangeError, SizeBoundError) as e:
        # FormatError, TermSyntaxError and PreconditionError are ValueErrors too
        logger.error(f"{name}: {e}")
        if config.json:
            sys.stdout.write(dump_json({**envelope(name, config, {}), "error": {"type": type(e).__name__, "message": str(e)}}))
        else:
            err_console.print(f"[red]✗[/red] {escape(str(e))}", highlight=False)
        return EXIT_USAGE
    except KeyboardInterrupt:
        err_console.print("\n[yellow]Interrupted by user[/yellow]")
        return EXIT_FALSE
    except Exception as e:
        logger.exception(f"{name}: unexpected error: {e}")
        err_console.print(f"[red]✗ Unexpected error:[/red] {escape(str(e))}")
        return EXIT_FALSE

    if config.json:
        sys.stdout.write(dump_json({**envelope(name, config, payload), "ok": ok}))
    logger.info(f"balab {name} finished: {'true' if ok else 'false'}")
    return EXIT_OK if ok else EXIT_FALSE


if __name__ == "__main__":
    sys.exit(main())
