#!/usr/bin/env python3
"""
Acceptance checks for balab at full size.
Runs every check with a seeded random source and prints a results table.
"""

import sys
import time
import random
import logging
from collections import Counter
from itertools import combinations, combinations_with_replacement, product
from pathlib import Path
from typing import Callable, List, Tuple

from rich.console import Console
from rich.table import Table
from rich.progress import Progress, SpinnerColumn, TextColumn, BarColumn, TaskProgressColumn

from lib.algebra import PresentedAlgebra, leq_holds, oracle_leq, subalgebra_check, term_mask
from lib.bases import (
    BlockParams, check_base, check_clx1, check_clx2_config, interleaved_base, random_clx2_config,
    random_interleaved_base,
)
from lib.combinatorics import delta_system_extract, free_set_search, sunflower_bound, verify_free_set
from lib.errors import ConstructionError, PreconditionError, SizeBoundError
from lib.forcing import (
    Flavor, SParams, condition_algebra, condition_leq, enumerate_conditions, generator_separation,
    pair_amalgamate,
)
from lib.formats import load_strings
from lib.separation import (
    SeparationKind, elementary_candidates, invariant_report, is_separated, witness_homomorphisms,
)
from lib.terms import And, Const, Not, Or, Term, Var, elementary
from lib.triples import DEFAULT_TRIPLE_PARAMS, build_triple_instance, triple_amalgamate

console = Console()
logger = logging.getLogger("verify_acceptance")

DATA = Path(__file__).resolve().parent / "data"
SEED = 20240601
TINY = SParams(chi=(1, 2), ucap=3)


def random_term(rng: random.Random, size: int, depth: int) -> Term:
    if depth == 0 or rng.random() < 0.3:
        if rng.random() < 0.1:
            return Const(rng.randint(0, 1))
        return Var(rng.randrange(size))
    shape = rng.choice(("not", "and", "or"))
    if shape == "not":
        return Not(random_term(rng, size, depth - 1))
    operands = tuple(random_term(rng, size, depth - 1) for _ in range(rng.randint(2, 3)))
    return And(operands) if shape == "and" else Or(operands)


def random_algebra(rng: random.Random, max_size: int, max_rows: int) -> PresentedAlgebra:
    size = rng.randint(1, max_size)
    rows = [tuple(rng.randint(0, 1) for _ in range(size)) for _ in range(rng.randint(0, max_rows))]
    return PresentedAlgebra.create(size, rows)


def check_oracle(rng: random.Random) -> Tuple[bool, str]:
    disagreements = 0
    for _ in range(10000):
        alg = random_algebra(rng, 6, 16)
        lhs = random_term(rng, alg.size, 3)
        rhs = [random_term(rng, alg.size, 3) for _ in range(rng.randint(0, 3))]
        if leq_holds(alg, lhs, rhs) != oracle_leq(alg, lhs, rhs):
            disagreements += 1
    return disagreements == 0, f"{disagreements} disagreement(s) in 10000"


def elementary_classes(alg: PresentedAlgebra) -> List[Term]:
    """One elementary conjunction per value they take in alg, the zero value included."""
    pool = elementary_candidates(alg, alg.size)
    for arity in range(1, alg.size + 1):
        for indices in combinations(range(alg.size), arity):
            for signs in product((True, False), repeat=arity):
                term = elementary(list(zip(indices, signs)))
                if term_mask(alg, term) == 0:
                    return pool + [term]
    return pool


def check_separation_witnesses(rng: random.Random) -> Tuple[bool, str]:
    """Every elementary-conjunction sequence of length <= 3, up to equality in the algebra.

    Both verdicts depend only on the values of the terms, and ideal independence
    does not depend on their order, so it is checked once per multiset.
    """
    discrepancies = 0
    checked = 0
    for _ in range(200):
        alg = random_algebra(rng, 4, 8)
        pool = elementary_classes(alg)
        for length in range(1, 4):
            for seq in product(pool, repeat=length):
                for kind in (SeparationKind.LEFT_SEPARATED, SeparationKind.RIGHT_SEPARATED):
                    checked += 1
                    if is_separated(alg, seq, kind) != witness_homomorphisms(alg, seq, kind).ok:
                        discrepancies += 1
            for seq in combinations_with_replacement(pool, length):
                checked += 1
                kind = SeparationKind.IDEAL_INDEPENDENT
                if is_separated(alg, seq, kind) != witness_homomorphisms(alg, seq, kind).ok:
                    discrepancies += 1
    return discrepancies == 0, f"{discrepancies} discrepancy(ies) in {checked}"


def check_free_spread() -> Tuple[bool, str]:
    details = []
    ok = True
    for n in (2, 3):
        report = invariant_report(PresentedAlgebra.free(n), n)
        values = (report.spread, report.left, report.right)
        ok &= values == (2 ** n,) * 3 and report.exact
        details.append(f"n={n}: {values}")
    return ok, "; ".join(details)


def twelve_index_base():
    params = BlockParams(8, 2, (0, 2, 4, 6, 8, 10, 12))
    return interleaved_base(load_strings(DATA / "nu12.txt"), load_strings(DATA / "rho12.txt"), params)


def _bases(rng: random.Random):
    return [random_interleaved_base(rng, rng.choice((4, 6, 8)), 2, 12) for _ in range(100)] + [twelve_index_base()]


def check_axiom_b(bases) -> Tuple[bool, str]:
    failures = sum(1 for base in bases if not check_base(base, min(2, base.params.size))[0].holds)
    return failures == 0, f"{failures} failure(s) over {len(bases)} bases"


def check_clx1_all(bases) -> Tuple[bool, str]:
    failures = sum(1 for base in bases for verdict in check_clx1(base) if not verdict.holds)
    return failures == 0, f"{failures} failing block(s)"


def check_clx2_all(rng: random.Random, bases) -> Tuple[bool, str]:
    usable = [base for base in bases if base.params.size >= 4]
    chained = list(usable)
    passed = failed = refused = 0
    cases = Counter()
    while passed + failed < 500 and usable:
        case = "ii" if chained and rng.random() < 0.5 else None
        base = rng.choice(chained if case else usable)
        try:
            config = random_clx2_config(base, rng, retries=1000 if case else 200, case=case)
        except SizeBoundError:
            if case:
                chained.remove(base)
            else:
                refused += 1
                usable.remove(base)
                logger.info("Dropped a base with no valid clx2 config")
            continue
        verdict = check_clx2_config(base, config)
        cases.update(verdict.cases)
        if verdict.holds:
            passed += 1
        else:
            failed += 1
    ok = failed == 0 and passed == 500 and cases["ii"] > 0
    mix = ", ".join(f"{cases[c]} ({c})" for c in ("i", "ii"))
    return ok, f"{passed} passed, {failed} failed, {refused} base(s) refused; positions {mix}"


def check_poset(universe) -> Tuple[bool, str]:
    failures = 0
    for flavor, conditions in universe.items():
        leq = {}
        for p in conditions:
            for q in conditions:
                leq[p, q] = condition_leq(TINY, p, q).holds
        failures += sum(1 for p in conditions if not leq[p, p])
        for p in conditions:
            for q in conditions:
                if not leq[p, q]:
                    continue
                for r in conditions:
                    if leq[q, r] and not leq[p, r]:
                        failures += 1
    sizes = ", ".join(f"{len(c)} {f.value}" for f, c in universe.items())
    return failures == 0, f"{failures} failure(s) over {sizes} conditions"


def check_amalgamation(universe) -> Tuple[bool, str]:
    failures = amalgams = 0
    for flavor, conditions in universe.items():
        for p in conditions:
            for q in conditions:
                try:
                    pair_amalgamate(TINY, p, q)
                    amalgams += 1
                except PreconditionError:
                    pass
                except ConstructionError:
                    failures += 1
                if condition_leq(TINY, p, q).holds:
                    if not subalgebra_check(condition_algebra(TINY, p), condition_algebra(TINY, q)):
                        failures += 1
    return failures == 0, f"{failures} failure(s), {amalgams} amalgam(s)"


def check_triples(rng: random.Random) -> Tuple[bool, str]:
    failures = 0
    for flavor in Flavor:
        for _ in range(200):
            setup = build_triple_instance(rng, flavor)
            try:
                if not triple_amalgamate(DEFAULT_TRIPLE_PARAMS, setup).holds:
                    failures += 1
            except ConstructionError:
                failures += 1
    return failures == 0, f"{failures} failure(s) over 400 instances"


def check_generator_separation(universe) -> Tuple[bool, str]:
    failures = sum(
        1 for conditions in universe.values() for c in conditions if not generator_separation(TINY, c).ok
    )
    return failures == 0, f"{failures} failure(s)"


def check_combinatorics(rng: random.Random) -> Tuple[bool, str]:
    failures = 0
    for _ in range(1000):
        k = rng.randint(1, 3)
        lam = rng.randint(2, 4)
        universe = list(range(3 * k + 6))
        pool = [frozenset(c) for c in combinations(universe, k)]
        count = min(len(pool), sunflower_bound(k, lam) + 1)
        members = rng.sample(pool, count)
        found = delta_system_extract(members, lam)
        if count > sunflower_bound(k, lam) and found is None:
            failures += 1

    for _ in range(200):
        size = rng.randint(1, 10)
        setmap = {y: [z for z in range(size) if rng.random() < 0.3] for y in range(size)}
        for target in range(size + 1):
            brute = any(verify_free_set(setmap, chosen) for chosen in combinations(range(size), target))
            found = free_set_search(setmap, target)
            if (found is not None) != brute or (found is not None and not verify_free_set(setmap, found.members)):
                failures += 1
    return failures == 0, f"{failures} failure(s)"


def main():
    logging.basicConfig(level=logging.WARNING, format='%(levelname)s: %(message)s')
    console.print("\n[cyan]Running balab acceptance checks[/cyan]\n")

    def rng_for(name: str) -> random.Random:
        return random.Random(f"{SEED}:{name}")

    state = {}

    def universe():
        if "universe" not in state:
            state["universe"] = {flavor: enumerate_conditions(TINY, flavor) for flavor in Flavor}
        return state["universe"]

    def bases():
        if "bases" not in state:
            state["bases"] = _bases(rng_for("bases"))
        return state["bases"]

    checks: List[Tuple[str, Callable[[], Tuple[bool, str]]]] = [
        ("Oracle equivalence", lambda: check_oracle(rng_for("oracle"))),
        ("Separation witnesses", lambda: check_separation_witnesses(rng_for("separation"))),
        ("Spread of free algebras", check_free_spread),
        ("Base axiom (b)", lambda: check_axiom_b(bases())),
        ("Block ideal independence", lambda: check_clx1_all(bases())),
        ("Meet below join (clx2)", lambda: check_clx2_all(rng_for("clx2"), bases())),
        ("Poset axioms", lambda: check_poset(universe())),
        ("Amalgamation and monotone algebras", lambda: check_amalgamation(universe())),
        ("Triple amalgamation", lambda: check_triples(rng_for("triples"))),
        ("Generator separation", lambda: check_generator_separation(universe())),
        ("Delta-systems and free sets", lambda: check_combinatorics(rng_for("combinatorics"))),
    ]

    results = []
    with Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        TaskProgressColumn(),
        console=console,
    ) as progress:
        task = progress.add_task("Checking...", total=len(checks))
        for name, check in checks:
            progress.update(task, description=f"Checking {name}...")
            started = time.perf_counter()
            try:
                ok, detail = check()
            except Exception as e:
                logger.exception(f"{name} raised")
                ok, detail = False, f"raised {type(e).__name__}: {e}"
            results.append((name, ok, detail, time.perf_counter() - started))
            progress.advance(task)

    console.print("\n")
    table = Table(title="Acceptance Results", show_header=True)
    table.add_column("#", justify="right")
    table.add_column("Check", style="cyan")
    table.add_column("Result")
    table.add_column("Detail", style="dim")
    table.add_column("Seconds", justify="right")
    for index, (name, ok, detail, seconds) in enumerate(results, start=1):
        table.add_row(str(index), name, "[green]PASS[/green]" if ok else "[red]FAIL[/red]", detail, f"{seconds:.1f}")
    console.print(table)
    console.print()

    failed = sum(1 for _, ok, _, _ in results if not ok)
    if failed == 0:
        console.print("[bold green]✓ All acceptance checks passed![/bold green]")
    else:
        console.print(f"[bold red]✗ {failed} check(s) failed[/bold red]")
    return 0 if failed == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
