"""Amalgamation of three isomorphic conditions over a common heart.

Given q0 <= q and two further copies q1, q2 of q0 placed around a heart u*
(the points all copies share), the constructions below build a condition r
above q, q1 and q2 whose algebra satisfies

    Q:  tau0 <= tau1 | tau2
    P:  tau1 & !tau2 <= tau0

where tau0 is an elementary conjunction over u^q0 and tau1, tau2 are its
copies. Each point of r records which construction case produced it.
"""

import logging
import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

from lib.algebra import HomRow, leq_counterexample
from lib.errors import PreconditionError, SizeBoundError
from lib.forcing import (
    Condition, ConditionIso, Flavor, GridPoint, OrderVerdict, PointFunction, PointLiteral, SParams,
    condition_algebra, condition_iso, condition_leq, cut_levels, evaluate_literals, glue, is_zero,
    literals_term, restrict, shift_above, shift_below, validate_condition, verify_upper_bound, zero_function,
)
from lib.terms import Not, conjunction

logger = logging.getLogger(__name__)

TRIPLE_RETRIES = 1000

# Wide enough for every shape the builders draw
DEFAULT_TRIPLE_PARAMS = SParams(chi=(7,) * 9, ucap=64)


@dataclass(frozen=True)
class TripleSetup:
    q: Condition
    q0: Condition
    q1: Condition
    q2: Condition
    tau0: Tuple[PointLiteral, ...]
    tau1: Tuple[PointLiteral, ...]
    tau2: Tuple[PointLiteral, ...]

    @property
    def flavor(self) -> Flavor:
        return self.q.flavor


@dataclass
class _Context:
    """Isomorphisms and shared data derived while validating a setup."""

    h01: ConditionIso
    h02: ConditionIso
    h12: ConditionIso
    heart: Set[GridPoint]
    heart_levels: Set[int]
    order: OrderVerdict

    @property
    def h10(self) -> ConditionIso:
        return self.h01.inverse()

    @property
    def h20(self) -> ConditionIso:
        return self.h02.inverse()

    @property
    def h21(self) -> ConditionIso:
        return self.h12.inverse()


@dataclass(frozen=True)
class TripleResult:
    """The amalgam, the case used at each of its points, and the inequality verdict."""

    condition: Condition
    cases: Dict[GridPoint, str] = field(hash=False)
    holds: bool
    counterexample: Optional[HomRow] = None


def _isos(setup: TripleSetup) -> Tuple[ConditionIso, ConditionIso, ConditionIso]:
    pairs = [(setup.q0, setup.q1, "q0 to q1"), (setup.q0, setup.q2, "q0 to q2"), (setup.q1, setup.q2, "q1 to q2")]
    isos = []
    for a, b, name in pairs:
        verdict = condition_iso(a, b)
        if not verdict.holds:
            raise PreconditionError("iso", f"{name}: {verdict.clause}: {verdict.detail}")
        common = [s for s in a.points if s in b]
        if not verdict.iso.fixes(common):
            raise PreconditionError("iso", f"{name} moves a common point")
        isos.append(verdict.iso)
    return isos[0], isos[1], isos[2]


def _common_setup(params: SParams, setup: TripleSetup, flavor: Flavor) -> Tuple[ConditionIso, ConditionIso, ConditionIso]:
    for c in (setup.q, setup.q0, setup.q1, setup.q2):
        if c.flavor is not flavor:
            raise ValueError(f"expected {flavor.value}-conditions")
    for name, c in (("q", setup.q), ("q0", setup.q0), ("q1", setup.q1), ("q2", setup.q2)):
        verdict = validate_condition(params, c)
        if not verdict.valid:
            raise PreconditionError("valid", f"{name}: {verdict.clause}: {verdict.detail}")
    return _isos(setup)


def _check_extends(params: SParams, setup: TripleSetup) -> OrderVerdict:
    order = condition_leq(params, setup.q0, setup.q)
    if not order.holds:
        raise PreconditionError("extends", f"q0 <= q fails: {order.clause}: {order.detail}")
    return order


def _check_terms(setup: TripleSetup, h01: ConditionIso, h02: ConditionIso):
    if any(point not in setup.q0 for point, _ in setup.tau0):
        raise PreconditionError("terms", "tau0 mentions a point outside u^q0")
    if tuple(setup.tau1) != h01.transport(setup.tau0):
        raise PreconditionError("terms", "tau1 is not the copy of tau0 in q1")
    if tuple(setup.tau2) != h02.transport(setup.tau0):
        raise PreconditionError("terms", "tau2 is not the copy of tau0 in q2")


def _check_cap(params: SParams, setup: TripleSetup):
    union = set(setup.q.points) | set(setup.q1.points) | set(setup.q2.points)
    if len(union) > params.ucap:
        raise PreconditionError("cap", f"|u^r| = {len(union)} exceeds {params.ucap}")


def validate_q_triple_setup(params: SParams, setup: TripleSetup) -> _Context:
    """Check the Q-setup hypotheses.

    Raises:
        PreconditionError: Labelled "valid", "iso", "heart", "extends",
            "levels", "columns", "signs", "terms" or "cap"
    """
    h01, h02, h12 = _common_setup(params, setup, Flavor.Q)
    u, u0, u1, u2 = (set(c.points) for c in (setup.q, setup.q0, setup.q1, setup.q2))
    heart = u0 & u1
    if u0 & u2 != heart or u1 & u2 != heart:
        raise PreconditionError("heart", "pairwise intersections of u^q0, u^q1, u^q2 differ")
    if u & u1 != heart or u & u2 != heart:
        raise PreconditionError("heart", "u^q meets u^q1 or u^q2 outside the heart")
    order = _check_extends(params, setup)

    heart_levels = {s.level for s in heart}
    top = max(heart_levels, default=-1)
    for name, c in (("q0", setup.q0), ("q1", setup.q1)):
        low = [level for level in c.levels if level not in heart_levels and level <= top]
        if low:
            raise PreconditionError("levels", f"level {low[0]} of {name} is outside the heart but not above it")
    outer = [level for level in setup.q2.levels if level not in heart_levels]
    if outer and max(setup.q.levels, default=-1) >= min(outer):
        raise PreconditionError("levels", "every level of q must lie below the new levels of q2")

    h10 = h01.inverse()
    for s in setup.q1.points:
        if s.level in heart_levels and not s <= h10.forward(s) <= h12.forward(s):
            raise PreconditionError("columns", f"{s}, its copy in q0 and its copy in q2 are out of order")

    for point, positive in setup.tau0:
        if point.level in heart_levels and positive:
            raise PreconditionError("signs", f"tau0 uses {point} positively on a heart level")
    _check_terms(setup, h01, h02)
    _check_cap(params, setup)
    return _Context(h01, h02, h12, heart, heart_levels, order)


def validate_p_triple_setup(params: SParams, setup: TripleSetup) -> _Context:
    """Check the P-setup hypotheses.

    Raises:
        PreconditionError: Labelled "valid", "iso", "heart", "extends",
            "levels", "shared", "columns", "terms" or "cap"
    """
    h01, h02, h12 = _common_setup(params, setup, Flavor.P)
    u, u0, u1, u2 = (set(c.points) for c in (setup.q, setup.q0, setup.q1, setup.q2))
    heart = u0 & u1
    if u0 & u2 != heart or u & u1 != heart or u & u2 != heart:
        raise PreconditionError("heart", "u^q0 and u^q meet u^q1, u^q2 in different sets")
    order = _check_extends(params, setup)

    if setup.q1.levels != setup.q2.levels:
        raise PreconditionError("levels", "q1 and q2 must have the same levels")
    heart_levels = {s.level for s in heart}
    top = max(heart_levels, default=-1)
    for name, c in (("q0", setup.q0), ("q1", setup.q1)):
        low = [level for level in c.levels if level not in heart_levels and level <= top]
        if low:
            raise PreconditionError("levels", f"level {low[0]} of {name} is outside the heart but not above it")
    outer = [level for level in setup.q1.levels if level not in heart_levels]
    if not outer:
        raise PreconditionError("levels", "q1 needs a level outside the heart")
    anchor = min(outer)
    if max(setup.q.levels, default=-1) >= anchor:
        raise PreconditionError("levels", f"every level of q must lie below level {anchor}")

    for level in setup.q1.levels:
        if level <= anchor and setup.q1.level_points(level) != setup.q2.level_points(level):
            raise PreconditionError("shared", f"q1 and q2 differ on level {level}")

    for name, iso in (("q1", h01.inverse()), ("q2", h02.inverse())):
        for s in iso.source:
            if not iso.forward(s) <= s:
                raise PreconditionError("columns", f"the copy in q0 of {s} from {name} comes after it")
    for s in setup.q1.points:
        if not h12.forward(s) >= s:
            raise PreconditionError("columns", f"the copy in q2 of {s} comes before it")

    _check_terms(setup, h01, h02)
    _check_cap(params, setup)
    return _Context(h01, h02, h12, heart, heart_levels, order)


def _postcondition(params: SParams, r: Condition, setup: TripleSetup) -> Optional[HomRow]:
    alg = condition_algebra(params, r)
    tau = [literals_term(r, literals) for literals in (setup.tau0, setup.tau1, setup.tau2)]
    if setup.flavor is Flavor.Q:
        return leq_counterexample(alg, tau[0], [tau[1], tau[2]])
    return leq_counterexample(alg, conjunction([tau[1], Not(tau[2])]), [tau[0]])


def _finish(params: SParams, setup: TripleSetup, functions: Dict[GridPoint, PointFunction], cases: Dict[GridPoint, str]) -> TripleResult:
    levels = set(setup.q.levels) | set(setup.q1.levels) | set(setup.q2.levels)
    r = Condition.build(setup.flavor, levels, functions)
    verify_upper_bound(params, r, setup.q, setup.q1, setup.q2)
    row = _postcondition(params, r, setup)
    if row is not None:
        logger.warning(f"Triple amalgam of {len(r.points)} point(s) violates its inequality")
    return TripleResult(r, cases, row is None, row)


def _q_other_copy(params: SParams, setup: TripleSetup, ctx: _Context) -> PointFunction:
    """A shift of a q2 function that vanishes on q2's heart-level points, preferring tau2 = 1."""
    q2 = setup.q2
    guarded = [t for t in q2.points if t.level in ctx.heart_levels]
    fallback = None
    for source in q2.points:
        f = q2.function(source)
        for eps in range(source.column, params.width(source.level) + 1):
            candidate = shift_below(f, source.level, eps)
            if any(candidate[t] for t in guarded):
                continue
            if evaluate_literals(candidate, setup.tau2):
                return candidate
            if fallback is None:
                fallback = candidate
    return fallback if fallback is not None else zero_function(q2.points)


def q_triple_amalgamate(params: SParams, setup: TripleSetup) -> TripleResult:
    """Build r above q, q1, q2 with tau0 <= tau1 | tau2 in B_r.

    Raises:
        PreconditionError: If the setup violates a hypothesis
    """
    ctx = validate_q_triple_setup(params, setup)
    q, q1, q2 = setup.q, setup.q1, setup.q2
    fq, f1, f2 = q.functions(), q1.functions(), q2.functions()
    h01, h02, h10, h12, h20, h21 = ctx.h01, ctx.h02, ctx.h10, ctx.h12, ctx.h20, ctx.h21
    heart_levels = ctx.heart_levels
    top = max(heart_levels, default=-1)

    functions: Dict[GridPoint, PointFunction] = {}
    cases: Dict[GridPoint, str] = {}
    for s in sorted(set(q.points) | set(q1.points) | set(q2.points)):
        i, xi = s
        if s in q1:
            if i in heart_levels:
                case, pieces = "1", [fq[h10.forward(s)], f1[s], f2[h12.forward(s)]]
            else:
                case, pieces = "2", [zero_function(q.points), f1[s], zero_function(q2.points)]
        elif s in q:
            if is_zero(restrict(fq[s], setup.q0.points)):
                case, pieces = "3-zero", [fq[s], zero_function(q1.points), zero_function(q2.points)]
            else:
                cert = ctx.order.certificate(s)
                source, eps = cert.source, cert.parameter
                j = source.level
                a1, a2 = f1[h01.forward(source)], f2[h02.forward(source)]
                if j in heart_levels and j < i <= top:
                    bound = params.width(j)
                    case, pieces = "3a", [fq[s], shift_below(a1, j, bound), shift_below(a2, j, bound)]
                elif j in heart_levels and i == j:
                    bound = max(eps, xi)
                    case, pieces = "3b", [fq[s], shift_below(a1, j, bound), shift_below(a2, j, bound)]
                elif j in heart_levels and i < j:
                    case, pieces = "3c", [fq[s], shift_below(a1, j, eps), shift_below(a2, j, eps)]
                else:
                    case, pieces = "3d", [fq[s], zero_function(q1.points), _q_other_copy(params, setup, ctx)]
        elif i in heart_levels:
            case, pieces = "4", [
                shift_below(fq[h20.forward(s)], i, xi),
                shift_below(f1[h21.forward(s)], i, xi),
                f2[s],
            ]
        else:
            case, pieces = "5", [zero_function(q.points), zero_function(q1.points), f2[s]]
        functions[s] = glue(s, pieces)
        cases[s] = case

    return _finish(params, setup, functions, cases)


def _eps_star(params: SParams, setup: TripleSetup, point: GridPoint) -> int:
    """Largest shift bound keeping tau0 true on the shifted q0 function, else the level width."""
    f0 = setup.q0.function(point)
    width = params.width(point.level)
    best = None
    for eps in range(width + 1):
        if evaluate_literals(shift_above(f0, point.level, eps), setup.tau0):
            best = eps
    return width if best is None else best


def p_triple_amalgamate(params: SParams, setup: TripleSetup) -> TripleResult:
    """Build r above q, q1, q2 with tau1 & !tau2 <= tau0 in B_r.

    Raises:
        PreconditionError: If the setup violates a hypothesis
    """
    ctx = validate_p_triple_setup(params, setup)
    q, q1, q2 = setup.q, setup.q1, setup.q2
    fq, f1, f2 = q.functions(), q1.functions(), q2.functions()
    h01, h02, h10, h12, h20, h21 = ctx.h01, ctx.h02, ctx.h10, ctx.h12, ctx.h20, ctx.h21
    heart_levels = ctx.heart_levels
    q_levels = set(q.levels)

    functions: Dict[GridPoint, PointFunction] = {}
    cases: Dict[GridPoint, str] = {}
    for s in sorted(set(q.points) | set(q1.points) | set(q2.points)):
        i, xi = s
        if s in q1 and s in q2:
            t = h10.forward(s)
            if i in q_levels:
                case, pieces = "1", [fq[t], f1[s], f2[s]]
            else:
                eps = _eps_star(params, setup, t)
                case, pieces = "2", [shift_above(fq[t], t.level, eps), f1[s], f2[s]]
        elif s in q2:
            t = h20.forward(s)
            eps = _eps_star(params, setup, t)
            case, pieces = "3", [shift_above(fq[t], t.level, eps), f1[h21.forward(s)], f2[s]]
        elif s in q1:
            t = h10.forward(s)
            eps = _eps_star(params, setup, t)
            copy = h12.forward(s)
            case, pieces = "4", [shift_above(fq[t], t.level, eps), f1[s], shift_above(f2[copy], copy.level, xi + 1)]
        elif is_zero(restrict(fq[s], setup.q0.points)):
            case, pieces = "5-zero", [fq[s], zero_function(q1.points), zero_function(q2.points)]
        else:
            cert = ctx.order.certificate(s)
            source = cert.source
            a1, a2 = f1[h01.forward(source)], f2[h02.forward(source)]
            if cert.case == "shift":
                if i in heart_levels:
                    case = "5a"
                    pieces = [fq[s], shift_above(a1, i, cert.parameter), shift_above(a2, i, cert.parameter)]
                else:
                    case, pieces = "5a", [fq[s], cut_levels(a1, i), cut_levels(a2, i)]
            elif cert.case == "shift-other":
                other = source.level
                if other in heart_levels and other < i:
                    case = "5b"
                    pieces = [fq[s], shift_above(a1, other, cert.parameter), shift_above(a2, other, cert.parameter)]
                else:
                    case, pieces = "5b", [fq[s], cut_levels(a1, i), cut_levels(a2, i)]
            else:
                cut = cert.parameter
                case, pieces = "5-cut", [fq[s], cut_levels(a1, cut), cut_levels(a2, cut)]
        functions[s] = glue(s, pieces)
        cases[s] = case

    return _finish(params, setup, functions, cases)


def triple_amalgamate(params: SParams, setup: TripleSetup) -> TripleResult:
    if setup.flavor is Flavor.Q:
        return q_triple_amalgamate(params, setup)
    return p_triple_amalgamate(params, setup)


# ---------------------------------------------------------------------------
# Instance builders
# ---------------------------------------------------------------------------

@dataclass
class _Layout:
    """One isomorphism type placed three times.

    Abstract points are numbered in grid order; placements[k][a] is the
    grid point of abstract point a in copy k.
    """

    flavor: Flavor
    placements: List[List[GridPoint]]
    levels: List[List[int]]
    q_only: List[int]


def _place_heart_level(rng: random.Random, level: int, width: int, order: Tuple[int, int, int]) -> Optional[List[List[GridPoint]]]:
    """Columns for one heart level; `order` ranks copies 0, 1, 2 inside each non-heart slot."""
    count = rng.randint(1, 3)
    shared = [True] + [rng.random() < 0.5 for _ in range(count - 1)]
    span = max(order) + 1
    columns: List[List[GridPoint]] = [[], [], []]
    column = 0
    for is_shared in shared:
        for k in range(3):
            columns[k].append(GridPoint(level, column if is_shared else column + order[k]))
        column += 1 if is_shared else span
    if column > width:
        return None
    return columns


def _own_columns(rng: random.Random, width: int) -> Optional[List[int]]:
    count = rng.randint(1, 3)
    if count > width:
        return None
    return list(range(count))


def _q_only_level(rng: random.Random, used: Sequence[int], below: int) -> List[int]:
    """At most one unused level under `below`, for the point q adds on a level of its own."""
    free = [level for level in range(below) if level not in used]
    if not free or rng.random() < 0.5:
        return []
    return [rng.choice(free)]


def _q_layout(rng: random.Random, params: SParams) -> Optional[_Layout]:
    hearts = rng.randint(0, 2)
    own = rng.randint(0 if hearts else 1, 2)
    needed = hearts + 3 * own
    if needed > params.level_count:
        return None
    chosen = sorted(rng.sample(range(params.level_count), needed))
    heart = chosen[:hearts]
    own1 = chosen[hearts:hearts + own]
    own0 = chosen[hearts + own:hearts + 2 * own]
    own2 = chosen[hearts + 2 * own:]
    q_only = _q_only_level(rng, chosen, min(own2, default=params.level_count))

    placements: List[List[GridPoint]] = [[], [], []]
    for level in heart:
        # copy 1 < copy 0 < copy 2 inside every non-heart slot
        columns = _place_heart_level(rng, level, params.width(level), (1, 0, 2))
        if columns is None:
            return None
        for k in range(3):
            placements[k].extend(columns[k])
    for a in range(own):
        columns = _own_columns(rng, min(params.width(own0[a]), params.width(own1[a]), params.width(own2[a])))
        if columns is None:
            return None
        for k, levels in ((0, own0), (1, own1), (2, own2)):
            placements[k].extend(GridPoint(levels[a], col) for col in columns)
    levels = [heart + own0, heart + own1, heart + own2]
    return _Layout(Flavor.Q, placements, levels, q_only)


def _p_layout(rng: random.Random, params: SParams) -> Optional[_Layout]:
    hearts = rng.randint(0, 2)
    own = rng.randint(1, 2)
    needed = hearts + 2 * own
    if needed > params.level_count:
        return None
    chosen = sorted(rng.sample(range(params.level_count), needed))
    heart = chosen[:hearts]
    own0 = chosen[hearts:hearts + own]
    own12 = chosen[hearts + own:]
    q_only = _q_only_level(rng, chosen, own12[0])

    placements: List[List[GridPoint]] = [[], [], []]
    for level in heart:
        # copy 0 first, copies 1 and 2 share the next column
        columns = _place_heart_level(rng, level, params.width(level), (0, 1, 1))
        if columns is None:
            return None
        for k in range(3):
            placements[k].extend(columns[k])
    for a in range(own):
        count = rng.randint(1, 3)
        split = [False] + [a > 0 and rng.random() < 0.5 for _ in range(count - 1)]
        columns1, columns2 = [], []
        column = 0
        for is_split in split:
            columns1.append(column)
            columns2.append(column + 1 if is_split else column)
            column += 2 if is_split else 1
        if column > params.width(own12[a]) or count > params.width(own0[a]):
            return None
        placements[0].extend(GridPoint(own0[a], col) for col in range(count))
        placements[1].extend(GridPoint(own12[a], col) for col in columns1)
        placements[2].extend(GridPoint(own12[a], col) for col in columns2)
    levels = [heart + own0, heart + own12, heart + own12]
    return _Layout(Flavor.P, placements, levels, q_only)


def _random_functions(rng: random.Random, flavor: Flavor, count: int) -> List[List[int]]:
    rows = []
    for a in range(count):
        row = []
        for b in range(count):
            if a == b:
                row.append(1)
            elif (flavor is Flavor.Q and b < a) or (flavor is Flavor.P and b > a):
                row.append(0)
            else:
                row.append(rng.randint(0, 1))
        rows.append(row)
    return rows


def _copy(layout: _Layout, k: int, rows: List[List[int]]) -> Condition:
    points = layout.placements[k]
    functions = {s: {t: rows[a][b] for b, t in enumerate(points)} for a, s in enumerate(points)}
    return Condition.build(layout.flavor, layout.levels[k], functions)


def _restriction_options(params: SParams, q0: Condition, point: GridPoint) -> List[PointFunction]:
    """Admissible restrictions to u^q0 for a new point of q."""
    options = [zero_function(q0.points)]
    same_level = point.level in set(q0.levels)
    sources = q0.level_points(point.level) if same_level else list(q0.points)
    for source in sources:
        f = q0.function(source)
        for eps in range(params.width(source.level) + 1):
            if q0.flavor is Flavor.Q:
                options.append(shift_below(f, source.level, eps))
            else:
                options.append(shift_above(f, source.level, eps))
        if q0.flavor is Flavor.P and not same_level:
            for cut in range(source.level + 1):
                options.append(cut_levels(f, cut))
    forced_zero = [t for t in q0.points if (t < point if q0.flavor is Flavor.Q else t > point)]
    return [f for f in options if not any(f[t] for t in forced_zero)]


def _extend(rng: random.Random, params: SParams, layout: _Layout, q0: Condition, taken: Set[GridPoint]) -> Condition:
    extra: List[GridPoint] = [GridPoint(level, 0) for level in layout.q_only]
    if rng.random() < 0.5:
        free = [
            GridPoint(level, col)
            for level in q0.levels
            for col in range(params.width(level))
            if GridPoint(level, col) not in taken
        ]
        if free:
            extra.append(rng.choice(free))
    flavor = q0.flavor
    points = sorted(set(q0.points) | set(extra))

    def forced(s: GridPoint, t: GridPoint) -> bool:
        return t < s if flavor is Flavor.Q else t > s

    functions: Dict[GridPoint, PointFunction] = {}
    for s in q0.points:
        f = q0.function(s)
        for t in extra:
            f[t] = 0 if forced(s, t) else rng.randint(0, 1)
        functions[s] = f
    for t in extra:
        f = dict(rng.choice(_restriction_options(params, q0, t)))
        for other in extra:
            f[other] = 1 if other == t else (0 if forced(t, other) else rng.randint(0, 1))
        functions[t] = f
    return Condition.build(flavor, set(q0.levels) | set(layout.q_only), {s: functions[s] for s in points})


def _random_tau(rng: random.Random, q0: Condition, heart_levels: Set[int]) -> Tuple[PointLiteral, ...]:
    count = rng.randint(1, min(3, len(q0.points)))
    points = sorted(rng.sample(list(q0.points), count))
    literals = []
    for point in points:
        if q0.flavor is Flavor.Q and point.level in heart_levels:
            literals.append((point, False))
        else:
            literals.append((point, rng.random() < 0.5))
    return tuple(literals)


def _build(rng: random.Random, params: SParams, flavor: Flavor) -> Optional[TripleSetup]:
    layout = _q_layout(rng, params) if flavor is Flavor.Q else _p_layout(rng, params)
    if layout is None or not layout.placements[0]:
        return None
    rows = _random_functions(rng, flavor, len(layout.placements[0]))
    q0, q1, q2 = (_copy(layout, k, rows) for k in range(3))
    taken = set(q0.points) | set(q1.points) | set(q2.points)
    q = _extend(rng, params, layout, q0, taken)
    heart_levels = {s.level for s in set(q0.points) & set(q1.points)}
    tau0 = _random_tau(rng, q0, heart_levels)
    h01 = condition_iso(q0, q1).iso
    h02 = condition_iso(q0, q2).iso
    if h01 is None or h02 is None:
        return None
    return TripleSetup(q, q0, q1, q2, tau0, h01.transport(tau0), h02.transport(tau0))


def build_triple_instance(
    rng: random.Random,
    flavor: Flavor,
    params: SParams = DEFAULT_TRIPLE_PARAMS,
    retries: int = TRIPLE_RETRIES,
) -> TripleSetup:
    """Draw setups until one passes every hypothesis of the flavor.

    Raises:
        SizeBoundError: If the retry cap is exhausted
    """
    validate = validate_q_triple_setup if flavor is Flavor.Q else validate_p_triple_setup
    for attempt in range(retries):
        setup = _build(rng, params, flavor)
        if setup is None:
            continue
        try:
            validate(params, setup)
        except PreconditionError as e:
            logger.info(f"Rejected {flavor.value}-triple draw: {e}")
            continue
        logger.debug(f"Built {flavor.value}-triple instance after {attempt + 1} draw(s)")
        return setup
    logger.warning(f"No valid {flavor.value}-triple instance in {retries} draws")
    raise SizeBoundError(f"{flavor.value}-triple draws", retries, retries)


def build_q_triple_instance(rng: random.Random, params: SParams = DEFAULT_TRIPLE_PARAMS) -> TripleSetup:
    return build_triple_instance(rng, Flavor.Q, params)


def build_p_triple_instance(rng: random.Random, params: SParams = DEFAULT_TRIPLE_PARAMS) -> TripleSetup:
    return build_triple_instance(rng, Flavor.P, params)


def case_counts(results: Sequence[TripleResult]) -> Dict[str, int]:
    """How often each construction case was used across results."""
    counts: Dict[str, int] = {}
    for result in results:
        for case in result.cases.values():
            counts[case] = counts.get(case, 0) + 1
    return dict(sorted(counts.items()))
