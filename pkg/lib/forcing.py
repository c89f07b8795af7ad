"""Finite forcing conditions on the grid of (level, column) points.

A condition is a triple (w, u, f): a set w of levels, a finite set u of grid
points on those levels, and for every s in u a 0/1 function f_s on u. The
two flavors differ in where f_s must vanish:

    Q: f_s is 0 on every point of u that precedes s
    P: f_s is 0 on every point of u that follows s

Points are ordered lexicographically by (level, column); GridPoint tuples
compare that way natively.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations, product
from typing import Dict, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple

from lib.algebra import PresentedAlgebra, subalgebra_reason
from lib.errors import ConstructionError, PreconditionError, SizeBoundError
from lib.separation import SeparationKind, SequenceWitness, witness_homomorphisms
from lib.terms import Term, Var, elementary

logger = logging.getLogger(__name__)

DEFAULT_UCAP = 64
DEFAULT_MAX_ENUM = 200000


class Flavor(Enum):
    Q = "q"
    P = "p"


class GridPoint(NamedTuple):
    level: int
    column: int

    def __str__(self) -> str:
        return f"({self.level},{self.column})"


PointFunction = Dict[GridPoint, int]

# (point, positive?) -- an elementary conjunction over condition points
PointLiteral = Tuple[GridPoint, bool]


@dataclass(frozen=True)
class SParams:
    """Level widths chi_0..chi_(J-1) and the cap on |u|."""

    chi: Tuple[int, ...]
    ucap: int = DEFAULT_UCAP

    def __post_init__(self):
        if not self.chi:
            raise ValueError("at least one level is required")
        if any(width < 1 for width in self.chi):
            raise ValueError(f"level widths must be positive: {list(self.chi)}")
        if self.ucap < 1:
            raise ValueError(f"ucap must be positive, got {self.ucap}")

    @property
    def level_count(self) -> int:
        return len(self.chi)

    def width(self, level: int) -> int:
        return self.chi[level]

    def contains(self, point: GridPoint) -> bool:
        return 0 <= point.level < len(self.chi) and 0 <= point.column < self.chi[point.level]


@dataclass(frozen=True)
class Condition:
    """A condition (w, u, f) with u sorted and rows[k] = f_(points[k]) over points."""

    flavor: Flavor
    levels: Tuple[int, ...]
    points: Tuple[GridPoint, ...]
    rows: Tuple[Tuple[int, ...], ...]
    _index: Dict[GridPoint, int] = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if list(self.levels) != sorted(set(self.levels)):
            raise ValueError(f"levels must be sorted and distinct: {list(self.levels)}")
        if list(self.points) != sorted(set(self.points)):
            raise ValueError("points must be sorted and distinct")
        if len(self.rows) != len(self.points):
            raise ValueError(f"{len(self.rows)} function(s) for {len(self.points)} point(s)")
        for point, row in zip(self.points, self.rows):
            if len(row) != len(self.points) or any(bit not in (0, 1) for bit in row):
                raise ValueError(f"function of {point} must be a bit row of length {len(self.points)}")
        object.__setattr__(self, "_index", {point: k for k, point in enumerate(self.points)})

    @classmethod
    def build(
        cls,
        flavor: Flavor,
        levels: Iterable[int],
        functions: Mapping[GridPoint, Mapping[GridPoint, int]],
    ) -> "Condition":
        """Assemble a condition from per-point functions (missing values read as 0)."""
        points = tuple(sorted(GridPoint(*point) for point in functions))
        rows = tuple(
            tuple(int(functions[s].get(t, 0)) for t in points)
            for s in points
        )
        return cls(flavor, tuple(sorted(set(levels))), points, rows)

    def __contains__(self, point) -> bool:
        return point in self._index

    def index_of(self, point: GridPoint) -> int:
        return self._index[point]

    def function(self, point: GridPoint) -> PointFunction:
        return dict(zip(self.points, self.rows[self._index[point]]))

    def functions(self) -> Dict[GridPoint, PointFunction]:
        return {point: self.function(point) for point in self.points}

    def level_points(self, level: int) -> List[GridPoint]:
        return [point for point in self.points if point.level == level]


# ---------------------------------------------------------------------------
# Validity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConditionVerdict:
    """Outcome of validate_condition.

    On failure point is the offending point, and row is its function over u
    when the clause concerns that function.
    """

    valid: bool
    clause: Optional[str] = None
    detail: str = ""
    point: Optional[GridPoint] = None
    row: Optional[Tuple[int, ...]] = None


def _vanishes_on(flavor: Flavor, s: GridPoint, t: GridPoint) -> bool:
    """Whether f_s must be 0 at t."""
    if flavor is Flavor.Q:
        return t < s
    return s < t


def validate_condition(params: SParams, c: Condition) -> ConditionVerdict:
    """Report the first violated clause of the flavor's definition, if any."""
    for point in c.points:
        if not params.contains(point):
            return ConditionVerdict(False, "grid", f"point {point} is outside the grid", point)
    for level in c.levels:
        if not 0 <= level < params.level_count:
            return ConditionVerdict(False, "grid", f"level {level} is outside 0..{params.level_count - 1}")
    if len(c.points) > params.ucap:
        return ConditionVerdict(False, "(a)", f"|u| = {len(c.points)} exceeds the cap {params.ucap}")
    levels = set(c.levels)
    for level in c.levels:
        if GridPoint(level, 0) not in c:
            return ConditionVerdict(False, "(b)", f"level {level} is in w but ({level},0) is not in u", GridPoint(level, 0))
    for point in c.points:
        if point.level not in levels:
            return ConditionVerdict(False, "(b)", f"point {point} lies on level {point.level} outside w", point)
    for s, row in zip(c.points, c.rows):
        f = c.function(s)
        if f[s] != 1:
            return ConditionVerdict(False, "(c)", f"f_{s}({s}) = 0", s, row)
        for t in c.points:
            if _vanishes_on(c.flavor, s, t) and f[t]:
                return ConditionVerdict(False, "(c)", f"f_{s}({t}) = 1 but must be 0", s, row)
    return ConditionVerdict(True)


def _require_valid(params: SParams, *conditions: Condition):
    for c in conditions:
        verdict = validate_condition(params, c)
        if not verdict.valid:
            raise PreconditionError("valid", f"{verdict.clause}: {verdict.detail}")


# ---------------------------------------------------------------------------
# Shifts
# ---------------------------------------------------------------------------

def shift_below(f: Mapping[GridPoint, int], level: int, eps: int) -> PointFunction:
    """Zero f on the points of `level` with column < eps."""
    return {s: 0 if s.level == level and s.column < eps else v for s, v in f.items()}


def shift_above(f: Mapping[GridPoint, int], level: int, eps: int) -> PointFunction:
    """Zero f on the points of `level` with column >= eps."""
    return {s: 0 if s.level == level and s.column >= eps else v for s, v in f.items()}


def cut_levels(f: Mapping[GridPoint, int], level: int) -> PointFunction:
    """Zero f on every level >= `level`."""
    return {s: 0 if s.level >= level else v for s, v in f.items()}


def restrict(f: Mapping[GridPoint, int], domain: Iterable[GridPoint]) -> PointFunction:
    return {s: f[s] for s in domain}


def zero_function(domain: Iterable[GridPoint]) -> PointFunction:
    return {s: 0 for s in domain}


def is_zero(f: Mapping[GridPoint, int]) -> bool:
    return not any(f.values())


def evaluate_literals(f: Mapping[GridPoint, int], literals: Sequence[PointLiteral]) -> int:
    """Value of the elementary conjunction under f."""
    return 1 if all(bool(f[point]) == positive for point, positive in literals) else 0


def literals_term(c: Condition, literals: Sequence[PointLiteral]) -> Term:
    """The conjunction as a term over the generators of the condition's algebra."""
    return elementary([(c.index_of(point), positive) for point, positive in literals])


# ---------------------------------------------------------------------------
# Order
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PointCertificate:
    """How f^q_t restricted to u^p is obtained from p.

    case is one of "zero", "shift" (source on the same level),
    "shift-other" (source on another level) or "cut"; parameter is the
    shift bound or the cut level.
    """

    point: GridPoint
    case: str
    source: Optional[GridPoint] = None
    parameter: Optional[int] = None

    def __str__(self) -> str:
        if self.case == "zero":
            return f"{self.point}: zero"
        return f"{self.point}: {self.case} from {self.source} at {self.parameter}"


@dataclass(frozen=True)
class OrderVerdict:
    """Outcome of condition_leq.

    On failure point names the offending point; for clauses (beta) and
    (gamma) row is f^q at that point restricted to u^p, in the point order of p.
    """

    holds: bool
    clause: Optional[str] = None
    detail: str = ""
    certificates: Tuple[PointCertificate, ...] = ()
    point: Optional[GridPoint] = None
    row: Optional[Tuple[int, ...]] = None

    def certificate(self, point: GridPoint) -> PointCertificate:
        for cert in self.certificates:
            if cert.point == point:
                return cert
        raise KeyError(point)


def represent(params: SParams, p: Condition, point: GridPoint, target: Mapping[GridPoint, int]) -> Optional[PointCertificate]:
    """Find how a function restricted to u^p arises from p, for a point of the larger condition.

    Sources are tried in grid order and parameters in increasing order, so
    the returned shift (or cut) parameter is the smallest one available for
    the first source that works.
    """
    target = dict(target)
    if is_zero(target):
        return PointCertificate(point, "zero")
    functions = p.functions()
    same_level = point.level in set(p.levels)
    sources = p.level_points(point.level) if same_level else list(p.points)
    case = "shift" if same_level else "shift-other"

    if p.flavor is Flavor.Q:
        for source in sources:
            for eps in range(params.width(source.level) + 1):
                if shift_below(functions[source], source.level, eps) == target:
                    # below the source's own column the shift changes nothing
                    return PointCertificate(point, case, source, max(eps, source.column))
        return None

    for source in sources:
        for eps in range(params.width(source.level) + 1):
            if shift_above(functions[source], source.level, eps) == target:
                return PointCertificate(point, case, source, eps)
    if same_level:
        return None
    for source in sources:
        for cut in range(source.level + 1):
            if cut_levels(functions[source], cut) == target:
                return PointCertificate(point, "cut", source, cut)
    return None


def condition_leq(params: SParams, p: Condition, q: Condition) -> OrderVerdict:
    """Decide p <= q, with a certificate for every point of u^q.

    Raises:
        ValueError: If the flavors differ
        PreconditionError: If either condition is invalid
    """
    if p.flavor is not q.flavor:
        raise ValueError("conditions of different flavors are not comparable")
    _require_valid(params, p, q)

    if not set(p.levels) <= set(q.levels):
        missing = sorted(set(p.levels) - set(q.levels))
        return OrderVerdict(False, "(alpha)", f"level(s) {missing} of p missing from q")
    missing_points = [s for s in p.points if s not in q]
    if missing_points:
        return OrderVerdict(False, "(alpha)", f"point {missing_points[0]} of p missing from q", point=missing_points[0])

    for s in p.points:
        restricted = restrict(q.function(s), p.points)
        if restricted != p.function(s):
            row = tuple(restricted[t] for t in p.points)
            return OrderVerdict(False, "(beta)", f"f_{s} of q does not extend f_{s} of p", point=s, row=row)

    certificates = []
    for t in q.points:
        restricted = restrict(q.function(t), p.points)
        cert = represent(params, p, t, restricted)
        if cert is None:
            detail = f"f_{t} of q restricted to u^p is no admissible shift"
            row = tuple(restricted[s] for s in p.points)
            return OrderVerdict(False, "(gamma)", detail, tuple(certificates), t, row)
        certificates.append(cert)
    return OrderVerdict(True, certificates=tuple(certificates))


def q_leq(params: SParams, p: Condition, q: Condition) -> OrderVerdict:
    if p.flavor is not Flavor.Q:
        raise ValueError("q_leq expects Q-conditions")
    return condition_leq(params, p, q)


def p_leq(params: SParams, p: Condition, q: Condition) -> OrderVerdict:
    if p.flavor is not Flavor.P:
        raise ValueError("p_leq expects P-conditions")
    return condition_leq(params, p, q)


# ---------------------------------------------------------------------------
# Isomorphism
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConditionIso:
    """The order isomorphism between two u-sets, as aligned point tuples."""

    source: Tuple[GridPoint, ...]
    target: Tuple[GridPoint, ...]

    @property
    def mapping(self) -> Dict[GridPoint, GridPoint]:
        return dict(zip(self.source, self.target))

    def forward(self, point: GridPoint) -> GridPoint:
        return self.mapping[point]

    def backward(self, point: GridPoint) -> GridPoint:
        return dict(zip(self.target, self.source))[point]

    def inverse(self) -> "ConditionIso":
        return ConditionIso(self.target, self.source)

    def then(self, other: "ConditionIso") -> "ConditionIso":
        """This map followed by `other`."""
        after = other.mapping
        return ConditionIso(self.source, tuple(after[t] for t in self.target))

    def fixes(self, points: Iterable[GridPoint]) -> bool:
        mapping = self.mapping
        return all(mapping[s] == s for s in points)

    def transport(self, literals: Sequence[PointLiteral]) -> Tuple[PointLiteral, ...]:
        mapping = self.mapping
        return tuple((mapping[point], positive) for point, positive in literals)


@dataclass(frozen=True)
class IsoVerdict:
    holds: bool
    iso: Optional[ConditionIso] = None
    clause: Optional[str] = None
    detail: str = ""


def condition_iso(p: Condition, q: Condition) -> IsoVerdict:
    """The isomorphism from p to q, or the clause it fails."""
    if p.flavor is not q.flavor:
        return IsoVerdict(False, clause="flavor", detail="conditions of different flavors")
    if len(p.points) != len(q.points):
        return IsoVerdict(False, clause="order", detail=f"|u^p| = {len(p.points)} but |u^q| = {len(q.points)}")
    iso = ConditionIso(p.points, q.points)
    for s, t in zip(p.points, q.points):
        if (s.column == 0) != (t.column == 0):
            return IsoVerdict(False, clause="(alpha)", detail=f"{s} maps to {t}")
    for k in range(len(p.points)):
        if p.rows[k] != q.rows[k]:
            return IsoVerdict(False, clause="(beta)", detail=f"f_{p.points[k]} is not carried to f_{q.points[k]}")
    return IsoVerdict(True, iso)


def _require_iso(p: Condition, q: Condition, iso: Optional[ConditionIso], label: str = "iso") -> ConditionIso:
    verdict = condition_iso(p, q)
    if not verdict.holds:
        raise PreconditionError(label, f"{verdict.clause}: {verdict.detail}")
    if iso is not None and iso != verdict.iso:
        raise PreconditionError(label, "the given map is not the isomorphism of the u-sets")
    return verdict.iso


# ---------------------------------------------------------------------------
# Amalgamation of isomorphic pairs
# ---------------------------------------------------------------------------

def glue(point: GridPoint, pieces: Sequence[Mapping[GridPoint, int]]) -> PointFunction:
    """Union of partial functions that must agree where their domains overlap.

    Raises:
        ConstructionError: If two pieces disagree at a shared point
    """
    result: PointFunction = {}
    for piece in pieces:
        for t, value in piece.items():
            if result.get(t, value) != value:
                raise ConstructionError(f"pieces of f_{point} disagree at {t}", point)
            result[t] = value
    return result


def _check_pair_setup(params: SParams, p: Condition, q: Condition, iso: Optional[ConditionIso]) -> ConditionIso:
    _require_valid(params, p, q)
    iso = _require_iso(p, q, iso)
    overlap = [s for s in p.points if s in q]
    if not iso.fixes(overlap):
        raise PreconditionError("overlap", "the isomorphism moves a common point")
    union = set(p.points) | set(q.points)
    if len(union) > params.ucap:
        raise PreconditionError("cap", f"|u^p | u^q| = {len(union)} exceeds {params.ucap}")
    return iso


def verify_upper_bound(params: SParams, r: Condition, *below: Condition):
    verdict = validate_condition(params, r)
    if not verdict.valid:
        raise ConstructionError(f"amalgam is not a condition: {verdict.clause}: {verdict.detail}", verdict.point)
    for k, c in enumerate(below):
        order = condition_leq(params, c, r)
        if not order.holds:
            raise ConstructionError(f"amalgam does not extend input {k}: {order.clause}: {order.detail}", order.point)


def q_pair_amalgamate(params: SParams, p: Condition, q: Condition, iso: Optional[ConditionIso] = None) -> Condition:
    """Common upper bound of two isomorphic Q-conditions.

    Hypotheses: the isomorphism fixes u^p & u^q; every common level lies
    below every level of p alone, which lies below every level of q alone;
    the union fits under the cap.

    Raises:
        PreconditionError: Labelled "valid", "iso", "overlap", "levels" or "cap"
    """
    if p.flavor is not Flavor.Q or q.flavor is not Flavor.Q:
        raise ValueError("q_pair_amalgamate expects Q-conditions")
    iso = _check_pair_setup(params, p, q, iso)
    common = set(p.levels) & set(q.levels)
    p_only = set(p.levels) - common
    q_only = set(q.levels) - common
    if (common and p_only and max(common) >= min(p_only)) or (p_only and q_only and max(p_only) >= min(q_only)) \
            or (common and q_only and max(common) >= min(q_only)):
        raise PreconditionError("levels", "common levels < levels of p alone < levels of q alone is required")

    fp, fq = p.functions(), q.functions()
    functions = {}
    for s in sorted(set(p.points) | set(q.points)):
        if s in p and s.level in common:
            image = iso.forward(s)
            pieces = [fp[s], shift_below(fq[image], image.level, s.column)]
        elif s in q and s.level in common:
            origin = iso.backward(s)
            pieces = [shift_below(fp[origin], origin.level, s.column), fq[s]]
        elif s in p:
            pieces = [fp[s], fq[iso.forward(s)]]
        else:
            pieces = [zero_function(p.points), fq[s]]
        functions[s] = glue(s, pieces)

    r = Condition.build(Flavor.Q, set(p.levels) | set(q.levels), functions)
    verify_upper_bound(params, r, p, q)
    logger.info(f"Amalgamated Q-conditions into |u| = {len(r.points)}")
    return r


def p_pair_amalgamate(params: SParams, p: Condition, q: Condition, iso: Optional[ConditionIso] = None) -> Condition:
    """Common upper bound of two isomorphic P-conditions.

    Raises:
        PreconditionError: Labelled "valid", "iso", "overlap" or "cap"
    """
    if p.flavor is not Flavor.P or q.flavor is not Flavor.P:
        raise ValueError("p_pair_amalgamate expects P-conditions")
    iso = _check_pair_setup(params, p, q, iso)
    common = set(p.levels) & set(q.levels)

    fp, fq = p.functions(), q.functions()
    functions = {}
    for s in sorted(set(p.points) | set(q.points)):
        if s in p and s.level in common:
            image = iso.forward(s)
            pieces = [fp[s], shift_above(fq[image], image.level, s.column + 1)]
        elif s in q and s.level in common:
            origin = iso.backward(s)
            pieces = [shift_above(fp[origin], origin.level, s.column + 1), fq[s]]
        elif s in p:
            pieces = [fp[s], cut_levels(fq[iso.forward(s)], s.level)]
        else:
            pieces = [cut_levels(fp[iso.backward(s)], s.level), fq[s]]
        functions[s] = glue(s, pieces)

    r = Condition.build(Flavor.P, set(p.levels) | set(q.levels), functions)
    verify_upper_bound(params, r, p, q)
    logger.info(f"Amalgamated P-conditions into |u| = {len(r.points)}")
    return r


def pair_amalgamate(params: SParams, p: Condition, q: Condition, iso: Optional[ConditionIso] = None) -> Condition:
    if p.flavor is Flavor.Q:
        return q_pair_amalgamate(params, p, q, iso)
    return p_pair_amalgamate(params, p, q, iso)


# ---------------------------------------------------------------------------
# Condition algebras
# ---------------------------------------------------------------------------

def condition_rows(params: SParams, c: Condition) -> List[PointFunction]:
    """The row family F^c, before deduplication.

    Both flavors start from the zero row, so the empty condition has one row.
    Q: every f_s shifted below each bound 0..chi_i.
    P: every f_s shifted above each bound 0..chi_i, and cut at each level <= i.
    """
    rows: List[PointFunction] = [zero_function(c.points)]
    for s in c.points:
        f = c.function(s)
        for eps in range(params.width(s.level) + 1):
            if c.flavor is Flavor.Q:
                rows.append(shift_below(f, s.level, eps))
            else:
                rows.append(shift_above(f, s.level, eps))
        if c.flavor is Flavor.P:
            for level in range(s.level + 1):
                rows.append(cut_levels(f, level))
    return rows


def condition_algebra(params: SParams, c: Condition) -> PresentedAlgebra:
    """B_c over the points of u in grid order, labelled "(i,xi)"."""
    rows = [tuple(f[s] for s in c.points) for f in condition_rows(params, c)]
    return PresentedAlgebra.create(len(c.points), rows, labels=[str(s) for s in c.points])


def chain_union_algebra(params: SParams, chain: Sequence[Condition]) -> PresentedAlgebra:
    """The algebra of the top of an increasing chain, checking each link embeds.

    Raises:
        PreconditionError: Clause "chain" naming the first index that does not extend its predecessor
        ConstructionError: If some link's algebra is not a subalgebra of the next
    """
    if not chain:
        raise ValueError("chain is empty")
    algebra = condition_algebra(params, chain[0])
    for k in range(1, len(chain)):
        order = condition_leq(params, chain[k - 1], chain[k])
        if not order.holds:
            raise PreconditionError("chain", f"element {k} does not extend element {k - 1}: {order.clause}: {order.detail}")
        bigger = condition_algebra(params, chain[k])
        reason = subalgebra_reason(algebra, bigger)
        if reason is not None:
            raise ConstructionError(f"algebra of element {k - 1} does not embed into element {k}: {reason}")
        algebra = bigger
    return algebra


def generator_separation(params: SParams, c: Condition) -> SequenceWitness:
    """Generators in grid order: right-separated for Q, left-separated for P."""
    alg = condition_algebra(params, c)
    kind = SeparationKind.RIGHT_SEPARATED if c.flavor is Flavor.Q else SeparationKind.LEFT_SEPARATED
    return witness_homomorphisms(alg, [Var(k) for k in range(len(c.points))], kind)


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------

def _point_sets(params: SParams, levels: Sequence[int]) -> Iterable[Tuple[GridPoint, ...]]:
    anchors = [GridPoint(level, 0) for level in levels]
    optional = [GridPoint(level, col) for level in levels for col in range(1, params.width(level))]
    for size in range(len(optional) + 1):
        if len(anchors) + size > params.ucap:
            break
        for extra in combinations(optional, size):
            yield tuple(sorted(anchors + list(extra)))


def _free_positions(flavor: Flavor, points: Sequence[GridPoint]) -> List[List[int]]:
    free = []
    for s in points:
        free.append([k for k, t in enumerate(points) if t != s and not _vanishes_on(flavor, s, t)])
    return free


def enumerate_conditions(params: SParams, flavor: Flavor, max_enum: int = DEFAULT_MAX_ENUM) -> List[Condition]:
    """Every valid condition at the given parameters, ordered by (|u|, points, functions).

    Raises:
        SizeBoundError: If more than max_enum conditions would be produced
    """
    shapes = []
    total = 0
    for count in range(params.level_count + 1):
        for levels in combinations(range(params.level_count), count):
            for points in _point_sets(params, levels):
                free = _free_positions(flavor, points)
                total += 2 ** sum(len(positions) for positions in free)
                if total > max_enum:
                    raise SizeBoundError("conditions to enumerate", total, max_enum)
                shapes.append((levels, points, free))

    conditions = []
    for levels, points, free in shapes:
        per_point = []
        for k, positions in enumerate(free):
            options = []
            for bits in product((0, 1), repeat=len(positions)):
                row = [0] * len(points)
                row[k] = 1
                for position, bit in zip(positions, bits):
                    row[position] = bit
                options.append(tuple(row))
            per_point.append(options)
        for rows in product(*per_point):
            conditions.append(Condition(flavor, tuple(levels), points, tuple(rows)))

    conditions.sort(key=lambda c: (len(c.points), c.points, c.rows))
    logger.info(f"Enumerated {len(conditions)} {flavor.value}-condition(s)")
    return conditions
