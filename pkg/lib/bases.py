"""Finite bases (eta, A), the algebra they determine, and its claims.

A base assigns to every index alpha < L a string eta_alpha of length d over
the digits 0..m-1, and fixes a set A of shorter strings (split nodes).
Indices are grouped into blocks by the boundaries chi_0 = 0 < ... < chi_J.
The row f_alpha of the derived algebra is 1 at beta when beta = alpha, or
when eta_alpha and eta_beta split inside A and eta_alpha comes first in
lexicographic order.
"""

import logging
import random
from dataclasses import dataclass, field
from itertools import combinations, product
from math import comb
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

from lib.algebra import HomRow, PresentedAlgebra, leq_counterexample
from lib.errors import PreconditionError, SizeBoundError
from lib.separation import SeparationKind, SequenceWitness, witness_homomorphisms
from lib.terms import Term, Var, elementary

logger = logging.getLogger(__name__)

DEFAULT_MAX_ENUM = 200000
CLX2_RETRIES = 10000


def common_prefix(s: str, t: str) -> str:
    """Longest common initial segment of two strings."""
    length = 0
    for a, b in zip(s, t):
        if a != b:
            break
        length += 1
    return s[:length]


def lex_less(s: str, t: str) -> bool:
    """Strict lexicographic order on strings of equal length.

    Raises:
        ValueError: If the lengths differ
    """
    if len(s) != len(t):
        raise ValueError(f"cannot compare strings of lengths {len(s)} and {len(t)}")
    return s < t


def is_strict_prefix(s: str, t: str) -> bool:
    return len(s) < len(t) and t.startswith(s)


def all_strings(alphabet: int, length: int) -> Iterator[str]:
    digits = "0123456789"[:alphabet]
    for letters in product(digits, repeat=length):
        yield "".join(letters)


@dataclass(frozen=True)
class BlockParams:
    """String depth d, alphabet size m and block boundaries chi_0 = 0 < ... < chi_J."""

    depth: int
    alphabet: int
    chi: Tuple[int, ...]

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError(f"depth must be positive, got {self.depth}")
        if not 1 <= self.alphabet <= 10:
            raise ValueError(f"alphabet must be between 1 and 10, got {self.alphabet}")
        if len(self.chi) < 2 or self.chi[0] != 0:
            raise ValueError("chi must start at 0 and have at least one block")
        if any(a >= b for a, b in zip(self.chi, self.chi[1:])):
            raise ValueError(f"chi must be strictly increasing: {list(self.chi)}")

    @property
    def size(self) -> int:
        """L, the number of indices."""
        return self.chi[-1]

    @property
    def block_count(self) -> int:
        return len(self.chi) - 1

    def block_of(self, alpha: int) -> int:
        """j(alpha): the block i with chi_i <= alpha < chi_(i+1)."""
        if not 0 <= alpha < self.size:
            raise IndexError(f"index {alpha} outside 0..{self.size - 1}")
        for i in range(self.block_count):
            if alpha < self.chi[i + 1]:
                return i
        raise AssertionError("unreachable")

    def blocks(self) -> Iterator[Tuple[int, range]]:
        """Non-empty blocks as (block number, index range)."""
        for i in range(self.block_count):
            members = range(self.chi[i], self.chi[i + 1])
            if len(members):
                yield i, members


@dataclass(frozen=True)
class Base:
    """Equal-length strings eta_alpha plus a set A of split strings."""

    params: BlockParams
    eta: Tuple[str, ...]
    split_set: FrozenSet[str]

    def __post_init__(self):
        params = self.params
        if len(self.eta) != params.size:
            raise ValueError(f"{len(self.eta)} eta string(s) for {params.size} indices")
        digits = "0123456789"[:params.alphabet]
        for alpha, eta in enumerate(self.eta):
            if len(eta) != params.depth or any(ch not in digits for ch in eta):
                raise ValueError(f"eta {alpha} = {eta!r} is not a length-{params.depth} string over {params.alphabet} letter(s)")
        for node in self.split_set:
            if len(node) >= params.depth or any(ch not in digits for ch in node):
                raise ValueError(f"split string {node!r} is not shorter than depth {params.depth} over the alphabet")
        for _, members in params.blocks():
            seen: Dict[str, int] = {}
            for alpha in members:
                if self.eta[alpha] in seen:
                    raise ValueError(f"eta {seen[self.eta[alpha]]} and eta {alpha} are equal inside one block")
                seen[self.eta[alpha]] = alpha

    def meet(self, alpha: int, beta: int) -> str:
        return common_prefix(self.eta[alpha], self.eta[beta])

    def splits(self, alpha: int, beta: int) -> bool:
        """Whether eta_alpha and eta_beta split at a node of A."""
        return alpha != beta and self.meet(alpha, beta) in self.split_set


def _check_distinct(name: str, strings: Sequence[str]):
    seen = set()
    for string in strings:
        if string in seen:
            raise ValueError(f"{name} strings must be pairwise distinct; {string!r} repeats")
        seen.add(string)


def marked_interleaved_base(
    nu: Sequence[str],
    rho: Sequence[str],
    marks: Sequence[int],
    params: BlockParams,
) -> Base:
    """Interleave block strings nu and index strings rho along a set of marked positions.

    Position xi of eta_alpha reads nu_(j(alpha)) when xi is marked and rho_alpha
    otherwise, each consumed in order. A holds the strings whose length is
    marked, so two indices of one block split at an unmarked length.

    Raises:
        ValueError: On wrong counts or lengths, or repeated nu/rho strings
    """
    depth = params.depth
    marked = sorted(set(marks))
    if any(not 0 <= xi < depth for xi in marked):
        raise ValueError(f"marks must lie in 0..{depth - 1}")
    if len(nu) != params.block_count:
        raise ValueError(f"{len(nu)} nu string(s) for {params.block_count} block(s)")
    if len(rho) != params.size:
        raise ValueError(f"{len(rho)} rho string(s) for {params.size} indices")
    if any(len(s) != len(marked) for s in nu):
        raise ValueError(f"nu strings must have length {len(marked)}")
    if any(len(s) != depth - len(marked) for s in rho):
        raise ValueError(f"rho strings must have length {depth - len(marked)}")
    _check_distinct("nu", nu)
    _check_distinct("rho", rho)

    mark_set = set(marked)
    eta = []
    for alpha in range(params.size):
        block_string = nu[params.block_of(alpha)]
        letters = []
        used_marked = used_free = 0
        for xi in range(depth):
            if xi in mark_set:
                letters.append(block_string[used_marked])
                used_marked += 1
            else:
                letters.append(rho[alpha][used_free])
                used_free += 1
        eta.append("".join(letters))

    split_set = frozenset(
        string for length in marked for string in all_strings(params.alphabet, length)
    )
    return Base(params, tuple(eta), split_set)


def interleaved_base(nu: Sequence[str], rho: Sequence[str], params: BlockParams) -> Base:
    """eta_alpha(2 xi) = nu_(j(alpha))(xi), eta_alpha(2 xi + 1) = rho_alpha(xi); A = even-length strings.

    Raises:
        ValueError: If the depth is odd or nu/rho are malformed
    """
    if params.depth % 2:
        raise ValueError(f"interleaving needs an even depth, got {params.depth}")
    return marked_interleaved_base(nu, rho, range(0, params.depth, 2), params)


def random_distinct_strings(rng: random.Random, count: int, alphabet: int, length: int) -> List[str]:
    if count > alphabet ** length:
        raise ValueError(f"only {alphabet ** length} distinct strings of length {length}")
    pool = list(all_strings(alphabet, length))
    return rng.sample(pool, count)


def random_interleaved_base(rng: random.Random, depth: int, alphabet: int, max_size: int) -> Base:
    """A random interleaved base with at most max_size indices and random block boundaries."""
    half = depth // 2
    size = rng.randint(1, min(max_size, alphabet ** half))
    blocks = rng.randint(1, min(size, alphabet ** half))
    inner = sorted(rng.sample(range(1, size), blocks - 1)) if blocks > 1 else []
    params = BlockParams(depth, alphabet, tuple([0] + inner + [size]))
    nu = random_distinct_strings(rng, blocks, alphabet, half)
    rho = random_distinct_strings(rng, size, alphabet, half)
    return interleaved_base(nu, rho, params)


def f_b_row(base: Base, alpha: int) -> HomRow:
    """The row f_alpha over all L indices."""
    if not 0 <= alpha < base.params.size:
        raise IndexError(f"index {alpha} outside 0..{base.params.size - 1}")
    row = []
    for beta in range(base.params.size):
        if beta == alpha:
            row.append(1)
        elif base.splits(alpha, beta) and lex_less(base.eta[alpha], base.eta[beta]):
            row.append(1)
        else:
            row.append(0)
    return tuple(row)


def algebra_from_base(base: Base) -> PresentedAlgebra:
    rows = [f_b_row(base, alpha) for alpha in range(base.params.size)]
    return PresentedAlgebra.create(base.params.size, rows)


# ---------------------------------------------------------------------------
# Base axioms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BaseVerdict:
    """Outcome of one base axiom.

    Attributes:
        axiom: "b", "c" or "c+"
        witness: On failure, the counterexample: {"pair", "meet"} for (b),
            {"subset"} for (c) and {"subset", "t"} for (c+)
    """

    axiom: str
    holds: bool
    witness: Optional[Dict] = None


def _has_split_pair(base: Base, subset: Sequence[int]) -> bool:
    return any(base.splits(a, b) for a, b in combinations(subset, 2))


def _has_directed_pair(base: Base, subset: Sequence[int], t: int) -> bool:
    for a, b in combinations(sorted(subset), 2):
        if base.splits(a, b) and lex_less(base.eta[a], base.eta[b]) == (t == 0):
            return True
    return False


def _check_b(base: Base) -> BaseVerdict:
    for _, members in base.params.blocks():
        for alpha, beta in combinations(members, 2):
            meet = base.meet(alpha, beta)
            if meet in base.split_set:
                return BaseVerdict("b", False, {"pair": [alpha, beta], "meet": meet})
    return BaseVerdict("b", True)


def check_base(base: Base, y0: int, plus: bool = False, max_enum: int = DEFAULT_MAX_ENUM) -> List[BaseVerdict]:
    """Check axiom (b) and the size-y0 readings of (c) and, with plus, (c+).

    Every subset of y0 indices is tried, in lexicographic order, so the
    reported subset is the first failing one.

    Raises:
        ValueError: If y0 exceeds the number of indices
        SizeBoundError: If there are more than max_enum subsets to try
    """
    size = base.params.size
    if not 0 <= y0 <= size:
        raise ValueError(f"y0 must lie in 0..{size}, got {y0}")
    total = comb(size, y0)
    if total > max_enum:
        raise SizeBoundError(f"subsets of size {y0} among {size} indices", total, max_enum)

    verdicts = [_check_b(base)]
    failed_c: Optional[Dict] = None
    failed_plus: Optional[Dict] = None
    for subset in combinations(range(size), y0):
        if failed_c is None and not _has_split_pair(base, subset):
            failed_c = {"subset": list(subset)}
        if plus and failed_plus is None:
            for t in (0, 1):
                if not _has_directed_pair(base, subset, t):
                    failed_plus = {"subset": list(subset), "t": t}
                    break
        if failed_c is not None and (failed_plus is not None or not plus):
            break

    verdicts.append(BaseVerdict("c", failed_c is None, failed_c))
    if plus:
        verdicts.append(BaseVerdict("c+", failed_plus is None, failed_plus))
    for verdict in verdicts:
        logger.info(f"axiom ({verdict.axiom}): {'holds' if verdict.holds else 'fails'}")
    return verdicts


def replay_counterexample(base: Base, verdict: BaseVerdict) -> bool:
    """Re-check a failing verdict's witness; True when it still refutes the axiom."""
    if verdict.holds or verdict.witness is None:
        return False
    witness = verdict.witness
    if verdict.axiom == "b":
        alpha, beta = witness["pair"]
        same_block = base.params.block_of(alpha) == base.params.block_of(beta)
        return alpha != beta and same_block and base.meet(alpha, beta) in base.split_set
    if verdict.axiom == "c":
        return not _has_split_pair(base, witness["subset"])
    if verdict.axiom == "c+":
        return not _has_directed_pair(base, witness["subset"], witness["t"])
    raise ValueError(f"unknown axiom {verdict.axiom!r}")


# ---------------------------------------------------------------------------
# Claims on the derived algebra
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BlockVerdict:
    block: int
    indices: Tuple[int, ...]
    witness: SequenceWitness

    @property
    def holds(self) -> bool:
        return self.witness.ok


def check_clx1(base: Base) -> List[BlockVerdict]:
    """Ideal independence of each block's generator sequence in the derived algebra."""
    alg = algebra_from_base(base)
    verdicts = []
    for block, members in base.params.blocks():
        seq = [Var(alpha) for alpha in members]
        witness = witness_homomorphisms(alg, seq, SeparationKind.IDEAL_INDEPENDENT)
        if not witness.ok:
            logger.info(f"block {block} is not ideal-independent (refused at {witness.refused_at})")
        verdicts.append(BlockVerdict(block, tuple(members), witness))
    return verdicts


@dataclass(frozen=True)
class Clx2Config:
    """Prefixes sigma_k, indices alpha_k, rows alpha_(l,k) and signs t(k).

    alpha_rows[l][k] is alpha_(l,k); sign 0 keeps a generator positive and
    sign 1 negates it.
    """

    sigmas: Tuple[str, ...]
    alphas: Tuple[int, ...]
    alpha_rows: Tuple[Tuple[int, ...], ...]
    signs: Tuple[int, ...]

    def lhs(self) -> Term:
        return elementary([(alpha, t == 0) for alpha, t in zip(self.alphas, self.signs)])

    def rhs(self) -> List[Term]:
        return [
            elementary([(alpha, t == 0) for alpha, t in zip(row, self.signs)])
            for row in self.alpha_rows
        ]


@dataclass(frozen=True)
class Clx2Verdict:
    config: Clx2Config
    holds: bool
    counterexample: Optional[HomRow] = None
    cases: Tuple[str, ...] = field(default=())


def _split_chain(base: Base, alpha: int, column: Sequence[int]) -> Optional[Tuple[int, int, int]]:
    """Positions l1, l2, l3 in column satisfying the split-chain clause for alpha."""
    eta = base.eta
    meets = [common_prefix(eta[alpha], eta[beta]) for beta in column]
    for l1, l2, l3 in product(range(len(column)), repeat=3):
        m1, m2, m3 = meets[l1], meets[l2], meets[l3]
        if not (is_strict_prefix(m1, m2) and is_strict_prefix(m2, m3)):
            continue
        if m1 not in base.split_set or m2 not in base.split_set:
            continue
        if lex_less(eta[column[l1]], eta[alpha]) and lex_less(eta[alpha], eta[column[l2]]):
            return l1, l2, l3
    return None


def clx2_cases(base: Base, config: Clx2Config) -> Tuple[str, ...]:
    """Which clause covers each k: "i" (repeated index) or "ii" (split chain)."""
    cases = []
    for k, alpha in enumerate(config.alphas):
        column = [row[k] for row in config.alpha_rows]
        if alpha in column:
            cases.append("i")
        elif _split_chain(base, alpha, column) is not None:
            cases.append("ii")
        else:
            raise PreconditionError("(gamma)", f"position {k}: alpha {alpha} neither repeats in its column nor has a split chain")
    return tuple(cases)


def validate_clx2_config(base: Base, config: Clx2Config) -> Tuple[str, ...]:
    """Check the config's hypotheses; returns the clause used at each position.

    Raises:
        PreconditionError: Labelled "(alpha)", "(beta)" or "(gamma)"
    """
    k_star = len(config.alphas)
    if len(config.sigmas) != k_star or len(config.signs) != k_star:
        raise PreconditionError("shape", "sigmas, alphas and signs must have the same length")
    if any(len(row) != k_star for row in config.alpha_rows):
        raise PreconditionError("shape", f"every row needs {k_star} entries")
    if any(t not in (0, 1) for t in config.signs):
        raise PreconditionError("shape", "signs must be 0 or 1")
    size = base.params.size
    for alpha in list(config.alphas) + [a for row in config.alpha_rows for a in row]:
        if not 0 <= alpha < size:
            raise PreconditionError("shape", f"index {alpha} outside 0..{size - 1}")

    for a, b in combinations(range(k_star), 2):
        s, t = config.sigmas[a], config.sigmas[b]
        if s.startswith(t) or t.startswith(s):
            raise PreconditionError("(alpha)", f"sigma {a} = {s!r} and sigma {b} = {t!r} are comparable")

    for k, sigma in enumerate(config.sigmas):
        members = [config.alphas[k]] + [row[k] for row in config.alpha_rows]
        for alpha in members:
            if not is_strict_prefix(sigma, base.eta[alpha]):
                raise PreconditionError("(beta)", f"sigma {k} = {sigma!r} is not a proper prefix of eta {alpha}")

    return clx2_cases(base, config)


def check_clx2_config(base: Base, config: Clx2Config) -> Clx2Verdict:
    """Validate the config, then decide the meet-below-join inequality in the derived algebra."""
    cases = validate_clx2_config(base, config)
    alg = algebra_from_base(base)
    row = leq_counterexample(alg, config.lhs(), config.rhs())
    return Clx2Verdict(config, row is None, row, cases)


def _random_split_chain(
    base: Base,
    rng: random.Random,
    alpha: int,
    candidates: Sequence[int],
) -> Optional[Tuple[int, int, int]]:
    """A random (l1, l2, l3) drawn from candidates satisfying the split-chain clause for alpha.

    Every meet with eta_alpha is a prefix of it, so the prefix chain is an
    ordering by length.
    """
    eta = base.eta
    meets = {beta: len(common_prefix(eta[alpha], eta[beta])) for beta in candidates}
    split = [beta for beta in candidates if eta[alpha][:meets[beta]] in base.split_set]
    lows = [beta for beta in split if lex_less(eta[beta], eta[alpha])]
    highs = [beta for beta in split if lex_less(eta[alpha], eta[beta])]
    chains = [
        (l1, l2, l3)
        for l1 in lows
        for l2 in highs
        if meets[l1] < meets[l2]
        for l3 in candidates
        if meets[l3] > meets[l2]
    ]
    return rng.choice(chains) if chains else None


def _sample_clx2(
    base: Base,
    rng: random.Random,
    k_star: int,
    l_star: int,
    case: Optional[str] = None,
) -> Optional[Clx2Config]:
    depth = base.params.depth
    size = base.params.size
    prefix_length = rng.randrange(depth)
    prefixes = sorted({eta[:prefix_length] for eta in base.eta})
    if len(prefixes) < k_star:
        return None
    sigmas = rng.sample(prefixes, k_star)

    alphas = []
    columns = []
    for sigma in sigmas:
        under = [alpha for alpha in range(size) if base.eta[alpha].startswith(sigma)]
        alpha = rng.choice(under)
        others = [beta for beta in under if beta != alpha]
        chain = None
        if case == "ii" or (case is None and l_star >= 3 and rng.random() < 0.5):
            chain = _random_split_chain(base, rng, alpha, others)
            if chain is None and case == "ii":
                return None
        if chain is not None:
            pool = others if case == "ii" else under
            column = [rng.choice(pool) for _ in range(l_star)]
            for spot, beta in zip(rng.sample(range(l_star), 3), chain):
                column[spot] = beta
        else:
            column = [rng.choice(under) for _ in range(l_star)]
            column[rng.randrange(l_star)] = alpha
        alphas.append(alpha)
        columns.append(column)

    rows = tuple(tuple(column[l] for column in columns) for l in range(l_star))
    signs = tuple(rng.randint(0, 1) for _ in range(k_star))
    return Clx2Config(tuple(sigmas), tuple(alphas), rows, signs)


def random_clx2_config(
    base: Base,
    rng: random.Random,
    k_star: int = 2,
    l_star: int = 3,
    retries: int = CLX2_RETRIES,
    case: Optional[str] = None,
) -> Clx2Config:
    """Rejection-sample a config satisfying clauses (alpha), (beta) and (gamma).

    With case "i" every position repeats alpha in its column; with case "ii"
    every position is covered by a split chain instead. By default the two
    are mixed.

    Raises:
        ValueError: On non-positive sizes, an unknown case, or case "ii" with l_star < 3
        SizeBoundError: If no valid config turns up within the retry cap
    """
    if k_star < 1 or l_star < 1:
        raise ValueError("k_star and l_star must be positive")
    if case not in (None, "i", "ii"):
        raise ValueError(f"unknown clx2 case {case!r}")
    if case == "ii" and l_star < 3:
        raise ValueError(f"a split chain needs three rows, l_star is {l_star}")
    for attempt in range(retries):
        config = _sample_clx2(base, rng, k_star, l_star, case)
        if config is None:
            continue
        try:
            cases = validate_clx2_config(base, config)
        except PreconditionError as e:
            logger.info(f"Rejected sampled config: {e}")
            continue
        if case is not None and set(cases) != {case}:
            continue
        logger.debug(f"Sampled clx2 config after {attempt + 1} attempt(s)")
        return config
    logger.warning(f"No valid clx2 config in {retries} attempts")
    raise SizeBoundError("clx2 sampling attempts", retries, retries)
