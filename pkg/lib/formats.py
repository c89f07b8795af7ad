"""Loaders and canonical printers for the balab text formats.

Every format is line based: `#` starts a comment that runs to the end of
the line and blank lines are ignored. Versioned formats open with a
header line (`algebra v1`, `base v1`, `qcond v1`, `pcond v1`). Printers
emit the canonical form, so load followed by print is stable.
"""

import logging
import re
from pathlib import Path
from typing import Dict, Iterator, List, NamedTuple, Optional, Sequence, Tuple, Union

from lib.algebra import PresentedAlgebra, row_bits
from lib.bases import Base, BlockParams
from lib.errors import FormatError
from lib.forcing import DEFAULT_UCAP, Condition, Flavor, GridPoint, PointLiteral, SParams

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

_POINT = re.compile(r"\(\s*(\d+)\s*,\s*(\d+)\s*\)")
_LITERAL = re.compile(r"(!?)\(\s*(\d+)\s*,\s*(\d+)\s*\)")
_BITS = re.compile(r"[01]+")

CONDITION_HEADERS = {Flavor.Q: "qcond v1", Flavor.P: "pcond v1"}


class _Line(NamedTuple):
    number: int
    text: str
    raw: str

    def keyword(self) -> str:
        return self.text.split(None, 1)[0]

    def rest(self) -> str:
        parts = self.text.split(None, 1)
        return parts[1] if len(parts) > 1 else ""

    def column_of(self, token: str) -> int:
        found = self.raw.find(token)
        return found + 1 if found >= 0 else 1

    def error(self, message: str, token: Optional[str] = None) -> FormatError:
        return FormatError(message, self.number, self.column_of(token) if token else 1)


def read_text(path: PathLike) -> str:
    """Read a whole input file.

    Raises:
        FormatError: If the file cannot be read
    """
    try:
        return Path(path).read_text(encoding="utf-8")
    except (IOError, UnicodeDecodeError) as e:
        raise FormatError(f"cannot read {path}: {e}")


def write_text(path: PathLike, text: str):
    Path(path).write_text(text, encoding="utf-8")
    logger.info(f"Wrote {path}")


def _lines(text: str) -> Iterator[_Line]:
    for number, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0].strip()
        if content:
            yield _Line(number, content, raw)


def _expect_header(lines: List[_Line], *headers: str) -> str:
    if not lines:
        raise FormatError(f"empty input, expected header {' or '.join(repr(h) for h in headers)}")
    found = " ".join(lines[0].text.split())
    if found not in headers:
        raise lines[0].error(f"unknown header {lines[0].text!r}, expected {' or '.join(repr(h) for h in headers)}")
    return found


def _int(line: _Line, token: str, what: str) -> int:
    if not token.isascii() or not token.isdigit():
        raise line.error(f"{what} must be a non-negative integer, got {token!r}", token)
    return int(token)


def _ints(line: _Line, tokens: Sequence[str], what: str) -> List[int]:
    return [_int(line, token, what) for token in tokens]


# ---------------------------------------------------------------------------
# Algebras
# ---------------------------------------------------------------------------

def parse_algebra(text: str) -> PresentedAlgebra:
    """Parse an `algebra v1` document.

    Duplicate `f` rows are dropped (the algebra records how many).

    Raises:
        FormatError: On a bad header, a missing `w` line or a malformed row
    """
    lines = list(_lines(text))
    _expect_header(lines, "algebra v1")
    size: Optional[int] = None
    rows = []
    for line in lines[1:]:
        keyword, rest = line.keyword(), line.rest()
        if keyword == "w":
            if size is not None:
                raise line.error("duplicate w line")
            tokens = rest.split()
            if len(tokens) != 1:
                raise line.error("w takes exactly one generator count")
            size = _int(line, tokens[0], "generator count")
        elif keyword == "f":
            if size is None:
                raise line.error("f row before the w line")
            if not _BITS.fullmatch(rest):
                raise line.error(f"not a bitstring: {rest!r}", rest or None)
            if len(rest) != size:
                raise line.error(f"row has length {len(rest)}, expected {size}", rest)
            rows.append(tuple(int(ch) for ch in rest))
        else:
            raise line.error(f"unexpected line {keyword!r} in algebra file", keyword)
    if size is None:
        raise FormatError("algebra file has no w line")
    alg = PresentedAlgebra.create(size, rows)
    if alg.dropped:
        logger.info(f"Algebra file listed {alg.dropped} duplicate row(s); kept {len(alg.rows)}")
    return alg


def format_algebra(alg: PresentedAlgebra) -> str:
    out = ["algebra v1", f"w {alg.size}"]
    out.extend(f"f {row_bits(row)}" for row in alg.rows)
    return "\n".join(out) + "\n"


def load_algebra(path: PathLike) -> PresentedAlgebra:
    return parse_algebra(read_text(path))


# ---------------------------------------------------------------------------
# Bases
# ---------------------------------------------------------------------------

def _string_token(token: str) -> str:
    return "" if token == "-" else token


def parse_base(text: str) -> Base:
    """Parse a `base v1` document.

    Raises:
        FormatError: On a bad header, missing fields or a base that fails its own invariants
    """
    lines = list(_lines(text))
    _expect_header(lines, "base v1")
    depth = alphabet = None
    chi: Optional[List[int]] = None
    split_set = set()
    eta: Dict[int, str] = {}
    for line in lines[1:]:
        keyword, tokens = line.keyword(), line.rest().split()
        if keyword in ("depth", "alphabet"):
            if len(tokens) != 1:
                raise line.error(f"{keyword} takes one value")
            value = _int(line, tokens[0], keyword)
            if keyword == "depth":
                depth = value
            else:
                alphabet = value
        elif keyword == "chi":
            chi = _ints(line, tokens, "block boundary")
        elif keyword == "A":
            if len(tokens) != 1:
                raise line.error("A takes one string (use - for the empty string)")
            split_set.add(_string_token(tokens[0]))
        elif keyword == "eta":
            if len(tokens) != 2:
                raise line.error("eta takes an index and a string")
            index = _int(line, tokens[0], "eta index")
            if index in eta:
                raise line.error(f"eta {index} given twice", tokens[0])
            eta[index] = _string_token(tokens[1])
        else:
            raise line.error(f"unexpected line {keyword!r} in base file", keyword)
    if depth is None or alphabet is None or chi is None:
        raise FormatError("base file needs depth, alphabet and chi lines")
    try:
        params = BlockParams(depth, alphabet, tuple(chi))
    except ValueError as e:
        raise FormatError(f"bad block parameters: {e}")
    missing = [alpha for alpha in range(params.size) if alpha not in eta]
    extra = sorted(alpha for alpha in eta if alpha >= params.size)
    if missing or extra:
        raise FormatError(f"eta indices must be exactly 0..{params.size - 1} (missing {missing}, extra {extra})")
    try:
        return Base(params, tuple(eta[alpha] for alpha in range(params.size)), frozenset(split_set))
    except ValueError as e:
        raise FormatError(f"invalid base: {e}")


def format_base(base: Base) -> str:
    params = base.params
    out = [
        "base v1",
        f"depth {params.depth}",
        f"alphabet {params.alphabet}",
        "chi " + " ".join(str(c) for c in params.chi),
    ]
    out.extend(f"A {node or '-'}" for node in sorted(base.split_set, key=lambda s: (len(s), s)))
    out.extend(f"eta {alpha} {eta or '-'}" for alpha, eta in enumerate(base.eta))
    return "\n".join(out) + "\n"


def load_base(path: PathLike) -> Base:
    return parse_base(read_text(path))


def parse_strings(text: str) -> List[str]:
    """One string per line; `-` is the empty string."""
    strings = []
    for line in _lines(text):
        tokens = line.text.split()
        if len(tokens) != 1:
            raise line.error("expected exactly one string per line")
        strings.append(_string_token(tokens[0]))
    return strings


def format_strings(strings: Sequence[str]) -> str:
    return "".join(f"{s or '-'}\n" for s in strings)


def load_strings(path: PathLike) -> List[str]:
    return parse_strings(read_text(path))


# ---------------------------------------------------------------------------
# Forcing conditions
# ---------------------------------------------------------------------------

def _points(line: _Line, text: str) -> List[GridPoint]:
    points = []
    position = 0
    for match in _POINT.finditer(text):
        if text[position:match.start()].strip():
            bad = text[position:match.start()].strip()
            raise line.error(f"expected a point (i,xi), got {bad!r}", bad)
        points.append(GridPoint(int(match.group(1)), int(match.group(2))))
        position = match.end()
    if text[position:].strip():
        bad = text[position:].strip()
        raise line.error(f"expected a point (i,xi), got {bad!r}", bad)
    return points


def parse_condition(text: str) -> Tuple[SParams, Condition]:
    """Parse a `qcond v1` or `pcond v1` document.

    The `ucap` line is optional. `u` must list the points in grid order and
    each point needs exactly one `f` line, whose bits follow the order of u.
    The result is not validated against the flavor's clauses.

    Raises:
        FormatError: On a bad header, an unsorted u or a malformed f line
    """
    lines = list(_lines(text))
    header = _expect_header(lines, *CONDITION_HEADERS.values())
    flavor = Flavor.Q if header == CONDITION_HEADERS[Flavor.Q] else Flavor.P
    chi: Optional[List[int]] = None
    ucap = DEFAULT_UCAP
    levels: Optional[List[int]] = None
    points: Optional[List[GridPoint]] = None
    rows: Dict[GridPoint, Tuple[int, ...]] = {}
    for line in lines[1:]:
        keyword, rest = line.keyword(), line.rest()
        if keyword == "chi":
            chi = _ints(line, rest.split(), "level width")
        elif keyword == "ucap":
            tokens = rest.split()
            if len(tokens) != 1:
                raise line.error("ucap takes one value")
            ucap = _int(line, tokens[0], "ucap")
        elif keyword == "w":
            levels = _ints(line, rest.split(), "level")
            if levels != sorted(set(levels)):
                raise line.error("w must list distinct levels in increasing order")
        elif keyword == "u":
            points = _points(line, rest)
            if points != sorted(set(points)):
                raise line.error("u must list distinct points in grid order")
        elif keyword == "f":
            if points is None:
                raise line.error("f line before the u line")
            head, sep, bits = rest.partition(":")
            found = _points(line, head)
            if not sep or len(found) != 1:
                raise line.error("expected f (i,xi): BITSTRING")
            point = found[0]
            bits = bits.strip()
            if point not in points:
                raise line.error(f"f line for {point}, which is not in u", head.strip())
            if not _BITS.fullmatch(bits) or len(bits) != len(points):
                raise line.error(f"f {point} needs a bitstring of length {len(points)}", bits or None)
            row = tuple(int(ch) for ch in bits)
            if point in rows:
                if rows[point] != row:
                    raise line.error(f"conflicting f lines for {point}")
                logger.info(f"Line {line.number}: duplicate f line for {point} ignored")
                continue
            rows[point] = row
        else:
            raise line.error(f"unexpected line {keyword!r} in condition file", keyword)
    if chi is None or levels is None or points is None:
        raise FormatError("condition file needs chi, w and u lines")
    missing = [str(point) for point in points if point not in rows]
    if missing:
        raise FormatError(f"no f line for {', '.join(missing)}")
    try:
        params = SParams(tuple(chi), ucap)
        condition = Condition(flavor, tuple(levels), tuple(points), tuple(rows[point] for point in points))
    except ValueError as e:
        raise FormatError(str(e))
    return params, condition


def format_condition(params: SParams, c: Condition) -> str:
    out = [
        CONDITION_HEADERS[c.flavor],
        "chi " + " ".join(str(width) for width in params.chi),
    ]
    if params.ucap != DEFAULT_UCAP:
        out.append(f"ucap {params.ucap}")
    out.append(("w " + " ".join(str(level) for level in c.levels)).rstrip())
    out.append(("u " + " ".join(str(point) for point in c.points)).rstrip())
    out.extend(f"f {point}: {row_bits(row)}" for point, row in zip(c.points, c.rows))
    return "\n".join(out) + "\n"


def load_condition(path: PathLike) -> Tuple[SParams, Condition]:
    return parse_condition(read_text(path))


def parse_literals(line: _Line, text: str) -> Tuple[PointLiteral, ...]:
    literals = []
    position = 0
    for match in _LITERAL.finditer(text):
        if text[position:match.start()].strip(" &"):
            bad = text[position:match.start()].strip()
            raise line.error(f"expected a literal (i,xi) or !(i,xi), got {bad!r}", bad)
        point = GridPoint(int(match.group(2)), int(match.group(3)))
        literals.append((point, match.group(1) != "!"))
        position = match.end()
    if text[position:].strip(" &"):
        bad = text[position:].strip()
        raise line.error(f"expected a literal (i,xi) or !(i,xi), got {bad!r}", bad)
    return tuple(literals)


def parse_tau(text: str) -> Dict[str, Tuple[PointLiteral, ...]]:
    """Parse `tau0 …`, `tau1 …`, `tau2 …` lines of point literals joined by `&`.

    Raises:
        FormatError: If a line is malformed or one of the three is missing
    """
    found: Dict[str, Tuple[PointLiteral, ...]] = {}
    for line in _lines(text):
        keyword = line.keyword()
        if keyword not in ("tau0", "tau1", "tau2"):
            raise line.error(f"unexpected line {keyword!r} in tau file", keyword)
        if keyword in found:
            raise line.error(f"duplicate {keyword} line")
        found[keyword] = parse_literals(line, line.rest())
    missing = [name for name in ("tau0", "tau1", "tau2") if name not in found]
    if missing:
        raise FormatError(f"tau file is missing {', '.join(missing)}")
    return found


def format_literals(literals: Sequence[PointLiteral]) -> str:
    return " & ".join(f"{'' if positive else '!'}{point}" for point, positive in literals)


def format_tau(tau0: Sequence[PointLiteral], tau1: Sequence[PointLiteral], tau2: Sequence[PointLiteral]) -> str:
    return "".join(f"{name} {format_literals(literals)}\n" for name, literals in (("tau0", tau0), ("tau1", tau1), ("tau2", tau2)))


def load_tau(path: PathLike) -> Dict[str, Tuple[PointLiteral, ...]]:
    return parse_tau(read_text(path))


# ---------------------------------------------------------------------------
# Families and set maps
# ---------------------------------------------------------------------------

def parse_family(text: str) -> List[List[int]]:
    """One member per line as whitespace-separated integers; `-` is the empty member.

    Members keep their listed order, so the same layout serves sequences.
    """
    members = []
    for line in _lines(text):
        tokens = line.text.split()
        if tokens == ["-"]:
            members.append([])
        else:
            members.append(_ints(line, tokens, "element"))
    return members


def format_family(members: Sequence[Sequence[int]]) -> str:
    return "".join((" ".join(str(x) for x in member) or "-") + "\n" for member in members)


def load_family(path: PathLike) -> List[List[int]]:
    return parse_family(read_text(path))


def parse_setmap(text: str) -> Dict[int, List[int]]:
    """Lines `y: e1 e2 …`; an empty image is written `y:`.

    Raises:
        FormatError: If a line lacks the colon or repeats a key
    """
    setmap: Dict[int, List[int]] = {}
    for line in _lines(text):
        head, sep, tail = line.text.partition(":")
        if not sep:
            raise line.error("expected y: e1 e2 ...")
        y = _int(line, head.strip(), "key")
        if y in setmap:
            raise line.error(f"key {y} given twice", head.strip())
        setmap[y] = _ints(line, tail.split(), "element")
    return setmap


def format_setmap(setmap: Dict[int, Sequence[int]]) -> str:
    return "".join(f"{y}: {' '.join(str(e) for e in sorted(setmap[y]))}".rstrip() + "\n" for y in sorted(setmap))


def load_setmap(path: PathLike) -> Dict[int, List[int]]:
    return parse_setmap(read_text(path))
