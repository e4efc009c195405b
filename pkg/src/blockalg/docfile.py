"""Line-oriented documents and object expressions for the command line.

A document is plain text read one line at a time: comments run from
`#` to the end of the line, blank lines are skipped, and every other
line either opens a named section (``space {``), closes one (``}``),
or binds a key inside the open section (``key = value``).  Sections
never nest; a bare top-level ``seed = N`` is the one binding allowed
outside a section.

Recognized sections:

    space   { catalog = <name> }  or an inline definition with
            name =, top =, and one ``series = NAME CLASS SIZE`` line
            per series (CLASS one of k1/k0/kr, SIZE a count or
            ``infinite``; optional trailing ``lam=-1`` and ``step=K``)
    object  { cell = EXPR }  or an inline definition with
            default = zero|free|localized, vertex = d:k pairs,
            twist = SERIES:PARAM:VALUE lines, and (zero default only)
            stalk = SERIES PARAM MODULES lines
    window  { min = A  max = B }
    task    { run = <command name> }
    seed    bare ``seed = N`` or a section with value = N

Object expressions name the built-in constructions:

    sigma_G                     the monoidal unit
    constQ                      the constant object (same data)
    zero                        the zero object
    sigma_F(SERIES[, N])        the member cell at one member
    e(Q) | e(d:k[, d:k ...])    vertex skyscraper on the given lines
    f(SERIES, N, MODULES)       member skyscraper with the given stalk

where MODULES is a sum like ``torsion(0,2)+divisible(-2)``; free(a)
and laurent(a) name the other families, and over rational stalks
free(a) is the one-dimensional module in degree a.
"""

from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .linear import FiniteGroupData, GradedQSpace, QRepresentation
from .model import (
    DefaultKind,
    ModelObject,
    StalkData,
    _semilinear_identity,
    cell_sigma_F,
    cell_sigma_G,
    skyscraper_e,
    skyscraper_f,
    zero_object,
)
from .spaces import (
    CATALOG_NAMES,
    IsotropySpace,
    Member,
    MultiplicativeElement,
    SeriesData,
    catalog,
)
from .stalks import CModule, Indecomposable, StalkRing

Q = Fraction


class ParseError(ValueError):
    """Document syntax error, located by 1-based line and column."""

    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class DocumentError(ValueError):
    """Schema error in an otherwise well-formed document."""

    def __init__(self, message: str, line: Optional[int] = None):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


class ExpressionError(ValueError):
    """Malformed object expression."""


@dataclass(frozen=True)
class Entry:
    key: str
    value: str
    line: int


@dataclass(frozen=True)
class Section:
    name: str
    line: int
    entries: tuple[Entry, ...]

    def get(self, key: str) -> Optional[str]:
        for e in self.entries:
            if e.key == key:
                return e.value
        return None

    def getall(self, key: str) -> tuple[Entry, ...]:
        return tuple(e for e in self.entries if e.key == key)

    def require(self, key: str) -> str:
        got = self.get(key)
        if got is None:
            raise DocumentError(f"section {self.name!r} needs a {key!r} entry", self.line)
        return got


@dataclass(frozen=True)
class Document:
    sections: tuple[Section, ...]

    def first(self, name: str) -> Optional[Section]:
        for s in self.sections:
            if s.name == name:
                return s
        return None

    def all(self, name: str) -> tuple[Section, ...]:
        return tuple(s for s in self.sections if s.name == name)

    def require(self, name: str) -> Section:
        got = self.first(name)
        if got is None:
            raise DocumentError(f"the document has no {name!r} section")
        return got


_SECTION_OPEN = re.compile(r"^([A-Za-z_][\w-]*)\s*\{$")


def parse_document(text: str) -> Document:
    sections: list[Section] = []
    seed_entries: list[Entry] = []
    open_name: Optional[str] = None
    open_line = 0
    entries: list[Entry] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        stripped = line.strip()
        if not stripped:
            continue
        column = len(line) - len(line.lstrip()) + 1
        if stripped == "}":
            if open_name is None:
                raise ParseError(lineno, column, "'}' without an open section")
            sections.append(Section(open_name, open_line, tuple(entries)))
            open_name, entries = None, []
            continue
        opened = _SECTION_OPEN.match(stripped)
        if opened:
            if open_name is not None:
                raise ParseError(lineno, column, f"section {open_name!r} is still open")
            open_name, open_line, entries = opened.group(1), lineno, []
            continue
        key, eq, value = stripped.partition("=")
        key = key.strip()
        if not eq or not key or any(ch.isspace() for ch in key):
            raise ParseError(lineno, column, "expected 'key = value', 'name {' or '}'")
        entry = Entry(key, value.strip(), lineno)
        if open_name is None:
            if key != "seed":
                raise ParseError(lineno, column, "only 'seed' may appear outside a section")
            seed_entries.append(entry)
        else:
            entries.append(entry)
    if open_name is not None:
        raise ParseError(open_line, 1, f"section {open_name!r} is never closed")
    if seed_entries:
        sections.append(Section("seed", seed_entries[0].line, tuple(seed_entries)))
    return Document(tuple(sections))


# -- schema readers ------------------------------------------------------


def catalog_space(name: str) -> IsotropySpace:
    try:
        return catalog(name)
    except (KeyError, ValueError):
        known = ", ".join(CATALOG_NAMES)
        raise DocumentError(f"unknown catalog entry {name!r} (known: {known})")


def load_space(doc: Document) -> IsotropySpace:
    sec = doc.require("space")
    name = sec.get("catalog")
    if name is not None:
        return catalog_space(name)
    return _inline_space(sec)


def _int(value: str, what: str, line: int) -> int:
    try:
        return int(value)
    except ValueError:
        raise DocumentError(f"{what} must be an integer, not {value!r}", line)


def _series_from_entry(entry: Entry) -> SeriesData:
    tokens = entry.value.split()
    if len(tokens) < 3:
        raise DocumentError(
            "series lines read 'NAME CLASS SIZE [lam=-1] [step=K]'", entry.line
        )
    name, cls, size_token, *rest = tokens
    if cls not in ("k0", "k1", "kr"):
        raise DocumentError(f"series class must be k0, k1 or kr, not {cls!r}", entry.line)
    size = None if size_token in ("infinite", "inf") else _int(size_token, "series size", entry.line)
    lam, step = Q(1), 1
    for token in rest:
        if token.startswith("lam="):
            lam = Q(token[4:])
        elif token.startswith("step="):
            step = _int(token[5:], "coordinate step", entry.line)
        else:
            raise DocumentError(f"unknown series option {token!r}", entry.line)
    if cls == "k1":
        ring, cotoral, converges = StalkRing.poly(), True, True
    elif cls == "k0":
        ring, cotoral, converges = StalkRing.rational(), False, True
    else:
        ring, cotoral, converges = StalkRing.rational(), False, False
    return SeriesData(
        name=name,
        pattern=f"{name}_{{n}}",
        cotoral_in_top=cotoral,
        h_converges_to_top=converges,
        ring=ring,
        weyl_to_top=(0,),
        lam=lam,
        coordinate_step=step,
        size=size,
    )


def _inline_space(sec: Section) -> IsotropySpace:
    series = tuple(_series_from_entry(e) for e in sec.getall("series"))
    if not series:
        raise DocumentError("an inline space needs at least one 'series' line", sec.line)
    space = IsotropySpace(
        name=sec.get("name") or "custom",
        top_name=sec.get("top") or "G",
        top_weyl=FiniteGroupData.trivial(),
        series=series,
    )
    try:
        space.validate()
    except ValueError as err:
        raise DocumentError(str(err), sec.line)
    return space


def parse_window(text: str) -> tuple[int, int]:
    got = re.fullmatch(r"\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*", text)
    if not got:
        raise DocumentError(f"window must read MIN..MAX, not {text!r}")
    lo, hi = int(got.group(1)), int(got.group(2))
    if lo > hi:
        raise DocumentError(f"empty window {lo}..{hi}")
    return lo, hi


def load_window(doc: Document) -> Optional[tuple[int, int]]:
    sec = doc.first("window")
    if sec is None:
        return None
    lo = _int(sec.require("min"), "window min", sec.line)
    hi = _int(sec.require("max"), "window max", sec.line)
    if lo > hi:
        raise DocumentError(f"empty window {lo}..{hi}", sec.line)
    return lo, hi


def load_seed(doc: Document) -> Optional[int]:
    sec = doc.first("seed")
    if sec is None:
        return None
    value = sec.get("seed") or sec.get("value")
    if value is None:
        raise DocumentError("seed section needs a value", sec.line)
    return _int(value, "seed", sec.line)


def load_task(doc: Document) -> Optional[str]:
    sec = doc.first("task")
    if sec is None:
        return None
    return sec.get("run") or sec.require("task")


# -- stalk module and dimension specs ------------------------------------

_TERM = re.compile(r"\s*(free|torsion|divisible|laurent)\s*\(([^()]*)\)\s*$")


def parse_module_spec(text: str, ring: StalkRing) -> CModule:
    parts: list[Indecomposable] = []
    for chunk in text.split("+"):
        got = _TERM.match(chunk)
        if not got:
            raise ExpressionError(
                f"stalk summands read family(args), not {chunk.strip()!r}"
            )
        family, args = got.group(1), [a.strip() for a in got.group(2).split(",")]
        try:
            numbers = [int(a) for a in args if a]
        except ValueError:
            raise ExpressionError(f"non-integer argument in {chunk.strip()!r}")
        if family == "torsion":
            if len(numbers) != 2:
                raise ExpressionError("torsion takes (shift, length)")
            parts.append(Indecomposable.torsion(numbers[0], numbers[1]))
        else:
            if len(numbers) != 1:
                raise ExpressionError(f"{family} takes a single shift")
            parts.append(getattr(Indecomposable, family)(numbers[0]))
    try:
        return CModule(ring, tuple(parts))
    except ValueError as err:
        raise ExpressionError(str(err))


def parse_dims(text: str) -> dict[int, int]:
    dims: dict[int, int] = {}
    for token in text.replace(",", " ").split():
        deg, colon, count = token.partition(":")
        if not colon:
            raise ExpressionError(f"dimensions read DEGREE:COUNT, not {token!r}")
        try:
            d, k = int(deg), int(count)
        except ValueError:
            raise ExpressionError(f"non-integer dimension entry {token!r}")
        if k < 0:
            raise ExpressionError(f"negative count in {token!r}")
        if k:
            dims[d] = dims.get(d, 0) + k
    return dims


# -- object expressions ---------------------------------------------------


def _trivial_vertex(space: IsotropySpace, dims: dict[int, int]) -> QRepresentation:
    return QRepresentation.trivial(space.top_weyl, GradedQSpace.span(dims))


def parse_cell(text: str, space: IsotropySpace) -> ModelObject:
    expr = text.strip()
    if not expr:
        raise ExpressionError("empty object expression")
    head, paren, rest = expr.partition("(")
    head = head.strip()
    if paren:
        if not rest.endswith(")"):
            raise ExpressionError(f"missing ')' in {expr!r}")
        args = rest[:-1]
    else:
        args = None
    if head in ("sigma_G", "constQ", "zero"):
        if args not in (None, ""):
            raise ExpressionError(f"{head} takes no arguments")
        if head == "zero":
            return zero_object(space)
        obj = cell_sigma_G(space)
        return obj if head == "sigma_G" else dataclasses.replace(obj, label="constQ")
    if args is None:
        raise ExpressionError(f"unknown object expression {expr!r}")
    if head == "sigma_F":
        bits = [b.strip() for b in args.split(",")]
        if len(bits) not in (1, 2) or not bits[0]:
            raise ExpressionError("sigma_F takes (series[, parameter])")
        parameter = int(bits[1]) if len(bits) == 2 else 1
        return cell_sigma_F(space, bits[0], parameter)
    if head == "e":
        dims = {0: 1} if args.strip() == "Q" else parse_dims(args)
        return skyscraper_e(space, _trivial_vertex(space, dims))
    if head == "f":
        bits = args.split(",", 2)
        if len(bits) != 3:
            raise ExpressionError("f takes (series, parameter, modules)")
        series_name = bits[0].strip()
        series = space.series_named(series_name)
        module = parse_module_spec(bits[2], series.ring)
        return skyscraper_f(space, series_name, int(bits[1]), module)
    raise ExpressionError(f"unknown object expression {head!r}")


# -- inline objects --------------------------------------------------------

_DEFAULTS = {
    "zero": DefaultKind.ZERO,
    "free": DefaultKind.FREE,
    "localized": DefaultKind.LOCALIZED,
}


def object_from_section(sec: Section, space: IsotropySpace) -> ModelObject:
    expr = sec.get("cell")
    if expr is not None:
        extra = [e.key for e in sec.entries if e.key not in ("cell", "label")]
        if extra:
            raise DocumentError(
                f"cell expressions take no other object data (found {extra[0]!r})",
                sec.line,
            )
        obj = parse_cell(expr, space)
        label = sec.get("label")
        return dataclasses.replace(obj, label=label) if label else obj
    kind_name = sec.get("default") or "zero"
    kind = _DEFAULTS.get(kind_name)
    if kind is None:
        raise DocumentError(f"unknown default kind {kind_name!r}", sec.line)
    vertex_value = sec.get("vertex")
    dims = parse_dims(vertex_value) if vertex_value else {}
    twist_values: dict[Member, int] = {}
    for e in sec.getall("twist"):
        bits = e.value.split(":")
        if len(bits) != 3:
            raise DocumentError("twist lines read SERIES:PARAMETER:VALUE", e.line)
        member = space.member(bits[0].strip(), _int(bits[1], "twist parameter", e.line))
        twist_values[member] = _int(bits[2], "twist value", e.line)
    exceptions = []
    for e in sec.getall("stalk"):
        if kind is not DefaultKind.ZERO:
            raise DocumentError(
                "inline member stalks need the zero default; use a cell expression "
                "for stalks over a nonzero default",
                e.line,
            )
        tokens = e.value.split(None, 2)
        if len(tokens) != 3:
            raise DocumentError("stalk lines read 'SERIES PARAMETER MODULES'", e.line)
        series = space.series_named(tokens[0])
        member = space.member(tokens[0], _int(tokens[1], "stalk parameter", e.line))
        module = parse_module_spec(tokens[2], series.ring)
        action = _semilinear_identity(series, module)
        exceptions.append((member, StalkData(module, action, None)))
    try:
        return ModelObject(
            space,
            _trivial_vertex(space, dims),
            kind,
            twist=MultiplicativeElement.from_dict(twist_values),
            exceptions=tuple(exceptions),
            label=sec.get("label") or "",
        )
    except ValueError as err:
        raise DocumentError(str(err), sec.line)


def load_object(doc: Document, space: IsotropySpace) -> ModelObject:
    return object_from_section(doc.require("object"), space)
