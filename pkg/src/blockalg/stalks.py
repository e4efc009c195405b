"""Graded modules over the one-variable stalk rings.

A stalk ring is either the rational field (modules are finite sums of
one-dimensional pieces) or a polynomial ring Q[c] on a generator of
positive even degree.  Modules over Q[c] are finite sums of four
classified indecomposables: free Q[c], torsion Q[c]/(c^n), divisible
Q[c]-dual, and Laurent Q[c, 1/c].

Canonical bases.  Each indecomposable carries basis vectors x_k indexed
by an integer interval: [0, inf) for free, [0, n-1] for torsion of
length n, (-inf, 0] for divisible (socle on top), all of Z for Laurent.
x_k sits in degree shift + k*|c| and c.x_k = x_{k+1}, truncated to 0
outside the interval.  A degree-d map f: A -> B with f(c m) = lam * c
f(m) (lam = 1 is the plain linear case; other lam encode semilinear
group actions) is determined by a single scalar s: it sends x_k to
s * lam^k * y_(k+t) with t = (d - shift_B + shift_A) / |c|, and a
nonzero s is legal exactly when the translated index intervals overlap
and the truncation at either interval end is compatible with c.  Maps
of sums are matrices of such scalars; composition, equality, kernels
and cokernels are all exact and symbolic.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .linear import FiniteGroupData, GradedQMap, GradedQSpace, QMatrix

Q = Fraction


class UnrepresentableError(RuntimeError):
    """A computed module or map left the classified class; a bug surface."""


class RingKind(Enum):
    RATIONAL = "rational"
    POLY = "poly"


@dataclass(frozen=True)
class StalkRing:
    kind: RingKind
    c_degree: int = 2

    def __post_init__(self):
        if not isinstance(self.c_degree, int) or self.c_degree <= 0 or self.c_degree % 2:
            raise ValueError("c_degree must be a positive even integer")

    @classmethod
    def rational(cls) -> "StalkRing":
        return cls(RingKind.RATIONAL)

    @classmethod
    def poly(cls, c_degree: int = 2) -> "StalkRing":
        return cls(RingKind.POLY, c_degree)

    @property
    def has_c(self) -> bool:
        return self.kind is RingKind.POLY


class Family(Enum):
    FREE = "free"
    TORSION = "torsion"
    DIVISIBLE = "divisible"
    LAURENT = "laurent"


_FAMILY_ORDER = {Family.FREE: 0, Family.TORSION: 1, Family.DIVISIBLE: 2, Family.LAURENT: 3}


@dataclass(frozen=True)
class Indecomposable:
    family: Family
    shift: int
    length: int = 0

    def __post_init__(self):
        if self.family is Family.TORSION:
            if self.length < 1:
                raise ValueError("torsion length must be >= 1")
        elif self.length:
            raise ValueError("length is only meaningful for torsion")
        if not isinstance(self.shift, int):
            raise TypeError("shift must be an int")

    @classmethod
    def free(cls, shift: int) -> "Indecomposable":
        return cls(Family.FREE, shift)

    @classmethod
    def torsion(cls, shift: int, length: int) -> "Indecomposable":
        return cls(Family.TORSION, shift, length)

    @classmethod
    def divisible(cls, shift: int) -> "Indecomposable":
        return cls(Family.DIVISIBLE, shift)

    @classmethod
    def laurent(cls, shift: int) -> "Indecomposable":
        return cls(Family.LAURENT, shift)

    def index_bounds(self) -> tuple[Optional[int], Optional[int]]:
        """Canonical basis index interval as (lo, hi); None means unbounded."""
        if self.family is Family.FREE:
            return (0, None)
        if self.family is Family.TORSION:
            return (0, self.length - 1)
        if self.family is Family.DIVISIBLE:
            return (None, 0)
        return (None, None)

    def contains_index(self, k: int) -> bool:
        lo, hi = self.index_bounds()
        return (lo is None or k >= lo) and (hi is None or k <= hi)

    def sort_key(self) -> tuple[int, int, int]:
        return (_FAMILY_ORDER[self.family], self.shift, self.length)

    def describe(self) -> str:
        if self.family is Family.TORSION:
            return f"torsion({self.shift},{self.length})"
        return f"{self.family.value}({self.shift})"


@dataclass(frozen=True)
class CModule:
    """Finite sum of classified indecomposables over one stalk ring.

    The summand list is canonical: Laurent shifts are reduced mod |c|
    and summands are sorted, so equal modules compare equal.
    """

    ring: StalkRing
    summands: tuple[Indecomposable, ...] = ()

    def __post_init__(self):
        norm = [self._normalize(s) for s in self.summands]
        norm.sort(key=Indecomposable.sort_key)
        object.__setattr__(self, "summands", tuple(norm))

    def _normalize(self, s: Indecomposable) -> Indecomposable:
        if self.ring.kind is RingKind.RATIONAL:
            if s.family is not Family.FREE:
                raise ValueError("only free summands exist over the rational stalk ring")
            return s
        if s.family is Family.LAURENT:
            return Indecomposable.laurent(s.shift % self.ring.c_degree)
        return s

    @classmethod
    def zero(cls, ring: StalkRing) -> "CModule":
        return cls(ring, ())

    @classmethod
    def from_list(
        cls, ring: StalkRing, summands: Sequence[Indecomposable]
    ) -> tuple["CModule", tuple[int, ...]]:
        """Module plus the canonical position of each listed summand."""
        mod = cls(ring, tuple(summands))
        norm = [mod._normalize(s) for s in summands]
        order = sorted(range(len(norm)), key=lambda i: (norm[i].sort_key(), i))
        perm = [0] * len(norm)
        for pos, i in enumerate(order):
            perm[i] = pos
        return mod, tuple(perm)

    def is_zero(self) -> bool:
        return not self.summands

    def index_at(self, j: int, degree: int) -> Optional[int]:
        """Basis index of summand j in the given degree, if any."""
        s = self.summands[j]
        if self.ring.kind is RingKind.RATIONAL:
            return 0 if degree == s.shift else None
        D = self.ring.c_degree
        if (degree - s.shift) % D:
            return None
        k = (degree - s.shift) // D
        return k if s.contains_index(k) else None

    def contributors(self, degree: int) -> list[int]:
        """Summand indices with a basis vector in the given degree, in order."""
        return [j for j in range(len(self.summands)) if self.index_at(j, degree) is not None]

    def dim(self, degree: int) -> int:
        return len(self.contributors(degree))

    def graded_space(self, window: tuple[int, int]) -> GradedQSpace:
        lo, hi = window
        return GradedQSpace(tuple((n, self.dim(n)) for n in range(lo, hi + 1) if self.dim(n)))

    def c_block(self, degree: int) -> QMatrix:
        """Matrix of multiplication by c from this degree to degree + |c|."""
        if not self.ring.has_c:
            raise ValueError("no c over the rational stalk ring")
        D = self.ring.c_degree
        src = self.contributors(degree)
        tgt = self.contributors(degree + D)
        rows = [[0] * len(src) for _ in range(len(tgt))]
        for col, j in enumerate(src):
            k = self.index_at(j, degree)
            if j in tgt and self.summands[j].contains_index(k + 1):
                rows[tgt.index(j)][col] = 1
        return QMatrix(rows, ncols=len(src))

    def features(self) -> list[int]:
        """Degrees where the structure of some summand changes."""
        out = []
        for s in self.summands:
            out.append(s.shift)
            if s.family is Family.TORSION and self.ring.has_c:
                out.append(s.shift + (s.length - 1) * self.ring.c_degree)
        return out

    def direct_sum(self, other: "CModule") -> "CModule":
        if self.ring != other.ring:
            raise ValueError("direct sum over different rings")
        return CModule(self.ring, self.summands + other.summands)

    def suspended(self, delta: int) -> "CModule":
        return CModule(
            self.ring,
            tuple(Indecomposable(s.family, s.shift + delta, s.length) for s in self.summands),
        )

    def describe(self) -> str:
        if not self.summands:
            return "0"
        return " + ".join(s.describe() for s in self.summands)


def _imax(a: Optional[int], b: Optional[int]) -> Optional[int]:
    if a is None:
        return b
    if b is None:
        return a
    return max(a, b)


def _imin(a: Optional[int], b: Optional[int]) -> Optional[int]:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def hom_translation(
    ring: StalkRing, a: Indecomposable, b: Indecomposable, degree: int
) -> Optional[int]:
    """Index translation of the canonical degree-d map a -> b, or None.

    None means the graded Hom vanishes in that degree.  Otherwise the
    Hom is one-dimensional, spanned by x_k -> y_(k+t).
    """
    delta = b.shift - a.shift
    if ring.kind is RingKind.RATIONAL:
        return 0 if degree == delta else None
    D = ring.c_degree
    if (degree - delta) % D:
        return None
    t = (degree - delta) // D
    alo, ahi = a.index_bounds()
    blo, bhi = b.index_bounds()
    lo = _imax(alo, None if blo is None else blo - t)
    hi = _imin(ahi, None if bhi is None else bhi - t)
    if lo is not None and hi is not None and lo > hi:
        return None
    # c-compatibility where b's interval starts: nothing nonzero may map
    # to 0 just below it
    if blo is not None and a.contains_index(blo - t - 1) and a.contains_index(blo - t):
        return None
    # and where a's interval ends: c of the top cannot stay nonzero
    if ahi is not None and b.contains_index(ahi + t) and b.contains_index(ahi + t + 1):
        return None
    return t


def _pair_support(
    a: Indecomposable, b: Indecomposable, t: int
) -> tuple[Optional[int], Optional[int]]:
    """Source indices k with x_k and its image y_(k+t) both nonzero."""
    alo, ahi = a.index_bounds()
    blo, bhi = b.index_bounds()
    lo = _imax(alo, None if blo is None else blo - t)
    hi = _imin(ahi, None if bhi is None else bhi - t)
    return lo, hi


def _compose_nonzero(
    a: Indecomposable, b: Indecomposable, c: Indecomposable, t1: int, t2: int
) -> bool:
    """Whether canonical maps a -> b (translation t1) and b -> c (t2) compose nonzero."""
    lo, hi = a.index_bounds()
    blo, bhi = b.index_bounds()
    clo, chi = c.index_bounds()
    lo = _imax(lo, None if blo is None else blo - t1)
    hi = _imin(hi, None if bhi is None else bhi - t1)
    lo = _imax(lo, None if clo is None else clo - t1 - t2)
    hi = _imin(hi, None if chi is None else chi - t1 - t2)
    return lo is None or hi is None or lo <= hi


def hom_indecomposable(
    ring: StalkRing, a: Indecomposable, b: Indecomposable, window: tuple[int, int]
) -> tuple[GradedQSpace, dict[int, str]]:
    """Graded Hom space of a -> b over the window, with a symbolic basis."""
    lo, hi = window
    dims = []
    basis: dict[int, str] = {}
    for d in range(lo, hi + 1):
        t = hom_translation(ring, a, b, d)
        if t is None:
            continue
        dims.append((d, 1))
        if ring.kind is RingKind.RATIONAL:
            basis[d] = "1 -> 1"
        else:
            basis[d] = f"x_k -> y_(k{t:+d})" if t else "x_k -> y_k"
    return GradedQSpace(tuple(dims)), basis


class CModuleMap:
    """Map of stalk modules: one scalar per (target, source) summand pair.

    entries[(i, j)] multiplies the canonical translation map from source
    summand j to target summand i; a pair may appear only when that
    canonical map exists in this degree.  lam is the multiplier in
    f(c m) = lam * c f(m); linear maps have lam = 1.
    """

    __slots__ = ("source", "target", "degree", "lam", "entries")

    def __init__(
        self,
        source: CModule,
        target: CModule,
        degree: int,
        entries: Mapping[tuple[int, int], object],
        lam: object = 1,
    ):
        if source.ring != target.ring:
            raise ValueError("map across different rings")
        lam = Fraction(lam)
        if lam == 0:
            raise ValueError("lam must be nonzero")
        clean: dict[tuple[int, int], Fraction] = {}
        for (i, j), s in entries.items():
            s = Fraction(s)
            if s == 0:
                continue
            if not (0 <= i < len(target.summands) and 0 <= j < len(source.summands)):
                raise ValueError(f"entry ({i}, {j}) out of range")
            t = hom_translation(source.ring, source.summands[j], target.summands[i], degree)
            if t is None:
                raise ValueError(
                    f"no degree-{degree} map {source.summands[j].describe()} -> "
                    f"{target.summands[i].describe()}"
                )
            clean[(i, j)] = s
        self.source = source
        self.target = target
        self.degree = degree
        self.lam = lam
        self.entries = clean

    @classmethod
    def zero(cls, source: CModule, target: CModule, degree: int = 0, lam: object = 1) -> "CModuleMap":
        return cls(source, target, degree, {}, lam)

    @classmethod
    def identity(cls, module: CModule) -> "CModuleMap":
        return cls(module, module, 0, {(i, i): 1 for i in range(len(module.summands))})

    def translation(self, i: int, j: int) -> int:
        t = hom_translation(self.source.ring, self.source.summands[j], self.target.summands[i], self.degree)
        if t is None:
            raise AssertionError("illegal entry slipped through")
        return t

    def is_zero(self) -> bool:
        return not self.entries

    def _canonical(self) -> tuple:
        """Extensional fingerprint.

        An entry supported on a single basis index only ever samples lam
        at that index, so lam folds into its scalar; lam itself is
        observable only through entries with larger support.
        """
        folded = {}
        spread = False
        for (i, j), s in self.entries.items():
            lo, hi = _pair_support(
                self.source.summands[j], self.target.summands[i], self.translation(i, j)
            )
            if lo is not None and lo == hi:
                folded[(i, j)] = s * self.lam**lo
            else:
                folded[(i, j)] = s
                spread = True
        lam = self.lam if spread else Q(1)
        return (self.degree, lam, tuple(sorted(folded.items())))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CModuleMap):
            return NotImplemented
        if (self.source, self.target) != (other.source, other.target):
            return False
        return self._canonical() == other._canonical()

    def __hash__(self) -> int:
        return hash((self.source, self.target) + self._canonical())

    def __repr__(self) -> str:
        return f"CModuleMap(degree={self.degree}, {len(self.entries)} entries)"

    def add(self, other: "CModuleMap") -> "CModuleMap":
        if (self.source, self.target, self.degree) != (other.source, other.target, other.degree):
            raise ValueError("add: incompatible maps")
        if self.lam != other.lam and self.entries and other.entries:
            raise ValueError("add: different semilinearity")
        lam = self.lam if self.entries else other.lam
        acc = dict(self.entries)
        for key, s in other.entries.items():
            acc[key] = acc.get(key, Q(0)) + s
        return CModuleMap(self.source, self.target, self.degree, acc, lam)

    def sub(self, other: "CModuleMap") -> "CModuleMap":
        return self.add(other.scale(-1))

    def scale(self, s: object) -> "CModuleMap":
        s = Fraction(s)
        return CModuleMap(
            self.source, self.target, self.degree,
            {k: s * v for k, v in self.entries.items()}, self.lam,
        )

    def compose(self, other: "CModuleMap") -> "CModuleMap":
        """self after other."""
        if other.target != self.source:
            raise ValueError("compose: middle modules differ")
        ring = self.source.ring
        acc: dict[tuple[int, int], Fraction] = {}
        for (i, j), p in self.entries.items():
            for (j2, k), q in other.entries.items():
                if j2 != j:
                    continue
                a = other.source.summands[k]
                b = other.target.summands[j]
                c = self.target.summands[i]
                if ring.kind is RingKind.RATIONAL:
                    scalar = p * q
                else:
                    t1 = other.translation(j, k)
                    t2 = self.translation(i, j)
                    if not _compose_nonzero(a, b, c, t1, t2):
                        continue
                    scalar = p * q * self.lam ** t1
                key = (i, k)
                acc[key] = acc.get(key, Q(0)) + scalar
        acc = {k: v for k, v in acc.items() if v != 0}
        degree = self.degree + other.degree
        for (i, k) in acc:
            t = hom_translation(ring, other.source.summands[k], self.target.summands[i], degree)
            if t is None:
                raise AssertionError("composite left the classified Hom; composition bug")
        return CModuleMap(other.source, self.target, degree, acc, self.lam * other.lam)

    def expand(self, window: tuple[int, int]) -> GradedQMap:
        """Degreewise matrices over the window, as a graded map."""
        lo, hi = window
        src_space = self.source.graded_space(window)
        tgt_space = self.target.graded_space(window)
        blocks: dict[int, QMatrix] = {}
        for n in range(lo, hi + 1):
            if not (lo <= n + self.degree <= hi):
                continue
            src = self.source.contributors(n)
            tgt = self.target.contributors(n + self.degree)
            if not src or not tgt:
                continue
            rows = [[Q(0)] * len(src) for _ in tgt]
            for (i, j), s in self.entries.items():
                if j not in src or i not in tgt:
                    continue
                k = self.source.index_at(j, n)
                coeff = s * self.lam ** k if self.source.ring.has_c else s
                rows[tgt.index(i)][src.index(j)] += coeff
            blocks[n] = QMatrix(rows, ncols=len(src))
        return GradedQMap(src_space, tgt_space, self.degree, blocks)

    @classmethod
    def fit(
        cls,
        source: CModule,
        target: CModule,
        degree: int,
        gmap: GradedQMap,
        window: tuple[int, int],
        lam: object = 1,
    ) -> "CModuleMap":
        """Recover the classified map whose window expansion is gmap.

        Raises UnrepresentableError when no classified map matches.
        """
        lo, hi = window
        lam = Fraction(lam)
        entries: dict[tuple[int, int], Fraction] = {}
        for i, b in enumerate(target.summands):
            for j, a in enumerate(source.summands):
                t = hom_translation(source.ring, a, b, degree)
                if t is None:
                    continue
                for n in range(lo, hi + 1):
                    if not (lo <= n + degree <= hi):
                        continue
                    k = source.index_at(j, n)
                    if k is None or target.index_at(i, n + degree) != (
                        0 if source.ring.kind is RingKind.RATIONAL else k + t
                    ):
                        continue
                    src = source.contributors(n)
                    tgt = target.contributors(n + degree)
                    val = gmap.block(n).entry(tgt.index(i), src.index(j))
                    scalar = val / lam ** k if source.ring.has_c else val
                    if scalar:
                        entries[(i, j)] = scalar
                    break
        candidate = cls(source, target, degree, entries, lam)
        if candidate.expand(window) != gmap:
            raise UnrepresentableError("window data is not a classified map")
        return candidate

    def inverse(self) -> Optional["CModuleMap"]:
        """Two-sided inverse as a classified map, or None."""
        pairs = _legal_pairs(self.target, self.source, -self.degree)
        if self.source.is_zero() and self.target.is_zero():
            return CModuleMap.zero(self.target, self.source, -self.degree, 1 / self.lam)
        if not pairs:
            return None
        basis = [
            CModuleMap(self.target, self.source, -self.degree, {pair: 1}, 1 / self.lam)
            for pair in pairs
        ]
        id_src = CModuleMap.identity(self.source)
        id_tgt = CModuleMap.identity(self.target)
        sol = _solve_map_equations(
            basis,
            [lambda g: g.compose(self), lambda g: self.compose(g)],
            [id_src, id_tgt],
        )
        if sol is None:
            return None
        acc = CModuleMap.zero(self.target, self.source, -self.degree, 1 / self.lam)
        for coeff, base in zip(sol, basis):
            if coeff:
                acc = acc.add(base.scale(coeff))
        return acc


def _legal_pairs(source: CModule, target: CModule, degree: int) -> list[tuple[int, int]]:
    out = []
    for i, b in enumerate(target.summands):
        for j, a in enumerate(source.summands):
            if hom_translation(source.ring, a, b, degree) is not None:
                out.append((i, j))
    return out


def _solve_map_equations(basis, operators, targets) -> Optional[list[Fraction]]:
    """Coefficients x with sum x_k op(basis_k) = target for each operator.

    All operators are linear; equations are compared entrywise in the
    symbolic encoding.  Returns None when inconsistent.
    """
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    for op, tgt in zip(operators, targets):
        images = [op(b) for b in basis]
        keys = set(tgt.entries)
        for img in images:
            keys.update(img.entries)
        for key in sorted(keys):
            rows.append([img.entries.get(key, Q(0)) for img in images])
            rhs.append(tgt.entries.get(key, Q(0)))
    mat = QMatrix(rows, ncols=len(basis))
    sol = mat.solve(QMatrix([[v] for v in rhs], ncols=1))
    if sol is None:
        return None
    return [sol.entry(k, 0) for k in range(len(basis))]


def hom_module_basis(source: CModule, target: CModule, degree: int) -> list[CModuleMap]:
    """Basis of the full (non-equivariant) degree-d maps source -> target."""
    return [
        CModuleMap(source, target, degree, {pair: 1})
        for pair in _legal_pairs(source, target, degree)
    ]


def localize_c(module: CModule) -> CModule:
    return localize_c_with_map(module)[0]


def localize_c_with_map(module: CModule) -> tuple[CModule, CModuleMap]:
    """Invert c: free becomes Laurent, torsion and divisible die.

    Also returns the localization map itself.
    """
    if not module.ring.has_c:
        raise ValueError("localization needs the polynomial stalk ring")
    kept: list[Indecomposable] = []
    kept_from: list[int] = []
    for j, s in enumerate(module.summands):
        if s.family in (Family.FREE, Family.LAURENT):
            kept.append(Indecomposable.laurent(s.shift))
            kept_from.append(j)
    loc, perm = CModule.from_list(module.ring, kept)
    entries = {(perm[pos], j): 1 for pos, j in enumerate(kept_from)}
    return loc, CModuleMap(module, loc, 0, entries)


def gamma_c_with_map(module: CModule) -> tuple[CModule, CModuleMap]:
    """The c-power-torsion part (torsion and divisible summands) and its inclusion."""
    if not module.ring.has_c:
        raise ValueError("torsion part needs the polynomial stalk ring")
    kept = []
    kept_from = []
    for j, s in enumerate(module.summands):
        if s.family in (Family.TORSION, Family.DIVISIBLE):
            kept.append(s)
            kept_from.append(j)
    part, perm = CModule.from_list(module.ring, kept)
    entries = {(j, perm[pos]): 1 for pos, j in enumerate(kept_from)}
    return part, CModuleMap(part, module, 0, entries)


def is_divisible(module: CModule) -> bool:
    """True when multiplication by c is surjective."""
    if not module.ring.has_c:
        raise ValueError("divisibility is about c")
    return all(
        s.family in (Family.DIVISIBLE, Family.LAURENT) for s in module.summands
    )


def c_multiplication(module: CModule) -> CModuleMap:
    """Multiplication by c as a classified degree-|c| map."""
    if not module.ring.has_c:
        raise ValueError("no c over the rational stalk ring")
    D = module.ring.c_degree
    entries = {}
    for i, s in enumerate(module.summands):
        if hom_translation(module.ring, s, s, D) is not None:
            entries[(i, i)] = 1
    return CModuleMap(module, module, D, entries)


def direct_sum_with_maps(
    ring: StalkRing, parts: Sequence[CModule]
) -> tuple[CModule, list[CModuleMap], list[CModuleMap]]:
    """Direct sum with the inclusion and projection of every part."""
    summands: list[Indecomposable] = []
    offsets = []
    for part in parts:
        if part.ring != ring:
            raise ValueError("direct sum over different rings")
        offsets.append(len(summands))
        summands.extend(part.summands)
    total, perm = CModule.from_list(ring, summands)
    inclusions = []
    projections = []
    for part, off in zip(parts, offsets):
        incl = {(perm[off + p], p): 1 for p in range(len(part.summands))}
        proj = {(p, perm[off + p]): 1 for p in range(len(part.summands))}
        inclusions.append(CModuleMap(part, total, 0, incl))
        projections.append(CModuleMap(total, part, 0, proj))
    return total, inclusions, projections


def tensor_with_space(module: CModule, space: GradedQSpace) -> CModule:
    """module tensor a finite graded Q-space: shifted copies per dimension."""
    out: list[Indecomposable] = []
    for deg, d in space.dims:
        out.extend(module.suspended(deg).summands * d)
    return CModule(module.ring, tuple(out))


def padded_window(
    mods: Sequence[CModule], degrees: Sequence[int] = (), extra: int = 0
) -> tuple[int, int]:
    """A degree window covering all features with safety padding."""
    rings = {m.ring for m in mods}
    if len(rings) != 1:
        raise ValueError("modules over different rings")
    ring = rings.pop()
    D = ring.c_degree if ring.has_c else 2
    base = []
    maxlen = 1
    for m in mods:
        base.extend(m.features())
        for s in m.summands:
            if s.family is Family.TORSION:
                maxlen = max(maxlen, s.length)
    if not base:
        base = [0]
    feats = list(base)
    for d in degrees:
        feats.extend([f + d for f in base])
        feats.extend([f - d for f in base])
    pad = (maxlen + 4 + extra) * D
    return (min(feats) - pad, max(feats) + pad)


@dataclass(frozen=True)
class KernelCokernel:
    kernel: CModule
    inclusion: CModuleMap
    cokernel: CModule
    projection: CModuleMap


def _thread_bars(degs: list[int], dim_of, step_of):
    """Interval decomposition of a one-direction persistence functor.

    degs are the consecutive degrees of one residue class; dim_of(n) the
    dimension at n; step_of(n) the matrix of the structure map from n to
    the next degree.  Returns bars (birth, death, vectors) with None for
    an end that reaches past the window; vectors are per-degree columns
    in the local coordinates.
    """
    threads: list[dict] = []
    if not degs:
        return []
    for idx in range(dim_of(degs[0])):
        unit = QMatrix([[1 if r == idx else 0] for r in range(dim_of(degs[0]))], ncols=1)
        threads.append(
            {"id": len(threads), "birth": None, "death": None, "alive": True, "vecs": {degs[0]: unit}}
        )
    for a, b in zip(degs, degs[1:]):
        dim_b = dim_of(b)
        alive = [th for th in threads if th["alive"]]
        # reduce oldest threads first so a dying thread is only ever
        # rewritten by threads defined on all of its lifetime
        alive.sort(key=lambda th: (th["birth"] is not None, th["birth"] or 0, th["id"]))
        accepted: list[dict] = []
        accepted_cols: list[tuple[Fraction, ...]] = []
        step = step_of(a)
        for th in alive:
            u = step.mul(th["vecs"][a])
            amat = QMatrix.from_cols(accepted_cols, nrows=dim_b)
            alpha = amat.solve(u)
            if alpha is not None:
                for pos, oth in enumerate(accepted):
                    coeff = alpha.entry(pos, 0)
                    if coeff:
                        for deg in th["vecs"]:
                            th["vecs"][deg] = th["vecs"][deg].sub(oth["vecs"][deg].scale(coeff))
                th["alive"] = False
                th["death"] = a
            else:
                accepted.append(th)
                accepted_cols.append(u.col(0))
                th["vecs"][b] = u
        if dim_b:
            amat = QMatrix.from_cols(accepted_cols, nrows=dim_b)
            combined = QMatrix.hstack([amat, QMatrix.identity(dim_b)])
            for p in combined.column_space_pivots():
                if p >= amat.ncols:
                    idx = p - amat.ncols
                    unit = QMatrix([[1 if r == idx else 0] for r in range(dim_b)], ncols=1)
                    threads.append(
                        {"id": len(threads), "birth": b, "death": None, "alive": True, "vecs": {b: unit}}
                    )
    return [(th["birth"], th["death"], th["vecs"]) for th in threads]


def _bar_summand(ring: StalkRing, birth, death, residue_rep: int) -> Indecomposable:
    D = ring.c_degree
    if birth is None and death is None:
        return Indecomposable.laurent(residue_rep)
    if birth is None:
        return Indecomposable.divisible(death)
    if death is None:
        return Indecomposable.free(birth)
    return Indecomposable.torsion(birth, (death - birth) // D + 1)


def kernel_cokernel_cmod(
    f: CModuleMap, window: Optional[tuple[int, int]] = None
) -> KernelCokernel:
    """Kernel and cokernel inside the classified class, with witness maps.

    The inclusion and projection are classified maps; the result is
    verified degreewise against plain linear algebra on the window.
    """
    if f.lam != 1:
        raise ValueError("kernel/cokernel only for linear maps")
    ring = f.source.ring
    if window is None:
        window = padded_window([f.source, f.target], degrees=[f.degree])
    lo, hi = window
    # the block at source degree n is complete only when n + degree is
    # also in the window; trim both working ranges accordingly
    klo, khi = lo + max(0, -f.degree), hi - max(0, f.degree)
    clo, chi = lo + max(0, f.degree), hi - max(0, -f.degree)
    fmat = f.expand(window)

    if ring.kind is RingKind.RATIONAL:
        ker_parts: list[Indecomposable] = []
        incl_cols: dict[int, list[tuple[Fraction, ...]]] = {}
        cok_parts: list[Indecomposable] = []
        proj_rows: dict[int, list[tuple[Fraction, ...]]] = {}
        for n in range(klo, khi + 1):
            if f.source.dim(n):
                nb = fmat.block(n).nullspace_basis()
                for col in range(nb.ncols):
                    ker_parts.append(Indecomposable.free(n))
                    incl_cols.setdefault(n, []).append(nb.col(col))
        for m in range(clo, chi + 1):
            if f.target.dim(m):
                ln = fmat.block(m - f.degree).left_nullspace()
                for r in range(ln.nrows):
                    cok_parts.append(Indecomposable.free(m))
                    proj_rows.setdefault(m, []).append(tuple(ln.rows[r]))
        kernel, kperm = CModule.from_list(ring, ker_parts)
        cokernel, cperm = CModule.from_list(ring, cok_parts)
        kentries: dict[tuple[int, int], Fraction] = {}
        pos = 0
        for n in sorted(incl_cols):
            for col in incl_cols[n]:
                for row_idx, val in zip(f.source.contributors(n), col):
                    if val:
                        kentries[(row_idx, kperm[pos])] = val
                pos += 1
        centries: dict[tuple[int, int], Fraction] = {}
        pos = 0
        for m in sorted(proj_rows):
            for row in proj_rows[m]:
                for col_idx, val in zip(f.target.contributors(m), row):
                    if val:
                        centries[(cperm[pos], col_idx)] = val
                pos += 1
        inclusion = CModuleMap(kernel, f.source, 0, kentries)
        projection = CModuleMap(f.target, cokernel, 0, centries)
        result = KernelCokernel(kernel, inclusion, cokernel, projection)
        _verify_kernel_cokernel(f, fmat, result, (klo, khi), (clo, chi))
        return result

    D = ring.c_degree
    null: dict[int, QMatrix] = {}
    for n in range(klo, khi + 1):
        null[n] = fmat.block(n).nullspace_basis() if f.source.dim(n) else QMatrix.zeros(0, 0)
    ker_bars = []
    for r in range(D):
        degs = [n for n in range(klo, khi + 1) if n % D == r]
        if not degs:
            continue

        def kdim(n):
            return null[n].ncols

        def kstep(n):
            img = f.source.c_block(n).mul(null[n])
            sol = null[n + D].solve(img)
            if sol is None:
                raise AssertionError("c does not preserve the kernel")
            return sol

        for birth, death, vecs in _thread_bars(degs, kdim, kstep):
            ambient = {n: null[n].mul(v) for n, v in vecs.items()}
            ker_bars.append((birth, death, r, ambient))

    kernel, kperm = CModule.from_list(
        ring, [_bar_summand(ring, b, d, r) for (b, d, r, _) in ker_bars]
    )
    kwindow = (klo, khi)
    incl_blocks: dict[int, QMatrix] = {}
    for n in range(klo, khi + 1):
        cols = []
        for canon in kernel.contributors(n):
            bar = kperm.index(canon)
            vec = ker_bars[bar][3].get(n)
            if vec is None:
                raise UnrepresentableError("kernel bar misses a window degree")
            cols.append(vec.col(0))
        if cols:
            incl_blocks[n] = QMatrix.from_cols(cols, nrows=f.source.dim(n))
    inclusion = CModuleMap.fit(
        kernel, f.source, 0,
        GradedQMap(kernel.graded_space(kwindow), f.source.graded_space(kwindow), 0, incl_blocks),
        kwindow,
    )

    pi: dict[int, QMatrix] = {}
    for m in range(clo, chi + 1):
        if f.target.dim(m):
            pi[m] = fmat.block(m - f.degree).left_nullspace()
        else:
            pi[m] = QMatrix.zeros(0, 0)
    cok_bars = []
    for r in range(D):
        degs = [m for m in range(clo, chi + 1) if m % D == r]
        if not degs:
            continue

        def cdim(m):
            return pi[m].nrows

        def cstep(m):
            if pi[m].nrows == 0:
                return QMatrix.zeros(pi[m + D].nrows, 0)
            rinv = pi[m].solve(QMatrix.identity(pi[m].nrows))
            if rinv is None:
                raise AssertionError("projection lost full row rank")
            return pi[m + D].mul(f.target.c_block(m)).mul(rinv)

        for birth, death, vecs in _thread_bars(degs, cdim, cstep):
            cok_bars.append((birth, death, r, vecs))

    cokernel, cperm = CModule.from_list(
        ring, [_bar_summand(ring, b, d, r) for (b, d, r, _) in cok_bars]
    )
    cwindow = (clo, chi)
    proj_blocks: dict[int, QMatrix] = {}
    for m in range(clo, chi + 1):
        rows_at_m = cokernel.contributors(m)
        if not rows_at_m:
            continue
        thread_cols = []
        for canon in rows_at_m:
            bar = cperm.index(canon)
            vec = cok_bars[bar][3].get(m)
            if vec is None:
                raise UnrepresentableError("cokernel bar misses a window degree")
            thread_cols.append(vec.col(0))
        tmat = QMatrix.from_cols(thread_cols, nrows=pi[m].nrows)
        if tmat.nrows != tmat.ncols:
            raise UnrepresentableError("cokernel threads fail to form a basis")
        tinv = tmat.solve(QMatrix.identity(tmat.nrows))
        if tinv is None:
            raise UnrepresentableError("cokernel threads fail to form a basis")
        proj_blocks[m] = tinv.mul(pi[m])
    projection = CModuleMap.fit(
        f.target, cokernel, 0,
        GradedQMap(f.target.graded_space(cwindow), cokernel.graded_space(cwindow), 0, proj_blocks),
        cwindow,
    )

    result = KernelCokernel(kernel, inclusion, cokernel, projection)
    _verify_kernel_cokernel(f, fmat, result, (klo, khi), (clo, chi))
    return result


def _verify_kernel_cokernel(
    f: CModuleMap,
    fmat: GradedQMap,
    result: KernelCokernel,
    krange: tuple[int, int],
    crange: tuple[int, int],
) -> None:
    if not f.compose(result.inclusion).is_zero():
        raise UnrepresentableError("kernel inclusion does not vanish under f")
    if not result.projection.compose(f).is_zero():
        raise UnrepresentableError("projection does not kill the image")
    for n in range(krange[0], krange[1] + 1):
        blk = fmat.block(n)
        if result.kernel.dim(n) != f.source.dim(n) - blk.rank():
            raise UnrepresentableError(f"kernel dimension off in degree {n}")
    for m in range(crange[0], crange[1] + 1):
        into = fmat.block(m - f.degree)
        if result.cokernel.dim(m) != f.target.dim(m) - into.rank():
            raise UnrepresentableError(f"cokernel dimension off in degree {m}")


class SemilinearAction:
    """Action of a finite group on a stalk module by degree-0 maps.

    Generator g acts by a classified map with multiplier lam_g, so
    g(c m) = lam_g c g(m) holds by construction; validate() checks the
    group relations (and that multiplier bookkeeping) symbolically.
    """

    __slots__ = ("group", "module", "gen_maps", "_maps")

    def __init__(self, group: FiniteGroupData, module: CModule, gen_maps: Mapping[int, CModuleMap]):
        for g in group.generators:
            if g not in gen_maps:
                raise ValueError(f"missing map for generator {g}")
            m = gen_maps[g]
            if m.source != module or m.target != module or m.degree != 0:
                raise ValueError(f"generator {g} map is not a degree-0 endomorphism")
        self.group = group
        self.module = module
        self.gen_maps = dict(gen_maps)
        self._maps = {group.identity: CModuleMap.identity(module)}

    @classmethod
    def trivial(cls, group: FiniteGroupData, module: CModule) -> "SemilinearAction":
        ident = CModuleMap.identity(module)
        return cls(group, module, {g: ident for g in group.generators})

    def element_action(self, i: int) -> CModuleMap:
        got = self._maps.get(i)
        if got is not None:
            return got
        word = self.group.words().get(i)
        if word is None:
            raise ValueError(f"element {i} not generated")
        m = CModuleMap.identity(self.module)
        for letter in word:
            m = m.compose(self.gen_maps[letter])
        self._maps[i] = m
        return m

    def validate(self) -> None:
        for i in range(self.group.order):
            for j in range(self.group.order):
                lhs = self.element_action(i).compose(self.element_action(j))
                if lhs != self.element_action(self.group.mul(i, j)):
                    raise ValueError(f"action fails group relation at ({i}, {j})")
        if self.module.ring.has_c and not self.module.is_zero():
            cmul = c_multiplication(self.module)
            for g in self.group.generators:
                rho = self.gen_maps[g]
                # g(c m) = lam_g * c g(m)
                if rho.compose(cmul) != cmul.compose(rho).scale(rho.lam):
                    raise ValueError(f"generator {g} is not lam-semilinear against c")


def equivariant_cmod_hom(
    act_source: SemilinearAction, act_target: SemilinearAction, degree: int
) -> list[CModuleMap]:
    """Basis of the equivariant linear module maps in one degree."""
    if act_source.group != act_target.group:
        raise ValueError("actions of different groups")
    source = act_source.module
    target = act_target.module
    basis = hom_module_basis(source, target, degree)
    if not basis:
        return []
    rows: list[list[Fraction]] = []
    for g in act_source.group.generators:
        rho_t = act_target.gen_maps[g]
        rho_s = act_source.gen_maps[g]
        lhs = [rho_t.compose(b) for b in basis]
        rhs = [b.compose(rho_s) for b in basis]
        keys = set()
        for m in lhs + rhs:
            keys.update(m.entries)
        for key in sorted(keys):
            lrow = [m.entries.get(key, Q(0)) for m in lhs]
            rrow = [m.entries.get(key, Q(0)) for m in rhs]
            if rho_t.lam == rho_s.lam:
                rows.append([l - r for l, r in zip(lrow, rrow)])
                continue
            # the sides carry different twists: l*lam_t^k must equal
            # r*lam_s^k across the pair's whole support
            i, j = key
            a = source.summands[j]
            b = target.summands[i]
            lo, hi = _pair_support(a, b, hom_translation(source.ring, a, b, degree))
            if lo is not None and lo == hi:
                rows.append([l * rho_t.lam**lo - r * rho_s.lam**lo for l, r in zip(lrow, rrow)])
            else:
                rows.append(lrow)
                rows.append(rrow)
    if not rows:
        return basis
    sol = QMatrix(rows, ncols=len(basis)).nullspace_basis()
    out = []
    for col in range(sol.ncols):
        acc = CModuleMap.zero(source, target, degree)
        for k, b in enumerate(basis):
            coeff = sol.entry(k, col)
            if coeff:
                acc = acc.add(b.scale(coeff))
        out.append(acc)
    return out


def equivariant_cmod_hom_dims(
    act_source: SemilinearAction, act_target: SemilinearAction, window: tuple[int, int]
) -> GradedQSpace:
    lo, hi = window
    dims = []
    for d in range(lo, hi + 1):
        k = len(equivariant_cmod_hom(act_source, act_target, d))
        if k:
            dims.append((d, k))
    return GradedQSpace(tuple(dims))


def transport_action(
    act: SemilinearAction, through: CModuleMap, target_module: CModule
) -> SemilinearAction:
    """Unique action on target_module making `through` equivariant.

    Solves u . through = through . g per generator; raises when the
    transported action is missing or ambiguous.
    """
    if through.source != act.module or through.target != target_module:
        raise ValueError("transport map does not match the action")
    pairs = _legal_pairs(target_module, target_module, 0)
    gen_maps = {}
    for g in act.group.generators:
        rho = act.gen_maps[g]
        basis = [
            CModuleMap(target_module, target_module, 0, {pair: 1}, rho.lam)
            for pair in pairs
        ]
        composed = [b.compose(through) for b in basis]
        keys = set()
        for m in composed:
            keys.update(m.entries)
        mat = QMatrix(
            [[m.entries.get(key, Q(0)) for m in composed] for key in sorted(keys)],
            ncols=len(basis),
        )
        if mat.nullspace_basis().ncols:
            raise ValueError("transported action is not unique")
        sol = _solve_map_equations(basis, [lambda u: u.compose(through)], [through.compose(rho)])
        if sol is None:
            raise ValueError("action does not descend through the map")
        acc = CModuleMap.zero(target_module, target_module, 0, rho.lam)
        for coeff, b in zip(sol, basis):
            if coeff:
                acc = acc.add(b.scale(coeff))
        gen_maps[g] = acc
    return SemilinearAction(act.group, target_module, gen_maps)
