"""Exact linear algebra over Q.

Dense Fraction matrices, finitely supported graded vector spaces,
degree-homogeneous graded maps, finite groups given by multiplication
tables, and representation utilities (averaging, invariants, equivariant
Hom).  No floats anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

Q = Fraction


def _q(x: object) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected int or Fraction, got {type(x).__name__}")


class QMatrix:
    """Immutable dense matrix over Q."""

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows: Sequence[Sequence[object]], ncols: int | None = None):
        table = tuple(tuple(_q(x) for x in row) for row in rows)
        if table:
            width = len(table[0])
            if any(len(r) != width for r in table):
                raise ValueError("ragged rows")
            if ncols is not None and ncols != width:
                raise ValueError(f"ncols={ncols} does not match row width {width}")
            ncols = width
        elif ncols is None:
            ncols = 0
        self.rows = table
        self.nrows = len(table)
        self.ncols = ncols

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "QMatrix":
        return cls([[0] * ncols for _ in range(nrows)], ncols=ncols)

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], ncols=n)

    @classmethod
    def from_cols(cls, cols: Sequence[Sequence[object]], nrows: int | None = None) -> "QMatrix":
        if cols:
            nrows = len(cols[0])
        elif nrows is None:
            nrows = 0
        return cls([[col[i] for col in cols] for i in range(nrows)], ncols=len(cols))

    @classmethod
    def hstack(cls, mats: Sequence["QMatrix"]) -> "QMatrix":
        if not mats:
            raise ValueError("hstack of nothing")
        m = mats[0].nrows
        if any(a.nrows != m for a in mats):
            raise ValueError("row counts differ")
        rows = [[x for a in mats for x in a.rows[i]] if m else [] for i in range(m)]
        return cls(rows, ncols=sum(a.ncols for a in mats))

    @classmethod
    def vstack(cls, mats: Sequence["QMatrix"]) -> "QMatrix":
        if not mats:
            raise ValueError("vstack of nothing")
        n = mats[0].ncols
        if any(a.ncols != n for a in mats):
            raise ValueError("column counts differ")
        rows = [row for a in mats for row in a.rows]
        return cls(rows, ncols=n)

    def entry(self, i: int, j: int) -> Fraction:
        return self.rows[i][j]

    def col(self, j: int) -> tuple[Fraction, ...]:
        return tuple(row[j] for row in self.rows)

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.rows for x in row)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QMatrix):
            return NotImplemented
        return (self.nrows, self.ncols, self.rows) == (other.nrows, other.ncols, other.rows)

    def __hash__(self) -> int:
        return hash((self.nrows, self.ncols, self.rows))

    def __repr__(self) -> str:
        return f"QMatrix({self.nrows}x{self.ncols})"

    def add(self, other: "QMatrix") -> "QMatrix":
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ValueError("shape mismatch in add")
        return QMatrix(
            [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)],
            ncols=self.ncols,
        )

    def sub(self, other: "QMatrix") -> "QMatrix":
        return self.add(other.scale(-1))

    def scale(self, c: object) -> "QMatrix":
        c = _q(c)
        return QMatrix([[c * x for x in row] for row in self.rows], ncols=self.ncols)

    def mul(self, other: "QMatrix") -> "QMatrix":
        if self.ncols != other.nrows:
            raise ValueError(f"cannot multiply {self.nrows}x{self.ncols} by {other.nrows}x{other.ncols}")
        cols = [other.col(j) for j in range(other.ncols)]
        rows = [[sum(a * b for a, b in zip(row, col)) for col in cols] for row in self.rows]
        return QMatrix(rows, ncols=other.ncols)

    def transpose(self) -> "QMatrix":
        return QMatrix(
            [[self.rows[i][j] for i in range(self.nrows)] for j in range(self.ncols)],
            ncols=self.nrows,
        )

    def rref(self) -> tuple["QMatrix", tuple[int, ...]]:
        """Reduced row echelon form and the pivot column indices."""
        rows = [list(r) for r in self.rows]
        pivots: list[int] = []
        r = 0
        for c in range(self.ncols):
            piv = next((i for i in range(r, self.nrows) if rows[i][c] != 0), None)
            if piv is None:
                continue
            rows[r], rows[piv] = rows[piv], rows[r]
            inv = rows[r][c]
            rows[r] = [x / inv for x in rows[r]]
            for i in range(self.nrows):
                if i != r and rows[i][c] != 0:
                    f = rows[i][c]
                    rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
            pivots.append(c)
            r += 1
            if r == self.nrows:
                break
        return QMatrix(rows, ncols=self.ncols), tuple(pivots)

    def rank(self) -> int:
        return len(self.rref()[1])

    def nullspace_basis(self) -> "QMatrix":
        """Matrix whose columns are a basis of the kernel (ncols x nullity)."""
        red, pivots = self.rref()
        pivot_set = set(pivots)
        free = [j for j in range(self.ncols) if j not in pivot_set]
        cols = []
        for j in free:
            v = [Q(0)] * self.ncols
            v[j] = Q(1)
            for r, pc in enumerate(pivots):
                v[pc] = -red.rows[r][j]
            cols.append(v)
        return QMatrix.from_cols(cols, nrows=self.ncols)

    def left_nullspace(self) -> "QMatrix":
        """Matrix whose rows are a basis of the left kernel (conullity x nrows)."""
        return self.transpose().nullspace_basis().transpose()

    def solve(self, b: "QMatrix") -> "QMatrix | None":
        """A particular solution x of self*x = b, or None if inconsistent."""
        if b.nrows != self.nrows:
            raise ValueError("rhs size mismatch")
        aug = QMatrix.hstack([self, b])
        red, pivots = aug.rref()
        if any(p >= self.ncols for p in pivots):
            return None
        cols = []
        for k in range(b.ncols):
            v = [Q(0)] * self.ncols
            for r, pc in enumerate(pivots):
                v[pc] = red.rows[r][self.ncols + k]
            cols.append(v)
        return QMatrix.from_cols(cols, nrows=self.ncols)

    def column_space_pivots(self) -> tuple[int, ...]:
        return self.rref()[1]


def block_diag(mats: Sequence[QMatrix]) -> QMatrix:
    """Block-diagonal assembly; empty input gives the 0x0 matrix."""
    nrows = sum(m.nrows for m in mats)
    ncols = sum(m.ncols for m in mats)
    out = [[Q(0)] * ncols for _ in range(nrows)]
    i0 = 0
    j0 = 0
    for m in mats:
        for i in range(m.nrows):
            for j in range(m.ncols):
                out[i0 + i][j0 + j] = m.rows[i][j]
        i0 += m.nrows
        j0 += m.ncols
    return QMatrix(out, ncols=ncols)


@dataclass(frozen=True)
class GradedQSpace:
    """Finitely supported graded Q-vector space, as sorted (degree, dim) pairs."""

    dims: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        clean = []
        for deg, d in self.dims:
            if not isinstance(deg, int) or not isinstance(d, int):
                raise TypeError("degrees and dimensions must be ints")
            if d < 0:
                raise ValueError(f"negative dimension in degree {deg}")
            if d > 0:
                clean.append((deg, d))
        clean.sort()
        degs = [deg for deg, _ in clean]
        if len(set(degs)) != len(degs):
            raise ValueError("repeated degree")
        object.__setattr__(self, "dims", tuple(clean))

    @classmethod
    def single(cls, degree: int, dim: int = 1) -> "GradedQSpace":
        return cls(((degree, dim),))

    @classmethod
    def span(cls, mapping: Mapping[int, int]) -> "GradedQSpace":
        return cls(tuple(mapping.items()))

    def dim(self, degree: int) -> int:
        for deg, d in self.dims:
            if deg == degree:
                return d
        return 0

    def degrees(self) -> tuple[int, ...]:
        return tuple(deg for deg, _ in self.dims)

    def total_dim(self) -> int:
        return sum(d for _, d in self.dims)

    def is_zero(self) -> bool:
        return not self.dims

    def min_degree(self) -> int | None:
        return self.dims[0][0] if self.dims else None

    def max_degree(self) -> int | None:
        return self.dims[-1][0] if self.dims else None

    def shifted(self, delta: int) -> "GradedQSpace":
        return GradedQSpace(tuple((deg + delta, d) for deg, d in self.dims))

    def direct_sum(self, other: "GradedQSpace") -> "GradedQSpace":
        acc = dict(self.dims)
        for deg, d in other.dims:
            acc[deg] = acc.get(deg, 0) + d
        return GradedQSpace(tuple(acc.items()))


class GradedQMap:
    """Degree-homogeneous linear map between graded spaces.

    blocks[n] sends the source piece in degree n to the target piece in
    degree n + shift; missing blocks are zero.
    """

    __slots__ = ("source", "target", "shift", "blocks")

    def __init__(
        self,
        source: GradedQSpace,
        target: GradedQSpace,
        shift: int,
        blocks: Mapping[int, QMatrix],
    ):
        clean: dict[int, QMatrix] = {}
        for n, mat in blocks.items():
            want = (target.dim(n + shift), source.dim(n))
            if (mat.nrows, mat.ncols) != want:
                raise ValueError(f"block at degree {n}: shape {(mat.nrows, mat.ncols)} != {want}")
            if mat.nrows and mat.ncols and not mat.is_zero():
                clean[n] = mat
        self.source = source
        self.target = target
        self.shift = shift
        self.blocks = clean

    @classmethod
    def zero(cls, source: GradedQSpace, target: GradedQSpace, shift: int = 0) -> "GradedQMap":
        return cls(source, target, shift, {})

    @classmethod
    def identity(cls, space: GradedQSpace) -> "GradedQMap":
        return cls(space, space, 0, {n: QMatrix.identity(d) for n, d in space.dims})

    def block(self, n: int) -> QMatrix:
        got = self.blocks.get(n)
        if got is not None:
            return got
        return QMatrix.zeros(self.target.dim(n + self.shift), self.source.dim(n))

    def compose(self, other: "GradedQMap") -> "GradedQMap":
        """self after other."""
        if other.target != self.source:
            raise ValueError("compose: middle spaces differ")
        blocks = {}
        for n, _ in other.source.dims:
            blocks[n] = self.block(n + other.shift).mul(other.block(n))
        return GradedQMap(other.source, self.target, self.shift + other.shift, blocks)

    def add(self, other: "GradedQMap") -> "GradedQMap":
        if (self.source, self.target, self.shift) != (other.source, other.target, other.shift):
            raise ValueError("add: incompatible maps")
        blocks = {}
        for n in set(self.blocks) | set(other.blocks):
            blocks[n] = self.block(n).add(other.block(n))
        return GradedQMap(self.source, self.target, self.shift, blocks)

    def sub(self, other: "GradedQMap") -> "GradedQMap":
        return self.add(other.scale(-1))

    def scale(self, c: object) -> "GradedQMap":
        return GradedQMap(
            self.source, self.target, self.shift,
            {n: m.scale(c) for n, m in self.blocks.items()},
        )

    def is_zero(self) -> bool:
        return not self.blocks

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GradedQMap):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and self.shift == other.shift
            and self.blocks == other.blocks
        )

    def __hash__(self) -> int:
        return hash((self.source, self.target, self.shift, tuple(sorted(self.blocks.items()))))

    def __repr__(self) -> str:
        return f"GradedQMap(shift={self.shift}, blocks at {sorted(self.blocks)})"

    def kernel(self) -> tuple[GradedQSpace, "GradedQMap"]:
        """Kernel space and its inclusion into the source."""
        dims = {}
        blocks = {}
        for n, _ in self.source.dims:
            nb = self.block(n).nullspace_basis()
            if nb.ncols:
                dims[n] = nb.ncols
                blocks[n] = nb
        ker = GradedQSpace(tuple(dims.items()))
        return ker, GradedQMap(ker, self.source, 0, blocks)

    def cokernel(self) -> tuple[GradedQSpace, "GradedQMap"]:
        """Cokernel space and the projection from the target."""
        dims = {}
        blocks = {}
        for m, _ in self.target.dims:
            ln = self.block(m - self.shift).left_nullspace()
            if ln.nrows:
                dims[m] = ln.nrows
                blocks[m] = ln
        cok = GradedQSpace(tuple(dims.items()))
        return cok, GradedQMap(self.target, cok, 0, blocks)

    def rank_total(self) -> int:
        return sum(m.rank() for m in self.blocks.values())


@dataclass(frozen=True)
class FiniteGroupData:
    """Finite group as a multiplication table over named elements."""

    elements: tuple[str, ...]
    table: tuple[tuple[int, ...], ...]
    identity: int
    generators: tuple[int, ...]

    @property
    def order(self) -> int:
        return len(self.elements)

    def mul(self, i: int, j: int) -> int:
        return self.table[i][j]

    def inverse(self, i: int) -> int:
        for j in range(self.order):
            if self.mul(i, j) == self.identity:
                return j
        raise ValueError(f"no inverse for element {i}")

    def validate(self) -> None:
        n = self.order
        if len(self.table) != n or any(len(row) != n for row in self.table):
            raise ValueError("table shape mismatch")
        for i in range(n):
            if self.mul(self.identity, i) != i or self.mul(i, self.identity) != i:
                raise ValueError("identity fails")
        for i in range(n):
            if sorted(self.table[i]) != list(range(n)):
                raise ValueError("row is not a permutation")
            if sorted(self.table[r][i] for r in range(n)) != list(range(n)):
                raise ValueError("column is not a permutation")
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if self.mul(self.mul(i, j), k) != self.mul(i, self.mul(j, k)):
                        raise ValueError("associativity fails")
        for i in range(n):
            self.inverse(i)
        if len(self.words()) != n:
            raise ValueError("generators do not generate")

    def words(self) -> dict[int, tuple[int, ...]]:
        """Generator words via BFS; product of the word letters is the element."""
        out: dict[int, tuple[int, ...]] = {self.identity: ()}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for g in self.generators:
                    y = self.mul(x, g)
                    if y not in out:
                        out[y] = out[x] + (g,)
                        nxt.append(y)
            frontier = nxt
        return out

    @classmethod
    def trivial(cls) -> "FiniteGroupData":
        return cls(elements=("e",), table=((0,),), identity=0, generators=())

    @classmethod
    def cyclic(cls, n: int) -> "FiniteGroupData":
        if n < 1:
            raise ValueError("order must be positive")
        if n == 1:
            return cls.trivial()
        names = tuple("e" if k == 0 else ("g" if k == 1 else f"g^{k}") for k in range(n))
        table = tuple(tuple((i + j) % n for j in range(n)) for i in range(n))
        return cls(elements=names, table=table, identity=0, generators=(1,))

    @classmethod
    def symmetric3(cls) -> "FiniteGroupData":
        perms = [
            (0, 1, 2), (1, 0, 2), (0, 2, 1), (2, 1, 0), (1, 2, 0), (2, 0, 1),
        ]
        names = ("e", "s12", "s23", "s13", "c123", "c132")
        index = {p: i for i, p in enumerate(perms)}

        def comp(p, q):
            # apply q first, then p
            return tuple(p[q[i]] for i in range(3))

        table = tuple(tuple(index[comp(perms[i], perms[j])] for j in range(6)) for i in range(6))
        return cls(elements=names, table=table, identity=0, generators=(1, 4))


class QRepresentation:
    """Action of a finite group on a graded space by shift-0 maps."""

    __slots__ = ("group", "space", "gen_maps", "_maps")

    def __init__(
        self,
        group: FiniteGroupData,
        space: GradedQSpace,
        gen_maps: Mapping[int, GradedQMap],
    ):
        for g in group.generators:
            if g not in gen_maps:
                raise ValueError(f"missing map for generator {g}")
            m = gen_maps[g]
            if m.source != space or m.target != space or m.shift != 0:
                raise ValueError(f"generator {g} map is not an endomorphism of the space")
        self.group = group
        self.space = space
        self.gen_maps = dict(gen_maps)
        self._maps: dict[int, GradedQMap] = {group.identity: GradedQMap.identity(space)}

    def element_map(self, i: int) -> GradedQMap:
        got = self._maps.get(i)
        if got is not None:
            return got
        word = self.group.words().get(i)
        if word is None:
            raise ValueError(f"element {i} not generated")
        m = GradedQMap.identity(self.space)
        for letter in word:
            m = m.compose(self.gen_maps[letter])
        self._maps[i] = m
        return m

    def validate(self) -> None:
        for i in range(self.group.order):
            for j in range(self.group.order):
                lhs = self.element_map(i).compose(self.element_map(j))
                if lhs != self.element_map(self.group.mul(i, j)):
                    raise ValueError(f"representation fails at ({i}, {j})")

    @classmethod
    def trivial(cls, group: FiniteGroupData, space: GradedQSpace) -> "QRepresentation":
        ident = GradedQMap.identity(space)
        return cls(group, space, {g: ident for g in group.generators})

    @classmethod
    def regular(cls, group: FiniteGroupData) -> "QRepresentation":
        n = group.order
        space = GradedQSpace.single(0, n)
        maps = {}
        for g in group.generators:
            rows = [[0] * n for _ in range(n)]
            for x in range(n):
                rows[group.mul(g, x)][x] = 1
            maps[g] = GradedQMap(space, space, 0, {0: QMatrix(rows, ncols=n)})
        return cls(group, space, maps)

    def direct_sum(self, other: "QRepresentation") -> "QRepresentation":
        if self.group != other.group:
            raise ValueError("direct sum needs one group")
        # in each degree the sum's coordinates are self's basis then other's
        space = self.space.direct_sum(other.space)
        maps = {}
        for g in self.group.generators:
            blocks = {}
            for n, _ in space.dims:
                blocks[n] = block_diag([self.element_map(g).block(n), other.element_map(g).block(n)])
            maps[g] = GradedQMap(space, space, 0, blocks)
        return QRepresentation(self.group, space, maps)


def averaging_map(rep: QRepresentation) -> GradedQMap:
    """The idempotent (1/|G|) sum of all element maps."""
    n = rep.group.order
    acc = GradedQMap.zero(rep.space, rep.space, 0)
    for i in range(n):
        acc = acc.add(rep.element_map(i))
    avg = acc.scale(Q(1, n))
    if avg.compose(avg) != avg:
        raise AssertionError("averaging map is not idempotent; not a representation?")
    return avg


def invariants(rep: QRepresentation) -> tuple[GradedQSpace, GradedQMap, GradedQMap]:
    """Invariant subspace with inclusion and the averaging projection onto it.

    proj . incl is the identity of the subspace and incl . proj is the
    averaging idempotent.
    """
    avg = averaging_map(rep)
    dims = {}
    incl_blocks = {}
    proj_blocks = {}
    for deg, d in rep.space.dims:
        p = avg.block(deg)
        pivots = p.column_space_pivots()
        if not pivots:
            continue
        basis = QMatrix.from_cols([p.col(j) for j in pivots], nrows=d)
        coords = basis.solve(p)
        if coords is None:
            raise AssertionError("image basis does not span averaged block")
        dims[deg] = len(pivots)
        incl_blocks[deg] = basis
        proj_blocks[deg] = coords
    sub = GradedQSpace(tuple(dims.items()))
    incl = GradedQMap(sub, rep.space, 0, incl_blocks)
    proj = GradedQMap(rep.space, sub, 0, proj_blocks)
    return sub, incl, proj


def _hom_entries(repA: QRepresentation, repB: QRepresentation, shift: int):
    entries = []
    for n, a in repA.space.dims:
        b = repB.space.dim(n + shift)
        for i in range(b):
            for j in range(a):
                entries.append((n, i, j))
    return entries


def _flatten(phi: GradedQMap, entries) -> list[Fraction]:
    return [phi.block(n).entry(i, j) for (n, i, j) in entries]


def _unflatten(
    vec: Sequence[Fraction],
    repA: QRepresentation,
    repB: QRepresentation,
    shift: int,
    entries,
) -> GradedQMap:
    blocks: dict[int, list[list[Fraction]]] = {}
    for n, a in repA.space.dims:
        b = repB.space.dim(n + shift)
        if a and b:
            blocks[n] = [[Q(0)] * a for _ in range(b)]
    for val, (n, i, j) in zip(vec, entries):
        blocks[n][i][j] = val
    return GradedQMap(
        repA.space, repB.space, shift,
        {n: QMatrix(rows, ncols=repA.space.dim(n)) for n, rows in blocks.items()},
    )


def equivariant_hom_basis(
    repA: QRepresentation, repB: QRepresentation, shift: int
) -> list[GradedQMap]:
    """Basis of the G-equivariant maps A -> B of the given degree shift."""
    if repA.group != repB.group:
        raise ValueError("representations of different groups")
    group = repA.group
    entries = _hom_entries(repA, repB, shift)
    if not entries:
        return []
    cols = []
    for k in range(len(entries)):
        unit = [Q(0)] * len(entries)
        unit[k] = Q(1)
        phi = _unflatten(unit, repA, repB, shift, entries)
        acc = GradedQMap.zero(repA.space, repB.space, shift)
        for g in range(group.order):
            term = repB.element_map(g).compose(phi).compose(repA.element_map(group.inverse(g)))
            acc = acc.add(term)
        cols.append(_flatten(acc.scale(Q(1, group.order)), entries))
    pmat = QMatrix.from_cols(cols, nrows=len(entries))
    pivots = pmat.column_space_pivots()
    return [
        _unflatten(pmat.col(j), repA, repB, shift, entries) for j in pivots
    ]


def equivariant_hom_dim(repA: QRepresentation, repB: QRepresentation, shift: int) -> int:
    return len(equivariant_hom_basis(repA, repB, shift))
