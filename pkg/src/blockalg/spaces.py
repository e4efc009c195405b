"""Block spaces: a countable height-0 layer capped by one height-1 point.

A space is pure bookkeeping: finitely many parametrized series of
subgroup labels (plus optional sporadic single points), each carrying
topology flags, a stalk ring, a finite component group, and a twist
recording how that group acts on the stalk ring.  Every computation in
the layers above touches only finitely many members of any series, so
infinite series are stored as uniform per-series data and objects over
them as a default plus finitely many exceptions.

Three derived classes of members drive everything:

  k1  members cotoral in the top point; their stalks are Q[c]-modules
      and localization inverts powers of c.
  k0  members not cotoral but with the top point as a limit; their
      stalks are plain graded Q-spaces and localization inverts
      characteristic functions of cofinite member sets.
  kr  members with no limit point in the space; they split off as a
      product of height-0 factors and the model layers never see them.

Coordinate elements are default-1 functions on the members with
finitely many exceptions: a c-exponent at a k1 member, a zero at a k0
member.  Exceptions must be invariant under the component twist, which
pins the allowed exponents to multiples of a per-series step.

Germ spaces model the value of a localized product at the top point: a
family of graded Q-spaces modulo eventual equality.  Finite exception
sets are invisible there, and any degree where the default stalk is
nonzero over an infinite universe has infinite dimension, reported via
the INF sentinel.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Mapping, Optional, Sequence, Union

from .linear import FiniteGroupData, GradedQSpace
from .stalks import StalkRing

Q = Fraction


class _Infinite:
    """Dimension sentinel sitting above every integer."""

    __slots__ = ()

    def __repr__(self) -> str:
        return "INF"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, _Infinite)

    def __hash__(self) -> int:
        return hash("blockalg.INF")

    def __add__(self, other):
        if isinstance(other, (int, _Infinite)):
            return self
        return NotImplemented

    __radd__ = __add__

    def __mul__(self, other):
        if isinstance(other, _Infinite):
            return self
        if isinstance(other, int):
            if other < 0:
                raise ValueError("negative multiple of an infinite dimension")
            return 0 if other == 0 else self
        return NotImplemented

    __rmul__ = __mul__

    def __lt__(self, other):
        if isinstance(other, (int, _Infinite)):
            return False
        return NotImplemented

    def __le__(self, other):
        if isinstance(other, _Infinite):
            return True
        if isinstance(other, int):
            return False
        return NotImplemented

    def __gt__(self, other):
        if isinstance(other, int):
            return True
        if isinstance(other, _Infinite):
            return False
        return NotImplemented

    def __ge__(self, other):
        if isinstance(other, (int, _Infinite)):
            return True
        return NotImplemented


INF = _Infinite()

Dim = Union[int, _Infinite]


class SheafType(Enum):
    TYPE0 = "type0"
    TYPE1 = "type1"
    MIXED = "mixed"


@dataclass(frozen=True)
class SeriesData:
    """One parametrized family of member points, uniform in its data.

    size None means parameters range over every n >= 1; an integer k
    means parameters 1..k.  A sporadic point is a size-1 series whose
    pattern is simply its display name.  weyl_to_top maps each element
    index of weyl to an element index of the space's top component
    group; it may be None only for finite series, since an infinite
    series must carry the homomorphism at almost all of its members.
    """

    name: str
    pattern: str
    cotoral_in_top: Optional[bool]
    h_converges_to_top: Optional[bool]
    ring: StalkRing
    weyl: FiniteGroupData = FiniteGroupData.trivial()
    weyl_to_top: Optional[tuple[int, ...]] = None
    lam: Fraction = Q(1)
    coordinate_step: int = 1
    size: Optional[int] = None
    notes: str = ""

    def __post_init__(self):
        object.__setattr__(self, "lam", Fraction(self.lam))
        if self.weyl_to_top is not None:
            object.__setattr__(self, "weyl_to_top", tuple(self.weyl_to_top))
        if self.size is not None and self.size < 1:
            raise ValueError(f"series {self.name!r}: size must be positive when finite")
        if self.coordinate_step < 1:
            raise ValueError(f"series {self.name!r}: coordinate step must be positive")

    @property
    def infinite(self) -> bool:
        return self.size is None

    def member_name(self, parameter: int) -> str:
        return self.pattern.format(n=parameter)

    @property
    def coordinate_descriptor(self) -> str:
        if self.ring.has_c:
            if self.coordinate_step == 1:
                return "powers of c"
            return f"powers of c^{self.coordinate_step}"
        return "characteristic functions of cofinite sets"


@dataclass(frozen=True, order=True)
class Member:
    """A single point of the space: a series name plus a parameter."""

    series: str
    parameter: int


@dataclass(frozen=True)
class SubgroupLabel:
    """A named subgroup fed to block partitioning.

    pi_image lists the element indices of the image in the ambient
    component group; None marks it unknown.
    """

    name: str
    series: Optional[str] = None
    parameter: Optional[int] = None
    finite: bool = True
    pi_image: Optional[frozenset[int]] = None

    def __post_init__(self):
        if self.pi_image is not None:
            object.__setattr__(self, "pi_image", frozenset(self.pi_image))


def series_class(s: SeriesData) -> str:
    """'k1', 'k0' or 'kr' from the topology flags."""
    if s.cotoral_in_top is None or s.h_converges_to_top is None:
        raise ValueError(f"series {s.name!r} is missing topology flags")
    if s.cotoral_in_top:
        return "k1"
    if s.h_converges_to_top:
        return "k0"
    return "kr"


def _check_homomorphism(
    src: FiniteGroupData, dst: FiniteGroupData, h: tuple[int, ...], label: str
) -> None:
    if len(h) != src.order:
        raise ValueError(f"series {label!r}: component homomorphism has wrong length")
    if any(not (0 <= v < dst.order) for v in h):
        raise ValueError(f"series {label!r}: component homomorphism image out of range")
    if h[src.identity] != dst.identity:
        raise ValueError(f"series {label!r}: component homomorphism drops the identity")
    for i in range(src.order):
        for j in range(src.order):
            if h[src.mul(i, j)] != dst.mul(h[i], h[j]):
                raise ValueError(f"series {label!r}: component map is not a homomorphism")


@dataclass(frozen=True)
class IsotropySpace:
    """The block space: series and sporadic points under one top point.

    An empty top_name marks a space of leftover kr points only, with no
    cap; such spaces exist solely as the second factor of split_rest.
    """

    name: str
    top_name: str
    top_weyl: FiniteGroupData
    series: tuple[SeriesData, ...]
    sporadic: tuple[SeriesData, ...] = ()
    top_ring: StalkRing = StalkRing.rational()
    infinite_k0_subsets_converge: bool = True
    notes: str = ""

    def __post_init__(self):
        object.__setattr__(self, "series", tuple(self.series))
        object.__setattr__(self, "sporadic", tuple(self.sporadic))

    @property
    def has_top(self) -> bool:
        return bool(self.top_name)

    def all_series(self) -> tuple[SeriesData, ...]:
        return self.series + self.sporadic

    def series_named(self, name: str) -> SeriesData:
        for s in self.all_series():
            if s.name == name:
                return s
        raise ValueError(f"space {self.name!r} has no series {name!r}")

    def member(self, series_name: str, parameter: int = 1) -> Member:
        s = self.series_named(series_name)
        if parameter < 1:
            raise ValueError(f"series {series_name!r}: parameters start at 1")
        if s.size is not None and parameter > s.size:
            raise ValueError(
                f"series {series_name!r} has {s.size} member(s), not {parameter}"
            )
        return Member(series_name, parameter)

    def member_display(self, member: Member) -> str:
        return self.series_named(member.series).member_name(member.parameter)

    def member_class(self, member: Member) -> str:
        return series_class(self.series_named(member.series))

    @property
    def sheaf_type(self) -> SheafType:
        has_poly = any(s.ring.has_c for s in self.all_series())
        has_rational = any(not s.ring.has_c for s in self.all_series())
        if has_poly and has_rational:
            return SheafType.MIXED
        if has_poly:
            return SheafType.TYPE1
        return SheafType.TYPE0

    def validate(self) -> None:
        names = [s.name for s in self.all_series()]
        if len(set(names)) != len(names):
            raise ValueError(f"space {self.name!r}: duplicate series names")
        if self.top_ring.has_c:
            raise ValueError(f"space {self.name!r}: the top point has rational scalars")
        self.top_weyl.validate()
        for s in self.sporadic:
            if s.size != 1:
                raise ValueError(f"sporadic point {s.name!r} must have size 1")
        for s in self.all_series():
            s.weyl.validate()
            cls = series_class(s)
            if not self.has_top and cls != "kr":
                raise ValueError(
                    f"space {self.name!r} has no top point, so {s.name!r} cannot converge"
                )
            if cls == "k1" and not s.h_converges_to_top:
                raise ValueError(f"cotoral series {s.name!r} must converge to the top")
            if cls == "k1" and not s.ring.has_c:
                raise ValueError(f"cotoral series {s.name!r} needs polynomial stalks")
            if cls != "k1" and s.ring.has_c:
                raise ValueError(f"non-cotoral series {s.name!r} needs rational stalks")
            if s.ring.has_c:
                if s.lam not in (Q(1), Q(-1)):
                    raise ValueError(f"series {s.name!r}: the twist must be 1 or -1")
                if s.lam**s.coordinate_step != 1:
                    raise ValueError(
                        f"series {s.name!r}: coordinate elements are not twist-invariant"
                    )
            else:
                if s.lam != 1:
                    raise ValueError(f"series {s.name!r}: rational stalks have no twist")
                if s.coordinate_step != 1:
                    raise ValueError(f"series {s.name!r}: coordinate step without c")
            if s.weyl_to_top is None:
                if s.infinite:
                    raise ValueError(
                        f"infinite series {s.name!r} needs a component homomorphism"
                    )
            elif self.has_top:
                _check_homomorphism(s.weyl, self.top_weyl, s.weyl_to_top, s.name)


@dataclass(frozen=True)
class Partition:
    k0: tuple[SeriesData, ...]
    k1: tuple[SeriesData, ...]
    kr: tuple[SeriesData, ...]

    @property
    def k0_names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.k0)

    @property
    def k1_names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.k1)

    @property
    def kr_names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.kr)


def partition(space: IsotropySpace) -> Partition:
    """Sort every series and sporadic point into k0, k1 or kr."""
    buckets: dict[str, list[SeriesData]] = {"k0": [], "k1": [], "kr": []}
    for s in space.all_series():
        buckets[series_class(s)].append(s)
    return Partition(tuple(buckets["k0"]), tuple(buckets["k1"]), tuple(buckets["kr"]))


def is_almost_irreducible(space: IsotropySpace) -> bool:
    """No leftover points, and infinite k0 subsets all converge to the top."""
    return not partition(space).kr and space.infinite_k0_subsets_converge


@dataclass(frozen=True)
class RestSplit:
    """Factorization descriptor produced by split_rest."""

    core_name: str
    rest_name: str
    rest_points: tuple[str, ...]
    rest_shape: str = "height-0 product, one factor per point"


def split_rest(space: IsotropySpace) -> tuple[IsotropySpace, IsotropySpace, RestSplit]:
    """Peel off the kr members as a topless product factor."""
    part = partition(space)
    kr_names = set(part.kr_names)
    rest = IsotropySpace(
        name=f"{space.name}/rest",
        top_name="",
        top_weyl=FiniteGroupData.trivial(),
        series=tuple(
            replace(s, weyl_to_top=None) for s in space.series if s.name in kr_names
        ),
        sporadic=tuple(
            replace(s, weyl_to_top=None) for s in space.sporadic if s.name in kr_names
        ),
        notes=space.notes,
    )
    if kr_names:
        core = replace(
            space,
            name=f"{space.name}/core",
            series=tuple(s for s in space.series if s.name not in kr_names),
            sporadic=tuple(s for s in space.sporadic if s.name not in kr_names),
        )
    else:
        core = space
    core.validate()
    rest.validate()
    return core, rest, RestSplit(core.name, rest.name, part.kr_names)


@dataclass(frozen=True)
class WedgeSplit:
    """Cospan descriptor: both halves map to the block of the top point alone."""

    limit_name: str
    cotoral_name: str
    vertex_name: str


def wedge_decompose(
    space: IsotropySpace,
) -> tuple[IsotropySpace, IsotropySpace, WedgeSplit]:
    """Split an almost irreducible space into its k0 and k1 halves."""
    if not is_almost_irreducible(space):
        raise ValueError(f"space {space.name!r} is not almost irreducible")
    part = partition(space)
    k0_names = set(part.k0_names)
    k1_names = set(part.k1_names)
    v0 = replace(
        space,
        name=f"{space.name}/limit",
        series=tuple(s for s in space.series if s.name in k0_names),
        sporadic=tuple(s for s in space.sporadic if s.name in k0_names),
    )
    v1 = replace(
        space,
        name=f"{space.name}/cotoral",
        series=tuple(s for s in space.series if s.name in k1_names),
        sporadic=tuple(s for s in space.sporadic if s.name in k1_names),
    )
    v0.validate()
    v1.validate()
    return v0, v1, WedgeSplit(v0.name, v1.name, f"{space.name}/top")


def _subgroup_check(image: frozenset[int], w: FiniteGroupData) -> None:
    if not image:
        raise ValueError("empty component image")
    if any(not (0 <= x < w.order) for x in image):
        raise ValueError("component image out of range")
    if w.identity not in image:
        raise ValueError("component image misses the identity")
    for x in image:
        for y in image:
            if w.mul(x, y) not in image:
                raise ValueError("component image is not closed under the product")


def _conjugacy_key(image: frozenset[int], w: FiniteGroupData) -> frozenset[int]:
    _subgroup_check(image, w)
    best: Optional[tuple[int, ...]] = None
    for g in range(w.order):
        gi = w.inverse(g)
        conj = tuple(sorted(w.mul(w.mul(g, x), gi) for x in image))
        if best is None or conj < best:
            best = conj
    assert best is not None
    return frozenset(best)


def block_partition(
    subgroups: Sequence[SubgroupLabel], w: FiniteGroupData
) -> dict[frozenset[int], tuple[SubgroupLabel, ...]]:
    """Group labels by the conjugacy class of their component image."""
    seen: set[tuple[str, Optional[int]]] = set()
    for lab in subgroups:
        if lab.pi_image is None:
            raise ValueError(f"subgroup {lab.name!r} is missing its component image")
        if lab.series is not None:
            key = (lab.series, lab.parameter)
            if key in seen:
                raise ValueError(f"duplicate series member {key}")
            seen.add(key)
    blocks: dict[frozenset[int], list[SubgroupLabel]] = {}
    for lab in subgroups:
        assert lab.pi_image is not None
        blocks.setdefault(_conjugacy_key(lab.pi_image, w), []).append(lab)
    ordered = sorted(blocks.items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))
    return {key: tuple(labs) for key, labs in ordered}


def euler_exponent(characters: Sequence[int], m: int) -> int:
    """c-exponent at an order-m member carried by the listed rotation numbers.

    A summand with rotation number n contributes a fixed line at the
    order-m member exactly when m divides n.
    """
    if not isinstance(m, int) or m < 1:
        raise ValueError("modulus must be a positive integer")
    count = 0
    for n in characters:
        if n == 0:
            raise ValueError("zero rotation number: fixed lines at the top are excluded")
        if n % m == 0:
            count += 1
    return count


@dataclass(frozen=True)
class MultiplicativeElement:
    """Default-1 coordinate function with finitely many exceptions.

    The exception value at a k1 member is the exponent of the c-power
    it carries there (so it must be a positive multiple of the series
    coordinate step); at a k0 member it is 0, marking the member as
    dropped from the cofinite support.
    """

    exceptions: tuple[tuple[Member, int], ...] = ()

    def __post_init__(self):
        exc = tuple(sorted(self.exceptions))
        members = [m for m, _ in exc]
        if len(set(members)) != len(members):
            raise ValueError("repeated member in the exception list")
        object.__setattr__(self, "exceptions", exc)

    @classmethod
    def one(cls) -> "MultiplicativeElement":
        return cls()

    @classmethod
    def from_dict(cls, mapping: Mapping[Member, int]) -> "MultiplicativeElement":
        return cls(tuple(mapping.items()))

    def local_value(self, space: IsotropySpace, member: Member) -> int:
        """Exponent at a k1 member (default 0); value at a k0 member (default 1)."""
        for m, v in self.exceptions:
            if m == member:
                return v
        return 0 if space.member_class(member) == "k1" else 1

    def validate(self, space: IsotropySpace) -> None:
        for m, v in self.exceptions:
            s = space.series_named(m.series)
            space.member(m.series, m.parameter)
            cls = series_class(s)
            if cls == "kr":
                raise ValueError(
                    f"member {space.member_display(m)!r} has no limit point and "
                    "carries no coordinate value"
                )
            if cls == "k1":
                if v < 1:
                    raise ValueError(
                        f"member {space.member_display(m)!r}: exception must be a "
                        "positive c-exponent"
                    )
                if v % s.coordinate_step:
                    raise ValueError(
                        f"member {space.member_display(m)!r}: exponent {v} is not "
                        "twist-invariant"
                    )
            else:
                if v != 0:
                    raise ValueError(
                        f"member {space.member_display(m)!r}: k0 exceptions must be 0"
                    )

    def times(
        self, other: "MultiplicativeElement", space: IsotropySpace
    ) -> "MultiplicativeElement":
        """Pointwise product: c-exponents add, zero-one values multiply."""
        vals = dict(self.exceptions)
        for m, v in other.exceptions:
            if m in vals:
                s = space.series_named(m.series)
                vals[m] = vals[m] + v if s.ring.has_c else vals[m] * v
            else:
                vals[m] = v
        out = MultiplicativeElement(tuple(vals.items()))
        out.validate(space)
        return out


@dataclass(frozen=True)
class GermSpace:
    """A family of graded Q-spaces over the members, modulo eventual equality.

    default is the stalk at all but finitely many members; exceptions
    record the finitely many deviating stalks of one presentation.  Two
    presentations are identified when they agree off a finite set, so
    the exceptions are invisible to equality and dimension, and over a
    finite universe every presentation collapses to zero.
    """

    default: GradedQSpace = GradedQSpace()
    exceptions: tuple[tuple[Member, GradedQSpace], ...] = ()
    universe_infinite: bool = True

    def __post_init__(self):
        exc = tuple(sorted(self.exceptions, key=lambda kv: kv[0]))
        members = [m for m, _ in exc]
        if len(set(members)) != len(members):
            raise ValueError("repeated member in the exception list")
        object.__setattr__(self, "exceptions", exc)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GermSpace):
            return NotImplemented
        if self.universe_infinite != other.universe_infinite:
            return False
        if not self.universe_infinite:
            return True
        return self.default == other.default

    def __hash__(self) -> int:
        return hash((self.universe_infinite, self.default if self.universe_infinite else None))

    def is_zero(self) -> bool:
        return not self.universe_infinite or self.default.is_zero()


def germ_dimension(germ: GermSpace, degree: int) -> Dim:
    """0 unless infinitely many stalks are nonzero in the degree, then INF."""
    if not germ.universe_infinite:
        return 0
    return INF if germ.default.dim(degree) > 0 else 0


def _circle_t() -> IsotropySpace:
    return IsotropySpace(
        name="circle_T",
        top_name="T",
        top_weyl=FiniteGroupData.trivial(),
        series=(
            SeriesData(
                name="cyclic",
                pattern="C_{n}",
                cotoral_in_top=True,
                h_converges_to_top=True,
                ring=StalkRing.poly(),
                weyl_to_top=(0,),
                notes="every proper closed subgroup of the circle is finite cyclic",
            ),
        ),
        notes="finite subgroups of the circle under the circle itself",
    )


def _toral_block(name: str, top_name: str) -> IsotropySpace:
    return IsotropySpace(
        name=name,
        top_name=top_name,
        top_weyl=FiniteGroupData.cyclic(2),
        series=(
            SeriesData(
                name="cyclic",
                pattern="C_{n}",
                cotoral_in_top=True,
                h_converges_to_top=True,
                ring=StalkRing.poly(),
                weyl=FiniteGroupData.cyclic(2),
                weyl_to_top=(0, 1),
                lam=Q(-1),
                coordinate_step=2,
                notes="the reflection class negates c on every cyclic stalk",
            ),
        ),
        notes="cyclic subgroups under the maximal circle",
    )


def _full_limit_block(
    name: str, top_name: str, series_name: str, pattern: str, order: int, notes: str
) -> IsotropySpace:
    w = FiniteGroupData.cyclic(order)
    return IsotropySpace(
        name=name,
        top_name=top_name,
        top_weyl=FiniteGroupData.trivial(),
        series=(
            SeriesData(
                name=series_name,
                pattern=pattern,
                cotoral_in_top=False,
                h_converges_to_top=True,
                ring=StalkRing.rational(),
                weyl=w,
                weyl_to_top=tuple(0 for _ in range(w.order)),
                notes=notes,
            ),
        ),
        notes="one series of limit points under the whole group",
    )


def _t_times_c2_full() -> IsotropySpace:
    return IsotropySpace(
        name="t_times_c2_full",
        top_name="T x C_2",
        top_weyl=FiniteGroupData.trivial(),
        series=(
            SeriesData(
                name="product_cyclic",
                pattern="C_n x C_2[n={n}]",
                cotoral_in_top=True,
                h_converges_to_top=True,
                ring=StalkRing.poly(),
                weyl_to_top=(0,),
            ),
            SeriesData(
                name="twisted_cyclic",
                pattern="C'_2n[n={n}]",
                cotoral_in_top=True,
                h_converges_to_top=True,
                ring=StalkRing.poly(),
                weyl_to_top=(0,),
                notes="cyclic members meeting the circle in index 2",
            ),
        ),
        notes="subgroups with full component image, all cotoral",
    )


def _t2_semifree() -> IsotropySpace:
    return IsotropySpace(
        name="t2_semifree",
        top_name="T^2",
        top_weyl=FiniteGroupData.trivial(),
        series=(
            SeriesData(
                name="unit",
                pattern="1",
                cotoral_in_top=True,
                h_converges_to_top=True,
                ring=StalkRing.poly(),
                weyl_to_top=(0,),
                size=1,
                notes="single member: the trivial subgroup under the full torus",
            ),
        ),
        notes="two points only: the trivial subgroup and the torus",
    )


def _t_times_o2() -> IsotropySpace:
    return IsotropySpace(
        name="t_times_o2",
        top_name="T x O(2)",
        top_weyl=FiniteGroupData.trivial(),
        series=(
            SeriesData(
                name="toral_product",
                pattern="C_m x O(2)[m={n}]",
                cotoral_in_top=True,
                h_converges_to_top=True,
                ring=StalkRing.poly(),
                weyl_to_top=(0,),
            ),
            SeriesData(
                name="dihedral_product",
                pattern="T x D_2n[n={n}]",
                cotoral_in_top=False,
                h_converges_to_top=True,
                ring=StalkRing.rational(),
                weyl=FiniteGroupData.cyclic(2),
                weyl_to_top=(0, 0),
            ),
        ),
        notes="both a cotoral series and a limit series, each infinite",
    )


def _u2_block() -> IsotropySpace:
    return IsotropySpace(
        name="u2_torus_normalizer_dim_ge_1",
        top_name="N_U(2)(T^2)",
        top_weyl=FiniteGroupData.trivial(),
        series=(
            SeriesData(
                name="antidiagonal",
                pattern="A_{n}",
                cotoral_in_top=True,
                h_converges_to_top=True,
                ring=StalkRing.poly(),
                weyl=FiniteGroupData.cyclic(2),
                weyl_to_top=(0, 0),
                lam=Q(-1),
                coordinate_step=2,
                notes="cotoral circle extensions; the flip negates c",
            ),
            SeriesData(
                name="central",
                pattern="Z_{n}",
                cotoral_in_top=False,
                h_converges_to_top=True,
                ring=StalkRing.rational(),
                weyl=FiniteGroupData.cyclic(2),
                weyl_to_top=(0, 0),
                notes="limit members containing the central circle",
            ),
        ),
        notes="subgroups of dimension at least 1, below the whole normalizer",
    )


_CATALOG: dict[str, Callable[[], IsotropySpace]] = {
    "circle_T": _circle_t,
    "o2_toral": lambda: _toral_block("o2_toral", "SO(2)"),
    "o2_full": lambda: _full_limit_block(
        "o2_full",
        "O(2)",
        "dihedral",
        "D_2n[n={n}]",
        2,
        "each dihedral point carries an order-2 component group",
    ),
    "pin2_toral": lambda: _toral_block("pin2_toral", "Spin(2)"),
    "pin2_full": lambda: _full_limit_block(
        "pin2_full",
        "Pin(2)",
        "quaternion",
        "Q_4n[n={n}]",
        2,
        "each quaternion point carries an order-2 component group",
    ),
    "t_times_c2_full": _t_times_c2_full,
    "t2_semifree": _t2_semifree,
    "t_times_o2": _t_times_o2,
    "su3_normalizer_full": lambda: _full_limit_block(
        "su3_normalizer_full",
        "N_SU(3)(T^2)",
        "full_image",
        "F_{n}",
        3,
        "each member carries an order-3 component group",
    ),
    "t2_c3_full": lambda: _full_limit_block(
        "t2_c3_full",
        "T^2 : C_3",
        "full_image",
        "E_{n}",
        3,
        "each member carries an order-3 component group",
    ),
    "u2_torus_normalizer_dim_ge_1": _u2_block,
}

CATALOG_NAMES: tuple[str, ...] = tuple(_CATALOG)


@lru_cache(maxsize=None)
def catalog(name: str) -> IsotropySpace:
    """A named, fully flagged space, validated on first load."""
    try:
        builder = _CATALOG[name]
    except KeyError:
        known = ", ".join(CATALOG_NAMES)
        raise ValueError(f"unknown catalog name {name!r}; known names: {known}") from None
    space = builder()
    space.validate()
    return space
