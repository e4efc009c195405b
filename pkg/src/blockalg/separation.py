"""Separated presentations: stalk families spread out from the vertex.

A preseparated object keeps the vertex representation and the stalk family
of a standard object but unties the stalks from the vertex: instead of a
structure map out of each stalk, every polynomial member carries a
spreading map from the localized vertex stalk into the localized stalk.
Nothing forces the spreading maps to be invertible, so the class is larger
than the standard one; the vertex skyscraper (all member stalks zero,
vertex nonzero) is the basic new object.

Separating a standard object inverts its localized structure maps.
Reassembling goes the other way: each stalk of the output is the pullback
of the stalk against the localized vertex along the spreading map, which
restores a structure map and always lands back in the standard class, with
one genuine exception over rational stalks where a nonzero vertex cannot
share its presentation with member stalks.  The round trips are measured
by an explicit unit isomorphism, a counit comparison that really fails on
vertex skyscrapers over polynomial stalks, and cellwise hom comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .linear import GradedQMap, QRepresentation
from .model import (
    DefaultKind,
    ModelMorphism,
    ModelObject,
    StalkData,
    ValidationReport,
    _action_direct_sum,
    _embed_local,
    _localized_structure,
    _merge_disjoint,
    _same_action,
    _same_rep,
    cell_sigma_F,
    cell_sigma_G,
    check_morphism,
    hom,
    morphism_is_iso,
)
from .spaces import (
    IsotropySpace,
    Member,
    MultiplicativeElement,
    SeriesData,
    SheafType,
    series_class,
)
from .stalks import (
    CModule,
    CModuleMap,
    Indecomposable,
    SemilinearAction,
    _solve_map_equations,
    direct_sum_with_maps,
    hom_module_basis,
    kernel_cokernel_cmod,
    localize_c,
    localize_c_with_map,
    transport_action,
)

Q = Fraction


class UnrepresentableError(ValueError):
    """Raised when no standard object presents the reassembled module."""


@dataclass(frozen=True, eq=False)
class SpreadStalk:
    """Stalk module at one member, its component-group action, and the
    spreading map from the localized vertex stalk into the localized stalk.

    Over polynomial stalks the spreading map is a degree-0 linear map; None
    means the zero map.  Over rational stalks the germ of the family is
    carried by the vertex and the default rule alone, so the field must
    stay None.
    """

    module: CModule
    action: SemilinearAction
    spread: Optional[CModuleMap] = None


@dataclass(frozen=True, eq=False)
class PreseparatedObject:
    """Vertex representation, default rule, and spread-out stalk family.

    The shape data (default kinds, twists, touched members) matches the
    standard objects; only the direction of the gluing map differs, and the
    zero default may now sit under a nonzero vertex.
    """

    space: IsotropySpace
    vertex: QRepresentation
    default: DefaultKind
    twist: MultiplicativeElement = MultiplicativeElement.one()
    exceptions: tuple[tuple[Member, SpreadStalk], ...] = ()
    label: str = ""

    def __post_init__(self):
        if (
            self.space.sheaf_type is SheafType.TYPE0
            and self.default is DefaultKind.LOCALIZED
        ):
            raise ValueError(
                "over rational stalks the localized information is carried by "
                "the vertex; present it with the zero default"
            )
        shape = ModelObject(
            self.space,
            self.vertex,
            self.default,
            self.twist,
            tuple(
                (m, StalkData(sd.module, sd.action, None)) for m, sd in self.exceptions
            ),
            self.label,
        )
        object.__setattr__(self, "_shape", shape)
        object.__setattr__(self, "_spread_cache", {})
        ordered = sorted(self.exceptions, key=lambda pair: pair[0])
        for member, sd in ordered:
            series = self.space.series_named(member.series)
            if series_class(series) == "k0":
                if sd.spread is not None:
                    raise ValueError("rational stalks carry no spreading map")
                continue
            if sd.spread is None:
                continue
            s = sd.spread
            if s.degree != 0 or s.lam != 1:
                raise ValueError("spreading maps are linear of degree 0")
            if s.source != shape.local_target(member):
                raise ValueError("spreading map source is not the localized vertex stalk")
            if s.target != localize_c(sd.module):
                raise ValueError("spreading map target is not the localized stalk")
        object.__setattr__(self, "exceptions", tuple(ordered))

    # -- derived shape -------------------------------------------------

    @property
    def sheaf_type(self) -> SheafType:
        return self.space.sheaf_type

    @property
    def vertex_space(self):
        return self.vertex.space

    def exception_at(self, member: Member) -> Optional[SpreadStalk]:
        for m, sd in self.exceptions:
            if m == member:
                return sd
        return None

    def touched_members(self) -> tuple[Member, ...]:
        return self._shape.touched_members()

    def series_of(self, member: Member) -> SeriesData:
        return self.space.series_named(member.series)

    def local_target(self, member: Member) -> CModule:
        return self._shape.local_target(member)

    def _spread_template(self, series: SeriesData, value: int) -> CModuleMap:
        key = (series.name, value)
        cache = self._spread_cache
        if key not in cache:
            lv = self._shape._vertex_tensor(series, Indecomposable.laurent(0))[0]
            if self.default is DefaultKind.ZERO:
                cache[key] = CModuleMap.zero(lv, CModule.zero(series.ring))
            else:
                if self.default is DefaultKind.FREE:
                    data = self._shape._k1_free(series, value)
                else:
                    data = self._shape._k1_localized(series)
                loc_sigma = _localized_structure(data.module, data.structure, lv)
                inv = loc_sigma.inverse()
                assert inv is not None
                cache[key] = inv
        return cache[key]

    def stalk_at(self, member: Member) -> Optional[SpreadStalk]:
        """Stalk data at one member, with the template spreading map."""
        exc = self.exception_at(member)
        if exc is not None:
            return exc
        base = self._shape.stalk_at(member)
        if base is None:
            return None
        series = self.series_of(member)
        if series_class(series) == "k0":
            return SpreadStalk(base.module, base.action, None)
        value = 0
        if self.default is DefaultKind.FREE:
            value = self.twist.local_value(self.space, member)
        return SpreadStalk(base.module, base.action, self._spread_template(series, value))

    def spread_at(self, member: Member) -> Optional[CModuleMap]:
        """The spreading map at one member, zero-normalized; None over k0."""
        sd = self.stalk_at(member)
        if sd is None or series_class(self.series_of(member)) == "k0":
            return None
        if sd.spread is not None:
            return sd.spread
        return CModuleMap.zero(self.local_target(member), localize_c(sd.module))

    def describe(self) -> str:
        bits = [
            f"preseparated {self.label or '(unnamed)'} over {self.space.name}",
            f"  default: {self.default.value}",
            f"  vertex: {self.vertex.space.dims or '0'}",
        ]
        if self.twist.exceptions:
            shifts = ", ".join(
                f"{self.space.member_display(m)}:{v}" for m, v in self.twist.exceptions
            )
            bits.append(f"  twist: {shifts}")
        for member, sd in self.exceptions:
            bits.append(
                f"  stalk at {self.space.member_display(member)}: {sd.module.describe()}"
            )
        return "\n".join(bits)

    def same_as(self, other: "PreseparatedObject") -> bool:
        """Componentwise equality of the presentations."""
        if self.space != other.space or self.default is not other.default:
            return False
        if self.twist != other.twist:
            return False
        if not _same_rep(self.vertex, other.vertex):
            return False
        if len(self.exceptions) != len(other.exceptions):
            return False
        for (m1, d1), (m2, d2) in zip(self.exceptions, other.exceptions):
            if m1 != m2 or d1.module != d2.module:
                return False
            if not _same_action(d1.action, d2.action):
                return False
            if series_class(self.series_of(m1)) == "k1":
                if self.spread_at(m1) != other.spread_at(m2):
                    return False
        return True


def vertex_skyscraper(space: IsotropySpace, rep: QRepresentation) -> PreseparatedObject:
    """The object with zero stalks everywhere and the given vertex."""
    return PreseparatedObject(space, rep, DefaultKind.ZERO, label="v(W)")


def validate_preseparated(obj: PreseparatedObject) -> ValidationReport:
    """Equivariance of the spreading maps against the localized actions."""
    eq_fails: list[str] = []
    for member, sd in obj.exceptions:
        series = obj.series_of(member)
        if not series.ring.has_c:
            continue
        shown = obj.space.member_display(member)
        locN, locmap = localize_c_with_map(sd.module)
        spread = obj.spread_at(member)
        loc_action = transport_action(sd.action, locmap, locN)
        lv_action = obj._shape._k1_localized(series).action
        for g in series.weyl.generators:
            lhs = spread.compose(lv_action.gen_maps[g])
            rhs = loc_action.gen_maps[g].compose(spread)
            if lhs != rhs:
                eq_fails.append(f"{shown}: spreading map breaks generator {g}")
                break
    return ValidationReport(
        (
            ("vertex-torsion", True, ""),
            ("equivariance", not eq_fails, "; ".join(eq_fails)),
        )
    )


# -- classified left division -----------------------------------------


def _divide_left(a: CModuleMap, c: CModuleMap) -> CModuleMap:
    """The unique x with a . x = c, for a classified a with zero kernel."""
    if c.target != a.target:
        raise ValueError("left division needs matching targets")
    degree = c.degree - a.degree
    lam = Q(c.lam) / Q(a.lam)
    basis = [
        CModuleMap(c.source, a.source, degree, dict(b.entries), lam)
        for b in hom_module_basis(c.source, a.source, degree)
    ]
    if not basis:
        x = CModuleMap.zero(c.source, a.source, degree, lam)
        if a.compose(x) != c:
            raise ValueError("map does not factor through the inclusion")
        return x
    sol = _solve_map_equations(basis, [lambda u: a.compose(u)], [c])
    if sol is None:
        raise ValueError("map does not factor through the inclusion")
    acc = CModuleMap.zero(c.source, a.source, degree, lam)
    for coeff, b in zip(sol, basis):
        if coeff:
            acc = acc.add(b.scale(coeff))
    return acc


# -- the two functors --------------------------------------------------


def separate(obj: ModelObject) -> PreseparatedObject:
    """Spread a standard object out: invert its localized structure maps."""
    space = obj.space
    label = f"e({obj.label})" if obj.label else "e"
    if obj.sheaf_type is SheafType.TYPE0:
        if obj.default is DefaultKind.LOCALIZED:
            return PreseparatedObject(space, obj.vertex, DefaultKind.ZERO, label=label)
        exceptions = tuple(
            (m, SpreadStalk(d.module, d.action, None)) for m, d in obj.exceptions
        )
        return PreseparatedObject(
            space, obj.vertex, obj.default, obj.twist, exceptions, label
        )
    exceptions = []
    for member, data in obj.exceptions:
        lv = obj.local_target(member)
        sigma = data.structure or CModuleMap.zero(data.module, lv)
        loc_sigma = _localized_structure(data.module, sigma, lv)
        spread = loc_sigma.inverse()
        if spread is None:
            raise ValueError(
                f"structure map at {space.member_display(member)} does not invert "
                "after localization; the object does not separate"
            )
        exceptions.append((member, SpreadStalk(data.module, data.action, spread)))
    return PreseparatedObject(
        space, obj.vertex, obj.default, obj.twist, tuple(exceptions), label
    )


@dataclass(frozen=True)
class _PullbackParts:
    """One reassembled stalk: the pullback of the stalk against the
    localized vertex stalk along the spreading map, as a kernel."""

    data: StalkData
    incl: CModuleMap
    to_stalk: CModuleMap
    to_local: CModuleMap
    from_stalk: CModuleMap
    from_local: CModuleMap


def _pullback_parts(obj: PreseparatedObject, member: Member) -> _PullbackParts:
    series = obj.series_of(member)
    sd = obj.stalk_at(member)
    lv = obj.local_target(member)
    locN, locmap = localize_c_with_map(sd.module)
    spread = obj.spread_at(member)
    total, incls, projs = direct_sum_with_maps(series.ring, [sd.module, lv])
    diff = locmap.compose(projs[0]).add(spread.compose(projs[1]).scale(-1))
    kc = kernel_cokernel_cmod(diff)
    sigma = projs[1].compose(kc.inclusion)
    lv_action = obj._shape._k1_localized(series).action
    total_action = _action_direct_sum(
        series, [sd.action, lv_action], total, incls, projs
    )
    gen_maps = {
        g: _divide_left(kc.inclusion, total_action.gen_maps[g].compose(kc.inclusion))
        for g in series.weyl.generators
    }
    action = SemilinearAction(series.weyl, kc.kernel, gen_maps)
    return _PullbackParts(
        StalkData(kc.kernel, action, sigma),
        kc.inclusion,
        projs[0],
        projs[1],
        incls[0],
        incls[1],
    )


def reassemble(obj: PreseparatedObject) -> ModelObject:
    """Rebuild a standard object, stalkwise the pullback along the spread.

    Localizing the pullback always recovers the localized vertex stalk, so
    the output is a valid standard object whenever the input satisfies the
    equivariance conditions.  The zero default under a nonzero vertex comes
    back as the localized default; over rational stalks that reading leaves
    no room for member stalks, which is the one unrepresentable corner.
    """
    label = f"p({obj.label})" if obj.label else "p"
    kind = obj.default
    if obj.default is DefaultKind.ZERO and not obj.vertex.space.is_zero():
        if obj.sheaf_type is SheafType.TYPE0 and obj.exceptions:
            member = obj.exceptions[0][0]
            raise UnrepresentableError(
                "the vertex lines only return as germs while "
                f"{obj.space.member_display(member)} carries a stalk; no "
                "almost-everywhere default presents both at once"
            )
        kind = DefaultKind.LOCALIZED
    if obj.sheaf_type is SheafType.TYPE0:
        exceptions = tuple(
            (m, StalkData(sd.module, sd.action, None)) for m, sd in obj.exceptions
        )
        return ModelObject(obj.space, obj.vertex, kind, obj.twist, exceptions, label)
    exceptions = tuple(
        (member, _pullback_parts(obj, member).data) for member, _ in obj.exceptions
    )
    return ModelObject(obj.space, obj.vertex, kind, obj.twist, exceptions, label)


def direct_sum_preseparated(
    A: PreseparatedObject, B: PreseparatedObject
) -> PreseparatedObject:
    """Componentwise direct sum; the defaults must present the same way."""
    if A.space != B.space:
        raise ValueError("objects live over different spaces")
    kinds = {A.default, B.default} - {DefaultKind.ZERO}
    if len(kinds) > 1:
        raise ValueError("summands present their defaults differently")
    kind = kinds.pop() if kinds else DefaultKind.ZERO
    for part in (A, B):
        if (
            part.default is DefaultKind.ZERO
            and kind is not DefaultKind.ZERO
            and not part.vertex.space.is_zero()
        ):
            raise ValueError(
                "a zero-default summand with vertex lines cannot share the "
                "sum's default rule"
            )
    space = A.space
    vertex = A.vertex.direct_sum(B.vertex)
    shell = PreseparatedObject(
        space, vertex, kind, label=f"{A.label or '?'}+{B.label or '?'}"
    )
    touched = sorted(set(A.touched_members()) | set(B.touched_members()))
    exceptions = []
    for member in touched:
        sa = A.stalk_at(member)
        sb = B.stalk_at(member)
        series = space.series_named(member.series)
        total, incls, projs = direct_sum_with_maps(series.ring, [sa.module, sb.module])
        action = _action_direct_sum(series, [sa.action, sb.action], total, incls, projs)
        spread = None
        if series_class(series) == "k1":
            loc_total, locmap_total = localize_c_with_map(total)
            lv_sum = shell.local_target(member)
            pieces = []
            for part, s, incl, side in ((A, sa, incls[0], 0), (B, sb, incls[1], 1)):
                spr = part.spread_at(member)
                loc_incl = _localized_structure(
                    s.module, locmap_total.compose(incl), loc_total
                )
                embed = _embed_local(part._shape, shell._shape, member, side)
                proj_lv = CModuleMap(
                    lv_sum,
                    embed.source,
                    0,
                    {(j, i): v for (i, j), v in embed.entries.items()},
                )
                pieces.append(loc_incl.compose(spr).compose(proj_lv))
            spread = _merge_disjoint(pieces, lv_sum, loc_total, 0, Q(1))
        exceptions.append((member, SpreadStalk(total, action, spread)))
    return PreseparatedObject(
        space, vertex, kind, exceptions=tuple(exceptions), label=shell.label
    )


# -- unit and counit ----------------------------------------------------


@dataclass(frozen=True)
class AdjunctionReport:
    """Outcome of one round-trip comparison, with witnesses for failures."""

    unit_iso: Optional[bool] = None
    counit_iso: Optional[bool] = None
    cells: tuple[tuple[str, bool], ...] = ()
    witness: str = ""
    unit_map: Optional[ModelMorphism] = None

    @property
    def passed(self) -> bool:
        for flag in (self.unit_iso, self.counit_iso):
            if flag is False:
                return False
        return all(ok for _, ok in self.cells)

    def describe(self) -> str:
        bits = []
        if self.unit_iso is not None:
            bits.append(f"unit iso: {'yes' if self.unit_iso else 'NO'}")
        if self.counit_iso is not None:
            bits.append(f"counit iso: {'yes' if self.counit_iso else 'NO'}")
        for name, ok in self.cells:
            bits.append(f"{name}: {'agree' if ok else 'DISAGREE'}")
        if self.witness:
            bits.append(self.witness)
        return "; ".join(bits)


def unit_morphism(obj: ModelObject) -> ModelMorphism:
    """The canonical map from an object to its reassembled separation."""
    sep = separate(obj)
    back = reassemble(sep)
    maps = {}
    for member in obj.touched_members():
        sx = obj.stalk_at(member)
        sp = back.stalk_at(member)
        if sx is None or sp is None:
            continue
        series = obj.series_of(member)
        if series_class(series) == "k1" and sep.exception_at(member) is not None:
            parts = _pullback_parts(sep, member)
            data = obj.stalk_at(member)
            sigma = data.structure or CModuleMap.zero(
                data.module, obj.local_target(member)
            )
            graph = parts.from_stalk.add(parts.from_local.compose(sigma))
            maps[member] = _divide_left(parts.incl, graph)
        else:
            maps[member] = CModuleMap.identity(sx.module)
    return ModelMorphism(
        obj, back, 0, GradedQMap.identity(obj.vertex.space), tuple(maps.items())
    )


def _inverse_morphism(m: ModelMorphism) -> Optional[ModelMorphism]:
    maps = {}
    for member, f in m.stalk_maps:
        inv = f.inverse()
        if inv is None:
            return None
        maps[member] = inv
    return ModelMorphism(
        m.target, m.source, 0, GradedQMap.identity(m.target.vertex.space), tuple(maps.items())
    )


def unit_check(obj: ModelObject) -> AdjunctionReport:
    """Exhibit the unit as an isomorphism with a two-sided inverse."""
    u = unit_morphism(obj)
    problems = check_morphism(u)
    if problems:
        return AdjunctionReport(unit_iso=False, witness="; ".join(problems), unit_map=u)
    if not morphism_is_iso(u):
        return AdjunctionReport(
            unit_iso=False,
            witness="a stalk map has a kernel or cokernel",
            unit_map=u,
        )
    v = _inverse_morphism(u)
    if v is None:
        return AdjunctionReport(
            unit_iso=False, witness="a stalk map has no classified inverse", unit_map=u
        )
    if v.compose(u) != ModelMorphism.identity(obj) or u.compose(v) != ModelMorphism.identity(u.target):
        return AdjunctionReport(
            unit_iso=False, witness="the inverse is one-sided only", unit_map=u
        )
    return AdjunctionReport(unit_iso=True, unit_map=u)


def counit_check(obj: PreseparatedObject) -> AdjunctionReport:
    """Compare the separation of the reassembly against the input."""
    back = separate(reassemble(obj))
    fails: list[str] = []
    if back.default is not obj.default:
        fails.append(
            f"default {obj.default.value} comes back {back.default.value}: the "
            "vertex spreads a laurent line over every untouched member"
        )
    for member, sd in obj.exceptions:
        series = obj.series_of(member)
        shown = obj.space.member_display(member)
        if not series.ring.has_c:
            continue
        parts = _pullback_parts(obj, member)
        eps = parts.to_stalk.compose(parts.incl)
        kc = kernel_cokernel_cmod(eps)
        if not kc.kernel.is_zero() or not kc.cokernel.is_zero():
            bits = []
            if not kc.kernel.is_zero():
                bits.append(f"kernel {kc.kernel.describe()}")
            if not kc.cokernel.is_zero():
                bits.append(f"cokernel {kc.cokernel.describe()}")
            fails.append(
                f"{shown}: the reassembled stalk covers the input with "
                + " and ".join(bits)
            )
    return AdjunctionReport(counit_iso=not fails, witness="; ".join(fails))


def cellular_equivalence_check(
    obj: PreseparatedObject, window: tuple[int, int] = (-6, 6)
) -> AdjunctionReport:
    """Hom dimensions out of the cells agree before and after a round trip."""
    if obj.sheaf_type is not SheafType.TYPE1:
        raise ValueError("the cellwise comparison needs polynomial stalks everywhere")
    first = reassemble(obj)
    second = reassemble(separate(first))
    cells = [("sigma_G", cell_sigma_G(obj.space))]
    for member in sorted(set(obj.touched_members())):
        cells.append(
            (
                f"sigma_F({obj.space.member_display(member)})",
                cell_sigma_F(obj.space, member.series, member.parameter),
            )
        )
    rows = []
    fails = []
    for name, cell in cells:
        agree = hom(cell, first, window).dims == hom(cell, second, window).dims
        rows.append((name, agree))
        if not agree:
            fails.append(f"{name} sees different hom dimensions")
    return AdjunctionReport(cells=tuple(rows), witness="; ".join(fails))


def triangle_identities_check(obj: ModelObject, pre: PreseparatedObject) -> bool:
    """Both composite round trips are the identity, componentwise."""
    return _triangle_standard(obj) and _triangle_preseparated(pre)


def _triangle_standard(obj: ModelObject) -> bool:
    u = unit_morphism(obj)
    sep = separate(obj)
    if u.vertex_map != GradedQMap.identity(obj.vertex.space):
        return False
    for member in obj.touched_members():
        sx = obj.stalk_at(member)
        if sx is None:
            continue
        uf = u.stalk_map(member)
        if uf is None:
            return False
        series = obj.series_of(member)
        if series_class(series) == "k1" and sep.exception_at(member) is not None:
            parts = _pullback_parts(sep, member)
            eps = parts.to_stalk.compose(parts.incl)
        else:
            eps = CModuleMap.identity(uf.target)
        if eps.compose(uf) != CModuleMap.identity(sx.module):
            return False
    return True


def _triangle_preseparated(pre: PreseparatedObject) -> bool:
    back = reassemble(pre)
    u = unit_morphism(back)
    again = u.target
    sep = separate(back)
    maps = {}
    for member in sorted(set(back.touched_members())):
        s_again = again.stalk_at(member)
        s_back = back.stalk_at(member)
        if s_again is None or s_back is None:
            continue
        series = back.series_of(member)
        if series_class(series) == "k1" and sep.exception_at(member) is not None:
            parts_out = _pullback_parts(sep, member)
            parts_in = _pullback_parts(pre, member)
            eps = parts_in.to_stalk.compose(parts_in.incl)
            mid = parts_in.from_stalk.compose(eps).compose(parts_out.to_stalk).add(
                parts_in.from_local.compose(parts_out.to_local)
            )
            maps[member] = _divide_left(parts_in.incl, mid.compose(parts_out.incl))
        else:
            maps[member] = CModuleMap.identity(s_back.module)
    collapse = ModelMorphism(
        again, back, 0, GradedQMap.identity(back.vertex.space), tuple(maps.items())
    )
    return collapse.compose(u) == ModelMorphism.identity(back)
