"""Sheaf-style objects over one block: a vertex representation plus stalk data.

An object assigns a stalk module to every member of the block and a graded
representation of the top-point component group to the vertex.  Almost all
members carry a stalk dictated by one of three default rules (a free copy of
the vertex, its localization, or zero); finitely many members are exceptional
and carry explicit modules.  Structure maps tie each stalk to the localized
vertex so that kernels and cokernels stay stalkwise torsion.

Morphisms follow the same shape: a vertex map, plus stalk maps at the
finitely many members where either end is exceptional; everywhere else the
stalk map is the one induced by the vertex map.  Hom spaces are computed
degreewise as the solution space of the commuting-square constraints, and
come out infinite-dimensional exactly when stalkwise deviations are
invisible to the structure maps (rational stalks over an infinite series).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .linear import (
    GradedQMap,
    GradedQSpace,
    QMatrix,
    QRepresentation,
    equivariant_hom_basis,
)
from .spaces import (
    INF,
    Dim,
    IsotropySpace,
    Member,
    MultiplicativeElement,
    SeriesData,
    SheafType,
    partition,
    series_class,
)
from .stalks import (
    CModule,
    CModuleMap,
    Indecomposable,
    SemilinearAction,
    c_multiplication,
    direct_sum_with_maps,
    equivariant_cmod_hom,
    kernel_cokernel_cmod,
    localize_c_with_map,
)

Q = Fraction


class DefaultKind(Enum):
    """Rule giving the stalk at a non-exceptional member."""

    FREE = "free"
    LOCALIZED = "localized"
    ZERO = "zero"


@dataclass(frozen=True, eq=False)
class StalkData:
    """Stalk module at one member, its component-group action, and the
    structure map into the localized default stalk.

    Over polynomial stalks the structure map is a degree-0 linear map into
    the Laurent module on the vertex; None means the zero map.  Over
    rational stalks there is no structure map: those members are invisible
    to the localized vertex, so the field must stay None.
    """

    module: CModule
    action: SemilinearAction
    structure: Optional[CModuleMap] = None


def _require_model_space(space: IsotropySpace) -> SheafType:
    stype = space.sheaf_type
    if stype is SheafType.MIXED:
        raise ValueError(
            f"space {space.name!r} mixes stalk flavors; split it before building objects"
        )
    if not space.has_top:
        raise ValueError(f"space {space.name!r} has no top point to anchor a vertex")
    if partition(space).kr:
        raise ValueError(
            f"space {space.name!r} has members with no limit point; split them off first"
        )
    return stype


def _tensor_positions(
    ring, base: Indecomposable, vspace: GradedQSpace
) -> tuple[CModule, dict[tuple[int, int], int]]:
    """Module base (x) vspace with the canonical slot of each (degree, copy)."""
    listed = []
    keys = []
    for deg, dim in vspace.dims:
        for r in range(dim):
            listed.append(Indecomposable(base.family, base.shift + deg, base.length))
            keys.append((deg, r))
    mod, perm = CModule.from_list(ring, listed)
    return mod, {key: perm[i] for i, key in enumerate(keys)}


def _check_series_semilinearity(series: SeriesData, action: SemilinearAction) -> None:
    """Generators must twist c by the series multiplier, whatever their lam field says."""
    if not series.ring.has_c or action.module.is_zero():
        return
    cmul = c_multiplication(action.module)
    for g in series.weyl.generators:
        rho = action.gen_maps[g]
        if rho.compose(cmul) != cmul.compose(rho).scale(series.lam):
            raise ValueError(
                f"action of generator {g} does not twist c by {series.lam}"
            )


def _component_image(series: SeriesData, g: int) -> int:
    if series.weyl_to_top is None:
        raise ValueError(f"series {series.name!r} has no component homomorphism")
    return series.weyl_to_top[g]


@dataclass(frozen=True, eq=False)
class ModelObject:
    """One object: vertex representation, default rule, finite exceptions.

    The twist is a multiplicative shift of the free default rule; members it
    names count as exceptional for every computation.  Exceptions are keyed
    by member and override both the default rule and the twist there.
    """

    space: IsotropySpace
    vertex: QRepresentation
    default: DefaultKind
    twist: MultiplicativeElement = MultiplicativeElement.one()
    exceptions: tuple[tuple[Member, StalkData], ...] = ()
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "_default_cache", {})
        stype = _require_model_space(self.space)
        if self.vertex.group != self.space.top_weyl:
            raise ValueError("vertex representation is not over the top component group")
        self.twist.validate(self.space)
        if self.default is not DefaultKind.FREE and self.twist.exceptions:
            raise ValueError("twists only shift the free default rule")
        seen = set()
        ordered = sorted(self.exceptions, key=lambda pair: pair[0])
        for member, data in ordered:
            if member in seen:
                raise ValueError(f"repeated exception at {self.space.member_display(member)}")
            seen.add(member)
            self._check_exception(member, data, stype)
        if (
            stype is SheafType.TYPE0
            and self.default is DefaultKind.LOCALIZED
            and ordered
        ):
            raise ValueError("a germ-style object carries no member stalks to override")
        object.__setattr__(self, "exceptions", tuple(ordered))

    def _check_exception(self, member: Member, data: StalkData, stype: SheafType) -> None:
        series = self.space.series_named(member.series)
        self.space.member(member.series, member.parameter)
        if data.module.ring != series.ring:
            raise ValueError(
                f"stalk at {self.space.member_display(member)} is over the wrong ring"
            )
        if data.action.module != data.module:
            raise ValueError("action does not act on the stalk module")
        if data.action.group != series.weyl:
            raise ValueError("action group is not the member's component group")
        if series_class(series) == "k0":
            if data.structure is not None:
                raise ValueError("rational stalks carry no structure map")
            return
        _check_series_semilinearity(series, data.action)
        if data.structure is not None:
            sigma = data.structure
            if sigma.degree != 0 or sigma.lam != 1:
                raise ValueError("structure maps are linear of degree 0")
            if sigma.source != data.module:
                raise ValueError("structure map source is not the stalk")
            if sigma.target != self.local_target(member):
                raise ValueError("structure map target is not the localized default stalk")

    # -- derived shape -------------------------------------------------

    @property
    def sheaf_type(self) -> SheafType:
        return self.space.sheaf_type

    @property
    def vertex_space(self) -> GradedQSpace:
        return self.vertex.space

    def exception_at(self, member: Member) -> Optional[StalkData]:
        for m, data in self.exceptions:
            if m == member:
                return data
        return None

    def touched_members(self) -> tuple[Member, ...]:
        """Members that any computation must treat individually."""
        out = {m for m, _ in self.exceptions}
        out.update(m for m, _ in self.twist.exceptions)
        for s in self.space.all_series():
            if s.size is not None:
                out.update(Member(s.name, p) for p in range(1, s.size + 1))
        return tuple(sorted(out))

    def series_of(self, member: Member) -> SeriesData:
        return self.space.series_named(member.series)

    # -- stalk construction --------------------------------------------

    def _vertex_tensor(self, series: SeriesData, base: Indecomposable):
        key = ("tensor", series.name, base.family, base.shift, base.length)
        cache = self._default_cache
        if key not in cache:
            cache[key] = _tensor_positions(series.ring, base, self.vertex.space)
        return cache[key]

    def _module_action(
        self, series: SeriesData, module: CModule, pos: Mapping[tuple[int, int], int]
    ) -> SemilinearAction:
        # A summand stored with shift a but holding the vertex line of
        # degree d has its generator at c-power r = (a - d)/D, so the
        # classified entries must carry lam^r for the action to sample
        # the multiplier at true c-powers.
        has_c = series.ring.has_c
        D = series.ring.c_degree if has_c else 1
        gen_maps = {}
        for g in series.weyl.generators:
            mat_of = self.vertex.element_map(_component_image(series, g))
            entries = {}
            for deg, dim in self.vertex.space.dims:
                block = mat_of.block(deg)
                scale = Q(1)
                if has_c and dim:
                    slot = pos[(deg, 0)]
                    scale = series.lam ** ((module.summands[slot].shift - deg) // D)
                for i in range(dim):
                    for j in range(dim):
                        v = block.entry(i, j)
                        if v:
                            entries[(pos[(deg, i)], pos[(deg, j)])] = scale * v
            gen_maps[g] = CModuleMap(module, module, 0, entries, lam=series.lam)
        return SemilinearAction(series.weyl, module, gen_maps)

    def local_target(self, member: Member) -> CModule:
        """The localized default stalk at a polynomial member."""
        series = self.series_of(member)
        return self._vertex_tensor(series, Indecomposable.laurent(0))[0]

    def _k1_localized(self, series: SeriesData) -> StalkData:
        key = ("k1loc", series.name)
        cache = self._default_cache
        if key not in cache:
            mod, pos = self._vertex_tensor(series, Indecomposable.laurent(0))
            cache[key] = StalkData(
                mod, self._module_action(series, mod, pos), CModuleMap.identity(mod)
            )
        return cache[key]

    def _k1_free(self, series: SeriesData, exponent: int) -> StalkData:
        key = ("k1free", series.name, exponent)
        cache = self._default_cache
        if key not in cache:
            D = series.ring.c_degree
            mod, pos = self._vertex_tensor(series, Indecomposable.free(D * exponent))
            lmod, lpos = self._vertex_tensor(series, Indecomposable.laurent(0))
            sigma = CModuleMap(mod, lmod, 0, {(lpos[k], pos[k]): 1 for k in pos})
            cache[key] = StalkData(mod, self._module_action(series, mod, pos), sigma)
        return cache[key]

    def _k1_zero(self, series: SeriesData) -> StalkData:
        zero = CModule.zero(series.ring)
        target = self._vertex_tensor(series, Indecomposable.laurent(0))[0]
        return StalkData(
            zero,
            SemilinearAction.trivial(series.weyl, zero),
            CModuleMap.zero(zero, target),
        )

    def _k0_full(self, series: SeriesData) -> StalkData:
        key = ("k0full", series.name)
        cache = self._default_cache
        if key not in cache:
            mod, pos = self._vertex_tensor(series, Indecomposable.free(0))
            cache[key] = StalkData(mod, self._module_action(series, mod, pos), None)
        return cache[key]

    def _k0_zero(self, series: SeriesData) -> StalkData:
        zero = CModule.zero(series.ring)
        return StalkData(zero, SemilinearAction.trivial(series.weyl, zero), None)

    def generic_stalk(self, series: SeriesData) -> Optional[StalkData]:
        """Default stalk carried by the untouched members of a series."""
        if series_class(series) == "k1":
            if self.default is DefaultKind.FREE:
                return self._k1_free(series, 0)
            if self.default is DefaultKind.LOCALIZED:
                return self._k1_localized(series)
            return self._k1_zero(series)
        if self.default is DefaultKind.FREE:
            return self._k0_full(series)
        if self.default is DefaultKind.LOCALIZED:
            return None
        return self._k0_zero(series)

    def stalk_at(self, member: Member) -> Optional[StalkData]:
        """Stalk data at one member; None at members a germ-style nub skips."""
        exc = self.exception_at(member)
        if exc is not None:
            return exc
        series = self.series_of(member)
        value = self.twist.local_value(self.space, member)
        if series_class(series) == "k1":
            if self.default is DefaultKind.FREE:
                return self._k1_free(series, value)
            return self.generic_stalk(series)
        if self.default is DefaultKind.FREE and value == 0:
            return self._k0_zero(series)
        return self.generic_stalk(series)

    def describe(self) -> str:
        bits = [
            f"object {self.label or '(unnamed)'} over {self.space.name}",
            f"  default: {self.default.value}",
            f"  vertex: {self.vertex.space.dims or '0'}",
        ]
        if self.twist.exceptions:
            shifts = ", ".join(
                f"{self.space.member_display(m)}:{v}" for m, v in self.twist.exceptions
            )
            bits.append(f"  twist: {shifts}")
        for member, data in self.exceptions:
            bits.append(
                f"  stalk at {self.space.member_display(member)}: {data.module.describe()}"
            )
        return "\n".join(bits)

    def same_as(self, other: "ModelObject") -> bool:
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
            s1 = d1.structure or _zero_structure(self, m1, d1)
            s2 = d2.structure or _zero_structure(other, m2, d2)
            if s1 != s2:
                return False
        return True


def _same_rep(a: QRepresentation, b: QRepresentation) -> bool:
    if a.group != b.group or a.space != b.space:
        return False
    return all(a.gen_maps[g] == b.gen_maps[g] for g in a.group.generators)


def _same_action(a: SemilinearAction, b: SemilinearAction) -> bool:
    if a.group != b.group or a.module != b.module:
        return False
    return all(a.gen_maps[g] == b.gen_maps[g] for g in a.group.generators)


def _zero_structure(obj: ModelObject, member: Member, data: StalkData) -> Optional[CModuleMap]:
    if series_class(obj.series_of(member)) == "k0":
        return None
    return CModuleMap.zero(data.module, obj.local_target(member))


def is_zero_object(obj: ModelObject) -> bool:
    if not obj.vertex.space.is_zero():
        return False
    return all(data.module.is_zero() for _, data in obj.exceptions)


# -- canonical objects ------------------------------------------------


def zero_object(space: IsotropySpace) -> ModelObject:
    rep = QRepresentation.trivial(space.top_weyl, GradedQSpace())
    return ModelObject(space, rep, DefaultKind.ZERO, label="0")


def _semilinear_identity(series: SeriesData, module: CModule) -> SemilinearAction:
    """Identity entries carrying the series multiplier, g(c^k m) = lam^k c^k m."""
    ident = CModuleMap(
        module,
        module,
        0,
        {(i, i): Q(1) for i in range(len(module.summands))},
        lam=series.lam,
    )
    return SemilinearAction(series.weyl, module, {g: ident for g in series.weyl.generators})


def cell_sigma_G(space: IsotropySpace) -> ModelObject:
    """The monoidal unit: vertex Q in degree 0, free stalks everywhere."""
    rep = QRepresentation.trivial(space.top_weyl, GradedQSpace.single(0))
    return ModelObject(space, rep, DefaultKind.FREE, label="sigma_G")


def cell_sigma_F(space: IsotropySpace, series_name: str, parameter: int = 1) -> ModelObject:
    """The member cell: zero vertex, one simple stalk at the named member."""
    member = space.member(series_name, parameter)
    series = space.series_named(series_name)
    if series_class(series) == "k1":
        module = CModule(series.ring, (Indecomposable.torsion(0, 1),))
    else:
        module = CModule(series.ring, (Indecomposable.free(0),))
    data = StalkData(module, _semilinear_identity(series, module), None)
    rep = QRepresentation.trivial(space.top_weyl, GradedQSpace())
    return ModelObject(
        space,
        rep,
        DefaultKind.ZERO,
        exceptions=((member, data),),
        label=f"sigma_F({space.member_display(member)})",
    )


def skyscraper_e(space: IsotropySpace, rep: QRepresentation) -> ModelObject:
    """The vertex skyscraper e(W): localized defaults, no exceptions."""
    return ModelObject(space, rep, DefaultKind.LOCALIZED, label="e(W)")


def skyscraper_f(
    space: IsotropySpace,
    series_name: str,
    parameter: int,
    module: CModule,
    action: Optional[SemilinearAction] = None,
) -> ModelObject:
    """The member skyscraper f_F(T): zero vertex, the given stalk at one member."""
    member = space.member(series_name, parameter)
    series = space.series_named(series_name)
    if module.ring != series.ring:
        raise ValueError("stalk module is over the wrong ring for this member")
    if series.ring.has_c:
        loc, _ = localize_c_with_map(module)
        if not loc.is_zero():
            raise ValueError(
                "free or Laurent summands survive localization; the stalk is not torsion"
            )
    if action is None:
        action = _semilinear_identity(series, module)
    rep = QRepresentation.trivial(space.top_weyl, GradedQSpace())
    return ModelObject(
        space,
        rep,
        DefaultKind.ZERO,
        exceptions=((member, StalkData(module, action, None)),),
        label=f"f({space.member_display(member)})",
    )


# -- validation -------------------------------------------------------


@dataclass(frozen=True)
class ValidationReport:
    """Named pass/fail conditions with witnesses for the failures."""

    conditions: tuple[tuple[str, bool, str], ...]

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.conditions)

    def condition(self, name: str) -> tuple[bool, str]:
        for n, ok, detail in self.conditions:
            if n == name:
                return ok, detail
        raise KeyError(name)

    def describe(self) -> str:
        lines = []
        for name, ok, detail in self.conditions:
            mark = "pass" if ok else "FAIL"
            lines.append(f"{name}: {mark}" + (f" ({detail})" if detail else ""))
        return "\n".join(lines)


def _localized_structure(module: CModule, sigma: CModuleMap, target: CModule) -> CModuleMap:
    """The structure map after inverting c on the source."""
    loc, locmap = localize_c_with_map(module)
    slot = {j: i for (i, j), _ in locmap.entries.items()}
    entries = {}
    for (i, j), s in sigma.entries.items():
        if j in slot:
            entries[(i, slot[j])] = s
    return CModuleMap(loc, target, 0, entries)


def validate(obj: ModelObject) -> ValidationReport:
    """Report the defining conditions; never raises on well-formed data."""
    space = obj.space
    stype = obj.sheaf_type
    qc_fails: list[str] = []
    ext_fails: list[str] = []
    eq_fails: list[str] = []

    try:
        obj.vertex.validate()
    except ValueError as err:
        eq_fails.append(f"vertex: {err}")

    infinite = [s for s in space.all_series() if s.infinite]
    if obj.default is DefaultKind.ZERO and not obj.vertex.space.is_zero() and infinite:
        name = infinite[0].name
        qc_fails.append(
            f"default members of {name}: stalks localize to 0 but the vertex is nonzero"
        )
        ext_fails.append(f"default members of {name}: the vertex is not recovered")

    for member in obj.touched_members():
        data = obj.stalk_at(member)
        if data is None:
            continue
        shown = space.member_display(member)
        try:
            data.action.validate()
        except ValueError as err:
            eq_fails.append(f"action at {shown}: {err}")
        series = obj.series_of(member)
        if series_class(series) != "k1":
            continue
        target = obj.local_target(member)
        sigma = data.structure or CModuleMap.zero(data.module, target)
        loc_sigma = _localized_structure(data.module, sigma, target)
        kc = kernel_cokernel_cmod(loc_sigma)
        if not kc.kernel.is_zero() or not kc.cokernel.is_zero():
            qc_fails.append(
                f"stalk at {shown}: localized structure map has kernel "
                f"{kc.kernel.describe()} and cokernel {kc.cokernel.describe()}"
            )
        local = obj._k1_localized(series)
        for g in series.weyl.generators:
            if sigma.compose(data.action.gen_maps[g]) != local.action.gen_maps[g].compose(sigma):
                eq_fails.append(f"structure map at {shown} breaks generator {g}")
                break

    conditions = (
        (
            "vertex-torsion",
            True,
            "rational scalars at the vertex leave no torsion to record",
        ),
        ("quasicoherence", not qc_fails, "; ".join(qc_fails)),
        ("extendedness", not ext_fails, "; ".join(ext_fails)),
        ("equivariance", not eq_fails, "; ".join(eq_fails)),
    )
    return ValidationReport(conditions)


# -- morphisms --------------------------------------------------------


def default_component(
    source: ModelObject, target: ModelObject, vertex_map: GradedQMap, member: Member
) -> Optional[CModuleMap]:
    """The stalk map induced by the vertex map at a non-exceptional member.

    Raises when no induced map exists (a localized default mapping to a free
    one needs a zero vertex map there).
    """
    sx = source.stalk_at(member)
    sy = target.stalk_at(member)
    if sx is None or sy is None:
        return None
    series = source.series_of(member)
    degree = vertex_map.shift
    sxd = source.generic_stalk(series)
    syd = target.generic_stalk(series)
    if sxd is None or syd is None or sx.module != sxd.module or sy.module != syd.module:
        raise ValueError(
            f"no default stalk map at exceptional member {source.space.member_display(member)}"
        )
    if series_class(series) == "k1":
        base_x = (
            Indecomposable.laurent(0)
            if source.default is DefaultKind.LOCALIZED
            else Indecomposable.free(0)
        )
        base_y = (
            Indecomposable.laurent(0)
            if target.default is DefaultKind.LOCALIZED
            else Indecomposable.free(0)
        )
    else:
        base_x = base_y = Indecomposable.free(0)
    posx = source._vertex_tensor(series, base_x)[1]
    posy = target._vertex_tensor(series, base_y)[1]
    entries = {}
    for deg, dim in source.vertex.space.dims:
        block = vertex_map.block(deg)
        for i in range(block.nrows):
            for j in range(dim):
                v = block.entry(i, j)
                if v:
                    entries[(posy[(deg + degree, i)], posx[(deg, j)])] = v
    return CModuleMap(sx.module, sy.module, degree, entries)


@dataclass(frozen=True, eq=False)
class ModelMorphism:
    """A degree-homogeneous map of objects over one space."""

    source: ModelObject
    target: ModelObject
    degree: int
    vertex_map: GradedQMap
    stalk_maps: tuple[tuple[Member, CModuleMap], ...] = ()

    def __post_init__(self):
        if self.source.space != self.target.space:
            raise ValueError("morphism across different spaces")
        vm = self.vertex_map
        if vm.source != self.source.vertex.space or vm.target != self.target.vertex.space:
            raise ValueError("vertex map endpoints are not the vertices")
        if vm.shift != self.degree:
            raise ValueError("vertex map degree disagrees with the morphism degree")
        seen = set()
        ordered = sorted(self.stalk_maps, key=lambda pair: pair[0])
        for member, f in ordered:
            if member in seen:
                raise ValueError("repeated stalk map")
            seen.add(member)
            sx = self.source.stalk_at(member)
            sy = self.target.stalk_at(member)
            if sx is None or sy is None:
                raise ValueError(
                    f"no stalk to map at {self.source.space.member_display(member)}"
                )
            if f.source != sx.module or f.target != sy.module:
                raise ValueError("stalk map endpoints are not the stalks")
            if f.degree != self.degree or f.lam != 1:
                raise ValueError("stalk maps are linear maps of the morphism degree")
        object.__setattr__(self, "stalk_maps", tuple(ordered))

    @classmethod
    def make(
        cls,
        source: ModelObject,
        target: ModelObject,
        degree: int,
        vertex_map: GradedQMap,
        stalk_maps: Mapping[Member, CModuleMap] = {},
    ) -> "ModelMorphism":
        """Fill unnamed touched members with the vertex-induced stalk maps."""
        filled = dict(stalk_maps)
        for member in sorted(set(source.touched_members()) | set(target.touched_members())):
            if member in filled:
                continue
            induced = default_component(source, target, vertex_map, member)
            if induced is not None:
                filled[member] = induced
        return cls(source, target, degree, vertex_map, tuple(filled.items()))

    @classmethod
    def identity(cls, obj: ModelObject) -> "ModelMorphism":
        maps = {}
        for member in obj.touched_members():
            data = obj.stalk_at(member)
            if data is not None:
                maps[member] = CModuleMap.identity(data.module)
        return cls(
            obj, obj, 0, GradedQMap.identity(obj.vertex.space), tuple(maps.items())
        )

    @classmethod
    def zero(cls, source: ModelObject, target: ModelObject, degree: int = 0) -> "ModelMorphism":
        vm = GradedQMap.zero(source.vertex.space, target.vertex.space, degree)
        maps = {}
        for member in sorted(set(source.touched_members()) | set(target.touched_members())):
            sx = source.stalk_at(member)
            sy = target.stalk_at(member)
            if sx is not None and sy is not None:
                maps[member] = CModuleMap.zero(sx.module, sy.module, degree)
        return cls(source, target, degree, vm, tuple(maps.items()))

    def stalk_map(self, member: Member) -> Optional[CModuleMap]:
        for m, f in self.stalk_maps:
            if m == member:
                return f
        return default_component(self.source, self.target, self.vertex_map, member)

    def compose(self, other: "ModelMorphism") -> "ModelMorphism":
        """self after other."""
        if not self.source.same_as(other.target):
            raise ValueError("compose: middle objects differ")
        vm = self.vertex_map.compose(other.vertex_map)
        members = {m for m, _ in self.stalk_maps} | {m for m, _ in other.stalk_maps}
        maps = {}
        for member in sorted(members):
            f = other.stalk_map(member)
            g = self.stalk_map(member)
            if f is None or g is None:
                continue
            maps[member] = g.compose(f)
        return ModelMorphism(
            other.source, self.target, self.degree + other.degree, vm, tuple(maps.items())
        )

    def add(self, other: "ModelMorphism") -> "ModelMorphism":
        if self.degree != other.degree:
            raise ValueError("add: different degrees")
        if not (self.source.same_as(other.source) and self.target.same_as(other.target)):
            raise ValueError("add: different endpoints")
        vm = self.vertex_map.add(other.vertex_map)
        members = {m for m, _ in self.stalk_maps} | {m for m, _ in other.stalk_maps}
        maps = {}
        for member in sorted(members):
            f = self.stalk_map(member)
            g = other.stalk_map(member)
            if f is None or g is None:
                continue
            maps[member] = f.add(g)
        return ModelMorphism(self.source, self.target, self.degree, vm, tuple(maps.items()))

    def scale(self, s: object) -> "ModelMorphism":
        return ModelMorphism(
            self.source,
            self.target,
            self.degree,
            self.vertex_map.scale(s),
            tuple((m, f.scale(s)) for m, f in self.stalk_maps),
        )

    def is_zero(self) -> bool:
        if not self.vertex_map.is_zero():
            return False
        return all(f.is_zero() for _, f in self.stalk_maps)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ModelMorphism):
            return NotImplemented
        if self.degree != other.degree:
            return False
        if not (self.source.same_as(other.source) and self.target.same_as(other.target)):
            return False
        if self.vertex_map != other.vertex_map:
            return False
        members = {m for m, _ in self.stalk_maps} | {m for m, _ in other.stalk_maps}
        for member in members:
            if self.stalk_map(member) != other.stalk_map(member):
                return False
        return True

    def __hash__(self) -> int:
        return hash((self.degree, self.vertex_map))


def check_morphism(m: ModelMorphism) -> list[str]:
    """Commuting-square and equivariance failures, as witness strings."""
    out: list[str] = []
    X, Y = m.source, m.target
    space = X.space
    for g in space.top_weyl.generators:
        lhs = Y.vertex.gen_maps[g].compose(m.vertex_map)
        rhs = m.vertex_map.compose(X.vertex.gen_maps[g])
        if lhs != rhs:
            out.append(f"vertex map breaks generator {g}")
    members = list(set(X.touched_members()) | set(Y.touched_members()))
    for s in space.all_series():
        if s.infinite:
            members.append(Member(s.name, 0))
    for member in sorted(members):
        generic = member.parameter == 0
        series = space.series_named(member.series)
        if generic:
            sx, sy = X.generic_stalk(series), Y.generic_stalk(series)
        else:
            sx, sy = X.stalk_at(member), Y.stalk_at(member)
        if sx is None or sy is None:
            continue
        shown = "generic " + series.name if generic else space.member_display(member)
        if generic:
            try:
                f = default_component(X, Y, m.vertex_map, Member(series.name, 0))
            except ValueError:
                out.append(f"{shown}: vertex map induces no stalk map")
                continue
        else:
            f = m.stalk_map(member)
        if f is None:
            continue
        for g in series.weyl.generators:
            if f.compose(sx.action.gen_maps[g]) != sy.action.gen_maps[g].compose(f):
                out.append(f"{shown}: stalk map breaks generator {g}")
                break
        if series_class(series) != "k1":
            continue
        tx = X._vertex_tensor(series, Indecomposable.laurent(0))[0]
        ty = Y._vertex_tensor(series, Indecomposable.laurent(0))[0]
        sigma_x = sx.structure or CModuleMap.zero(sx.module, tx)
        sigma_y = sy.structure or CModuleMap.zero(sy.module, ty)
        lphi = _local_phi(X, Y, series, m.vertex_map)
        if sigma_y.compose(f) != lphi.compose(sigma_x):
            out.append(f"{shown}: square against the structure maps does not commute")
    return out


def morphism_is_iso(m: ModelMorphism) -> bool:
    """Degree-0 isomorphism test, exact and window-free."""
    if m.degree != 0:
        return False
    X, Y = m.source, m.target
    if X.default is not Y.default:
        if not (X.vertex.space.is_zero() and Y.vertex.space.is_zero()):
            return False
    ker, _ = m.vertex_map.kernel()
    cok, _ = m.vertex_map.cokernel()
    if not ker.is_zero() or not cok.is_zero():
        return False
    members = set(X.touched_members()) | set(Y.touched_members())
    for member in sorted(members):
        sx = X.stalk_at(member)
        sy = Y.stalk_at(member)
        if (sx is None) != (sy is None):
            return False
        if sx is None:
            continue
        f = m.stalk_map(member)
        if f is None:
            return False
        kc = kernel_cokernel_cmod(f)
        if not kc.kernel.is_zero() or not kc.cokernel.is_zero():
            return False
    return True


# -- hom --------------------------------------------------------------


@dataclass(eq=False)
class HomResult:
    """Degreewise Hom dimensions over a window, with bases where finite."""

    source: ModelObject
    target: ModelObject
    window: tuple[int, int]
    dims: dict[int, Dim]
    basis: dict[int, tuple[ModelMorphism, ...]]
    witnesses: dict[int, str]

    def dim(self, degree: int) -> Dim:
        return self.dims.get(degree, 0)

    def is_finite(self) -> bool:
        return all(d is not INF for d in self.dims.values())

    def total_dim(self) -> Dim:
        if not self.is_finite():
            return INF
        return sum(self.dims.values())

    def describe(self) -> str:
        lo, hi = self.window
        bits = []
        for d in range(lo, hi + 1):
            v = self.dim(d)
            if v is INF:
                bits.append(f"{d}: infinite ({self.witnesses.get(d, '')})")
            elif v:
                bits.append(f"{d}: {v}")
        return "; ".join(bits) if bits else "0"


def _local_phi(
    X: ModelObject, Y: ModelObject, series: SeriesData, vertex_map: GradedQMap
) -> CModuleMap:
    """The vertex map tensored up to the localized default stalks."""
    lx, posx = X._vertex_tensor(series, Indecomposable.laurent(0))
    ly, posy = Y._vertex_tensor(series, Indecomposable.laurent(0))
    degree = vertex_map.shift
    entries = {}
    for deg, dim in X.vertex.space.dims:
        block = vertex_map.block(deg)
        for i in range(block.nrows):
            for j in range(dim):
                v = block.entry(i, j)
                if v:
                    entries[(posy[(deg + degree, i)], posx[(deg, j)])] = v
    return CModuleMap(lx, ly, degree, entries)


def _hom_degree_type1(X: ModelObject, Y: ModelObject, d: int):
    E = equivariant_hom_basis(X.vertex, Y.vertex, d)
    touched = sorted(set(X.touched_members()) | set(Y.touched_members()))
    blocks = []
    for member in touched:
        series = X.space.series_named(member.series)
        blocks.append((member, series, X.stalk_at(member), Y.stalk_at(member)))
    for series in X.space.all_series():
        if series.infinite:
            blocks.append((None, series, X.generic_stalk(series), Y.generic_stalk(series)))

    stalk_bases = []
    offsets = []
    ncols = len(E)
    for _, _, sx, sy in blocks:
        basis = equivariant_cmod_hom(sx.action, sy.action, d)
        stalk_bases.append(basis)
        offsets.append(ncols)
        ncols += len(basis)

    rows: list[list[Fraction]] = []
    for (member, series, sx, sy), basis, off in zip(blocks, stalk_bases, offsets):
        target_x = X._vertex_tensor(series, Indecomposable.laurent(0))[0]
        target_y = Y._vertex_tensor(series, Indecomposable.laurent(0))[0]
        sigma_x = sx.structure or CModuleMap.zero(sx.module, target_x)
        sigma_y = sy.structure or CModuleMap.zero(sy.module, target_y)
        lhs = [sigma_y.compose(b) for b in basis]
        rhs = [_local_phi(X, Y, series, e).compose(sigma_x) for e in E]
        keys = set()
        for m in lhs + rhs:
            keys.update(m.entries)
        for key in sorted(keys):
            row = [Q(0)] * ncols
            for k, m in enumerate(rhs):
                row[k] = -m.entries.get(key, Q(0))
            for k, m in enumerate(lhs):
                row[off + k] = m.entries.get(key, Q(0))
            rows.append(row)

    sol = QMatrix(rows, ncols=ncols).nullspace_basis()
    reps = []
    for col in range(sol.ncols):
        vec = sol.col(col)
        phi = GradedQMap.zero(X.vertex.space, Y.vertex.space, d)
        for k, e in enumerate(E):
            if vec[k]:
                phi = phi.add(e.scale(vec[k]))
        maps = {}
        for (member, series, sx, sy), basis, off in zip(blocks, stalk_bases, offsets):
            if member is None:
                continue
            acc = CModuleMap.zero(sx.module, sy.module, d)
            for k, b in enumerate(basis):
                if vec[off + k]:
                    acc = acc.add(b.scale(vec[off + k]))
            maps[member] = acc
        reps.append(ModelMorphism(X, Y, d, phi, tuple(maps.items())))
    return sol.ncols, reps, None


def _hom_degree_type0(X: ModelObject, Y: ModelObject, d: int):
    E = equivariant_hom_basis(X.vertex, Y.vertex, d)
    XK, YK = X.default, Y.default
    if YK is DefaultKind.LOCALIZED:
        reps = [
            ModelMorphism(X, Y, d, e, ())
            for e in E
        ]
        return len(E), reps, None
    if XK is DefaultKind.LOCALIZED:
        return 0, [], None
    for series in X.space.all_series():
        if not series.infinite:
            continue
        dx = X.generic_stalk(series)
        dy = Y.generic_stalk(series)
        g = len(equivariant_cmod_hom(dx.action, dy.action, d))
        if g:
            witness = (
                f"independent deviations at the members of {series.name} "
                f"({g} per member)"
            )
            return INF, [], witness
    touched = sorted(set(X.touched_members()) | set(Y.touched_members()))
    reps = []
    zero_maps = {}
    for member in touched:
        sx = X.stalk_at(member)
        sy = Y.stalk_at(member)
        zero_maps[member] = CModuleMap.zero(sx.module, sy.module, d)
    for e in E:
        reps.append(ModelMorphism(X, Y, d, e, tuple(zero_maps.items())))
    zero_phi = GradedQMap.zero(X.vertex.space, Y.vertex.space, d)
    for member in touched:
        sx = X.stalk_at(member)
        sy = Y.stalk_at(member)
        for b in equivariant_cmod_hom(sx.action, sy.action, d):
            maps = dict(zero_maps)
            maps[member] = b
            reps.append(ModelMorphism(X, Y, d, zero_phi, tuple(maps.items())))
    return len(reps), reps, None


def hom(X: ModelObject, Y: ModelObject, window: tuple[int, int]) -> HomResult:
    """Degreewise Hom over the window.

    A degree-d morphism raises degrees by d.  Dimensions come out infinite
    exactly when stalk maps can deviate independently along an infinite
    series without the structure maps noticing; the witness names the
    series.
    """
    if X.space != Y.space:
        raise ValueError("objects live over different spaces")
    stype = X.sheaf_type
    lo, hi = window
    dims: dict[int, Dim] = {}
    basis: dict[int, tuple[ModelMorphism, ...]] = {}
    witnesses: dict[int, str] = {}
    for d in range(lo, hi + 1):
        if stype is SheafType.TYPE1:
            dim, reps, witness = _hom_degree_type1(X, Y, d)
        else:
            dim, reps, witness = _hom_degree_type0(X, Y, d)
        dims[d] = dim
        basis[d] = tuple(reps)
        if witness:
            witnesses[d] = witness
    return HomResult(X, Y, window, dims, basis, witnesses)


# -- direct sums and idempotent splittings ----------------------------


def _merge_disjoint(
    maps: Sequence[CModuleMap],
    source: CModule,
    target: CModule,
    degree: int,
    lam,
) -> CModuleMap:
    entries: dict[tuple[int, int], Fraction] = {}
    for m in maps:
        for key, v in m.entries.items():
            entries[key] = entries.get(key, Q(0)) + v
    return CModuleMap(source, target, degree, entries, lam)


def _action_direct_sum(
    series: SeriesData,
    parts: Sequence[SemilinearAction],
    total: CModule,
    incls: Sequence[CModuleMap],
    projs: Sequence[CModuleMap],
) -> SemilinearAction:
    gen_maps = {}
    for g in series.weyl.generators:
        pieces = [
            incl.compose(act.gen_maps[g]).compose(proj)
            for act, incl, proj in zip(parts, incls, projs)
        ]
        gen_maps[g] = _merge_disjoint(pieces, total, total, 0, series.lam)
    return SemilinearAction(series.weyl, total, gen_maps)


def direct_sum(X: ModelObject, Y: ModelObject) -> ModelObject:
    """Componentwise direct sum; the defaults must present the same way."""
    if X.space != Y.space:
        raise ValueError("objects live over different spaces")
    kinds = {X.default, Y.default} - {DefaultKind.ZERO}
    if len(kinds) > 1:
        raise ValueError("summands present their defaults differently")
    kind = kinds.pop() if kinds else DefaultKind.ZERO
    space = X.space
    vertex = X.vertex.direct_sum(Y.vertex)
    touched = sorted(set(X.touched_members()) | set(Y.touched_members()))
    shell = ModelObject(space, vertex, kind, label=f"{X.label or '?'}+{Y.label or '?'}")
    exceptions = []
    for member in touched:
        sx = X.stalk_at(member)
        sy = Y.stalk_at(member)
        if sx is None or sy is None:
            if sx is not None or sy is not None:
                raise ValueError("summands disagree about which members carry stalks")
            continue
        series = space.series_named(member.series)
        total, incls, projs = direct_sum_with_maps(series.ring, [sx.module, sy.module])
        action = _action_direct_sum(
            series, [sx.action, sy.action], total, incls, projs
        )
        structure = None
        if series_class(series) == "k1":
            target = shell.local_target(member)
            pieces = []
            for obj, s, incl in ((X, sx, incls[0]), (Y, sy, incls[1])):
                sigma = s.structure or CModuleMap.zero(s.module, obj.local_target(member))
                embed = _embed_local(obj, shell, member, side=0 if obj is X else 1)
                proj = projs[0] if obj is X else projs[1]
                pieces.append(embed.compose(sigma).compose(proj))
            structure = _merge_disjoint(pieces, total, target, 0, Q(1))
        exceptions.append((member, StalkData(total, action, structure)))
    if exceptions:
        shell = ModelObject(
            space, vertex, kind, exceptions=tuple(exceptions), label=shell.label
        )
    return shell


def _embed_local(part: ModelObject, whole: ModelObject, member: Member, side: int) -> CModuleMap:
    """Embed the localized default stalk of one summand into the sum's."""
    series = part.series_of(member)
    lpart, pos_part = part._vertex_tensor(series, Indecomposable.laurent(0))
    lwhole, pos_whole = whole._vertex_tensor(series, Indecomposable.laurent(0))
    offset = {}
    if side == 1:
        other = whole.vertex.space
        for deg, dim in part.vertex.space.dims:
            offset[deg] = other.dim(deg) - dim
    entries = {}
    for (deg, r), slot in pos_part.items():
        entries[(pos_whole[(deg, r + offset.get(deg, 0))], slot)] = 1
    return CModuleMap(lpart, lwhole, 0, entries)


def idempotent_split(
    X: ModelObject,
    members: Sequence[Member] = (),
    series_names: Sequence[str] = (),
) -> tuple[ModelObject, ModelObject]:
    """Split X along a clopen member set: (part on the set, complement).

    Whole series are clopen only when finite; single members are isolated
    and always clopen, but a polynomial member may only be split off when
    the stalk there is torsion, otherwise the factor would tear the vertex.
    """
    space = X.space
    subset: set[Member] = set()
    for name in series_names:
        series = space.series_named(name)
        if series.infinite:
            raise ValueError(
                f"series {name!r} accumulates at the top point; the subset is not clopen"
            )
        subset.update(Member(name, p) for p in range(1, series.size + 1))
    for member in members:
        space.member(member.series, member.parameter)
        subset.add(member)

    on_exceptions = []
    off_exceptions = [(m, d) for m, d in X.exceptions if m not in subset]
    off_twist = {m: v for m, v in X.twist.exceptions if m not in subset}
    for member in sorted(subset):
        data = X.stalk_at(member)
        series = space.series_named(member.series)
        if series_class(series) == "k1":
            if data is not None and not localize_c_with_map(data.module)[0].is_zero():
                raise ValueError(
                    f"the stalk at {space.member_display(member)} meets the localized "
                    "vertex; the subset is not a clopen direct factor for this object"
                )
        else:
            if X.default is DefaultKind.FREE and X.exception_at(member) is None:
                off_twist[member] = 0
        if data is not None and not data.module.is_zero():
            on_exceptions.append((member, StalkData(data.module, data.action, None)))

    rep0 = QRepresentation.trivial(space.top_weyl, GradedQSpace())
    on_part = ModelObject(
        space,
        rep0,
        DefaultKind.ZERO,
        exceptions=tuple(on_exceptions),
        label=f"{X.label or '?'}|subset",
    )
    off_part = ModelObject(
        space,
        X.vertex,
        X.default,
        twist=MultiplicativeElement.from_dict(off_twist),
        exceptions=tuple(off_exceptions),
        label=f"{X.label or '?'}|rest",
    )
    return on_part, off_part
