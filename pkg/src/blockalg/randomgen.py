"""Seeded generators of valid model objects for randomized suites.

Every draw goes through the caller's random.Random, so any failing case
reproduces from its seed alone.  Objects come out valid by
construction: free exceptional parts land isomorphically on the
localized default stalk, torsion parts die there, and exception
actions transport the vertex action with the series multiplier.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Optional

from .linear import (
    FiniteGroupData,
    GradedQMap,
    GradedQSpace,
    QMatrix,
    QRepresentation,
)
from .model import DefaultKind, ModelObject, StalkData, _tensor_positions
from .spaces import (
    IsotropySpace,
    Member,
    MultiplicativeElement,
    SeriesData,
    SheafType,
    series_class,
)
from .stalks import CModule, CModuleMap, Indecomposable, SemilinearAction

Q = Fraction

_SCALARS = (Q(1), Q(2), Q(-1), Q(1, 2), Q(3), Q(-2))


def _sign_line(group: FiniteGroupData, degree: int) -> QRepresentation:
    space = GradedQSpace.single(degree)
    neg = GradedQMap.identity(space).scale(Q(-1))
    return QRepresentation(group, space, {g: neg for g in group.generators})


def _rotation_block(group: FiniteGroupData, degree: int) -> QRepresentation:
    # order-3 generator acting rationally on a plane
    space = GradedQSpace.single(degree, 2)
    mat = QMatrix([[Q(0), Q(-1)], [Q(1), Q(-1)]])
    rot = GradedQMap(space, space, 0, {degree: mat})
    return QRepresentation(group, space, {g: rot for g in group.generators})


def random_group_rep(
    group: FiniteGroupData,
    rng: random.Random,
    *,
    degree_range: tuple[int, int] = (-3, 4),
    max_pieces: int = 3,
) -> QRepresentation:
    """A random rational representation, graded over the degree range."""
    lo, hi = degree_range
    rep = QRepresentation.trivial(group, GradedQSpace())
    single_gen = len(group.generators) == 1
    for _ in range(rng.randint(0, max_pieces)):
        d = rng.randint(lo, hi)
        roll = rng.random()
        if single_gen and group.order == 2 and roll < 0.4:
            piece = _sign_line(group, d)
        elif single_gen and group.order == 3 and roll < 0.4:
            piece = _rotation_block(group, d)
        else:
            piece = QRepresentation.trivial(group, GradedQSpace.single(d))
        rep = rep.direct_sum(piece)
    rep.validate()
    return rep


def random_vertex(space: IsotropySpace, rng: random.Random) -> QRepresentation:
    return random_group_rep(space.top_weyl, rng)


def _junk_action_entry(weyl: FiniteGroupData, rng: random.Random) -> Fraction:
    if len(weyl.generators) == 1 and weyl.order == 2:
        return Q(rng.choice((1, -1)))
    return Q(1)


def _k1_exception(
    series: SeriesData, vertex: QRepresentation, rng: random.Random
) -> StalkData:
    """Free parts hitting every localized line, plus torsion junk."""
    ring = series.ring
    D = ring.c_degree
    step = series.coordinate_step
    parts: list[Indecomposable] = []
    free_ids: list[tuple[int, int]] = []
    shift_of: dict[int, int] = {}
    scale_of: dict[int, Fraction] = {}
    for deg, dim in vertex.space.dims:
        e = rng.choice((0, 0, step, -step, rng.randint(-2, 2)))
        shift_of[deg] = e
        scale_of[deg] = rng.choice(_SCALARS)
        for i in range(dim):
            parts.append(Indecomposable.free(deg + D * e))
            free_ids.append((deg, i))
    junk_count = rng.randint(0, 2)
    junk_eps: list[Fraction] = []
    for _ in range(junk_count):
        parts.append(Indecomposable.torsion(rng.randint(-3, 3), rng.randint(1, 3)))
        junk_eps.append(_junk_action_entry(series.weyl, rng))
    module, perm = CModule.from_list(ring, parts)
    target, lpos = _tensor_positions(ring, Indecomposable.laurent(0), vertex.space)
    entries = {}
    for idx, (deg, i) in enumerate(free_ids):
        entries[(lpos[(deg, i)], perm[idx])] = scale_of[deg]
    sigma = CModuleMap(module, target, 0, entries)

    gen_maps = {}
    nfree = len(free_ids)
    for g in series.weyl.generators:
        mat_of = vertex.element_map(series.weyl_to_top[g])
        act = {}
        for si, (deg, i) in enumerate(free_ids):
            block = mat_of.block(deg)
            # generator of Free(deg + D e) sits at c-power e
            lam_pow = series.lam ** shift_of[deg]
            for sj, (deg2, j) in enumerate(free_ids):
                if deg2 != deg:
                    continue
                v = block.entry(j, i)
                if v:
                    act[(perm[sj], perm[si])] = lam_pow * v
        for k, eps in enumerate(junk_eps):
            act[(perm[nfree + k], perm[nfree + k])] = eps
        gen_maps[g] = CModuleMap(module, module, 0, act, lam=series.lam)
    action = SemilinearAction(series.weyl, module, gen_maps)
    return StalkData(module, action, sigma)


def _k0_exception(series: SeriesData, rng: random.Random) -> StalkData:
    """An arbitrary finite deviation; the germ never sees it."""
    ring = series.ring
    degrees = [rng.randint(-3, 3) for _ in range(rng.randint(1, 3))]
    parts = [Indecomposable.free(d) for d in degrees]
    module, perm = CModule.from_list(ring, parts)
    gen_maps = {}
    single_gen = len(series.weyl.generators) == 1
    for g in series.weyl.generators:
        act = {}
        rotated: set[int] = set()
        if single_gen and series.weyl.order == 3:
            by_degree: dict[int, list[int]] = {}
            for idx, d in enumerate(degrees):
                by_degree.setdefault(d, []).append(idx)
            for idxs in by_degree.values():
                while len(idxs) >= 2 and rng.random() < 0.5:
                    a, b = idxs.pop(), idxs.pop()
                    act[(perm[a], perm[a])] = Q(0)
                    # plane rotation x -> y, y -> -x - y
                    act[(perm[b], perm[a])] = Q(1)
                    act[(perm[a], perm[b])] = Q(-1)
                    act[(perm[b], perm[b])] = Q(-1)
                    rotated.update((a, b))
        for idx in range(len(degrees)):
            if idx not in rotated:
                act[(perm[idx], perm[idx])] = _junk_action_entry(series.weyl, rng)
        act = {k: v for k, v in act.items() if v}
        gen_maps[g] = CModuleMap(module, module, 0, act)
    action = SemilinearAction(series.weyl, module, gen_maps)
    return StalkData(module, action, None)


def _pick_members(
    space: IsotropySpace, rng: random.Random, count: int
) -> list[Member]:
    pool: list[Member] = []
    for s in space.all_series():
        size = s.size if s.size is not None else 6
        pool.extend(Member(s.name, p) for p in range(1, min(size, 6) + 1))
    rng.shuffle(pool)
    return pool[:count]


def random_model_object(
    space: IsotropySpace,
    rng: random.Random,
    *,
    max_exceptions: int = 3,
    kind: Optional[DefaultKind] = None,
) -> ModelObject:
    """A valid random object over a pure space, of the given or a drawn kind."""
    if kind is None:
        kind = rng.choice(
            (
                DefaultKind.FREE,
                DefaultKind.FREE,
                DefaultKind.FREE,
                DefaultKind.ZERO,
                DefaultKind.LOCALIZED,
            )
        )
    stype = space.sheaf_type
    if kind is DefaultKind.LOCALIZED:
        vertex = random_vertex(space, rng)
        return ModelObject(space, vertex, kind, label="rand-e")

    if kind is DefaultKind.ZERO:
        vertex = QRepresentation.trivial(space.top_weyl, GradedQSpace())
        exceptions = []
        for member in _pick_members(space, rng, rng.randint(0, max_exceptions)):
            series = space.series_named(member.series)
            if series_class(series) == "k1":
                parts = [
                    Indecomposable.torsion(rng.randint(-3, 3), rng.randint(1, 3))
                    for _ in range(rng.randint(1, 2))
                ]
                module, perm = CModule.from_list(series.ring, parts)
                gen_maps = {
                    g: CModuleMap(
                        module,
                        module,
                        0,
                        {
                            (perm[i], perm[i]): _junk_action_entry(series.weyl, rng)
                            for i in range(len(parts))
                        },
                        lam=series.lam,
                    )
                    for g in series.weyl.generators
                }
                action = SemilinearAction(series.weyl, module, gen_maps)
                target = CModule.zero(series.ring)
                data = StalkData(module, action, CModuleMap.zero(module, target))
            else:
                data = _k0_exception(series, rng)
            exceptions.append((member, data))
        return ModelObject(
            space, vertex, kind, exceptions=tuple(exceptions), label="rand-f"
        )

    vertex = random_vertex(space, rng)
    members = _pick_members(space, rng, rng.randint(0, max_exceptions) + 1)
    twist_map = {}
    if members and rng.random() < 0.4:
        m = members.pop()
        series = space.series_named(m.series)
        if series_class(series) == "k1":
            twist_map[m] = series.coordinate_step * rng.randint(1, 2)
        else:
            twist_map[m] = 0
    exceptions = []
    for member in members[: rng.randint(0, max_exceptions)]:
        series = space.series_named(member.series)
        if series_class(series) == "k1":
            exceptions.append((member, _k1_exception(series, vertex, rng)))
        else:
            exceptions.append((member, _k0_exception(series, rng)))
    return ModelObject(
        space,
        vertex,
        DefaultKind.FREE,
        twist=MultiplicativeElement.from_dict(twist_map),
        exceptions=tuple(exceptions),
        label="rand",
    )


def random_representable(
    space: IsotropySpace,
    rng: random.Random,
    *,
    max_exceptions: int = 3,
) -> "PreseparatedObject":
    """A random preseparated object on which reassembly is defined.

    Draws a separated standard object, a vertex skyscraper, or (over
    polynomial stalks) the sum of a skyscraper with a separated object
    concentrated on members.
    """
    from .separation import direct_sum_preseparated, separate, vertex_skyscraper

    roll = rng.random()
    type1 = space.sheaf_type is SheafType.TYPE1
    if roll < 0.2:
        return vertex_skyscraper(space, random_vertex(space, rng))
    if type1 and roll < 0.4:
        member_part = separate(
            random_model_object(
                space, rng, max_exceptions=max_exceptions, kind=DefaultKind.ZERO
            )
        )
        sky = vertex_skyscraper(space, random_vertex(space, rng))
        return direct_sum_preseparated(member_part, sky)
    return separate(random_model_object(space, rng, max_exceptions=max_exceptions))
