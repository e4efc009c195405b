import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blockalg.linear import GradedQMap, GradedQSpace, QMatrix, QRepresentation
from blockalg.model import (
    DefaultKind,
    ModelObject,
    StalkData,
    cell_sigma_F,
    cell_sigma_G,
    check_morphism,
    direct_sum,
    morphism_is_iso,
    skyscraper_e,
    skyscraper_f,
    validate,
    zero_object,
)
from blockalg.randomgen import random_model_object, random_representable
from blockalg.separation import (
    PreseparatedObject,
    SpreadStalk,
    UnrepresentableError,
    cellular_equivalence_check,
    counit_check,
    direct_sum_preseparated,
    reassemble,
    separate,
    triangle_identities_check,
    unit_check,
    unit_morphism,
    validate_preseparated,
    vertex_skyscraper,
)
from blockalg.spaces import CATALOG_NAMES, Member, MultiplicativeElement, catalog, wedge_decompose
from blockalg.stalks import CModule, CModuleMap, Indecomposable, SemilinearAction

Q = Fraction
F = Indecomposable.free
T = Indecomposable.torsion

CIRCLE = catalog("circle_T")
O2T = catalog("o2_toral")
O2F = catalog("o2_full")
SEMIFREE = catalog("t2_semifree")


def pure_spaces():
    out = []
    for name in CATALOG_NAMES:
        sp = catalog(name)
        if sp.sheaf_type.name == "MIXED":
            v0, v1, _ = wedge_decompose(sp)
            out.extend((v0, v1))
        else:
            out.append(sp)
    return out


PURE = pure_spaces()
TYPE1 = [sp for sp in PURE if sp.sheaf_type.name == "TYPE1"]
TYPE0 = [sp for sp in PURE if sp.sheaf_type.name == "TYPE0"]


def trivial_rep(space, dims):
    return QRepresentation.trivial(space.top_weyl, GradedQSpace.span(dims))


def nz(result):
    return {d: v for d, v in result.dims.items() if v}


class TestSeparate:
    def test_sigma_G_spreads_with_invertible_maps(self):
        e = separate(cell_sigma_G(CIRCLE))
        assert e.default is DefaultKind.FREE
        assert e.vertex.space.dims == ((0, 1),)
        assert e.exceptions == ()
        member = Member("cyclic", 3)
        spread = e.spread_at(member)
        assert spread.inverse() is not None
        assert validate_preseparated(e).passed

    def test_sigma_F_keeps_the_single_stalk(self):
        e = separate(cell_sigma_F(CIRCLE, "cyclic", 2))
        assert e.default is DefaultKind.ZERO
        assert e.vertex.space.is_zero()
        ((member, sd),) = e.exceptions
        assert member == Member("cyclic", 2)
        assert sd.module.summands == (T(0, 1),)
        # torsion dies in localization, so the spreading map is 0 -> 0
        assert e.spread_at(member).target.is_zero()

    def test_type0_localized_becomes_vertex_skyscraper(self):
        W = trivial_rep(O2F, {0: 1, 2: 2})
        e = separate(skyscraper_e(O2F, W))
        assert e.default is DefaultKind.ZERO
        assert e.vertex.space == W.space
        assert e.exceptions == ()

    def test_type0_stalks_carry_over_verbatim(self):
        rng = random.Random(41)
        x = random_model_object(O2F, rng, kind=DefaultKind.FREE)
        e = separate(x)
        assert len(e.exceptions) == len(x.exceptions)
        for (m1, d1), (m2, d2) in zip(e.exceptions, x.exceptions):
            assert m1 == m2 and d1.module == d2.module
            assert d1.spread is None

    def test_twist_carries_over(self):
        member = O2T.member("cyclic", 2)
        tw = MultiplicativeElement.from_dict({member: 2})
        x = ModelObject(O2T, trivial_rep(O2T, {0: 1}), DefaultKind.FREE, twist=tw)
        e = separate(x)
        assert e.twist == tw
        assert e.spread_at(member).inverse() is not None

    def test_preserves_validity_on_random_objects(self):
        rng = random.Random(5)
        for _ in range(18):
            sp = rng.choice(PURE)
            e = separate(random_model_object(sp, rng))
            assert validate_preseparated(e).passed

    def test_rejects_non_invertible_localized_structure(self):
        # a free stalk attached by the zero structure map does not separate
        series = CIRCLE.all_series()[0]
        module = CModule(series.ring, (F(0),))
        data = StalkData(
            module,
            SemilinearAction.trivial(series.weyl, module),
            None,
        )
        x = ModelObject(
            CIRCLE,
            trivial_rep(CIRCLE, {0: 1}),
            DefaultKind.FREE,
            exceptions=((Member("cyclic", 1), data),),
        )
        assert not validate(x).passed
        with pytest.raises(ValueError, match="does not invert"):
            separate(x)

    def test_additive_on_random_pairs(self):
        rng = random.Random(23)
        for _ in range(8):
            sp = rng.choice(PURE)
            x = random_model_object(sp, rng)
            y = random_model_object(sp, rng, kind=x.default)
            lhs = separate(direct_sum(x, y))
            rhs = direct_sum_preseparated(separate(x), separate(y))
            assert lhs.same_as(rhs)


class TestPreseparatedObjects:
    def test_type0_localized_default_rejected(self):
        with pytest.raises(ValueError, match="zero default"):
            PreseparatedObject(O2F, trivial_rep(O2F, {0: 1}), DefaultKind.LOCALIZED)

    def test_rational_stalks_carry_no_spread(self):
        series = O2F.all_series()[0]
        module = CModule(series.ring, (F(0),))
        sd = SpreadStalk(
            module,
            SemilinearAction.trivial(series.weyl, module),
            CModuleMap.zero(CModule.zero(series.ring), module),
        )
        with pytest.raises(ValueError, match="no spreading map"):
            PreseparatedObject(
                O2F,
                trivial_rep(O2F, {}),
                DefaultKind.ZERO,
                exceptions=((Member("dihedral", 1), sd),),
            )

    def test_spread_endpoints_checked(self):
        series = CIRCLE.all_series()[0]
        module = CModule(series.ring, (T(0, 2),))
        bad = CModuleMap.zero(module, module)
        sd = SpreadStalk(module, SemilinearAction.trivial(series.weyl, module), bad)
        with pytest.raises(ValueError, match="spreading map"):
            PreseparatedObject(
                CIRCLE,
                trivial_rep(CIRCLE, {}),
                DefaultKind.ZERO,
                exceptions=((Member("cyclic", 1), sd),),
            )

    def test_vertex_skyscraper_shape(self):
        sky = vertex_skyscraper(CIRCLE, trivial_rep(CIRCLE, {0: 1, 3: 1}))
        assert sky.default is DefaultKind.ZERO
        member = Member("cyclic", 4)
        sd = sky.stalk_at(member)
        assert sd.module.is_zero()
        spread = sky.spread_at(member)
        assert not spread.source.is_zero() and spread.target.is_zero()
        assert validate_preseparated(sky).passed

    def test_same_as_ignores_labels(self):
        a = separate(cell_sigma_G(CIRCLE))
        b = PreseparatedObject(CIRCLE, a.vertex, DefaultKind.FREE, label="other")
        assert a.same_as(b)
        assert not a.same_as(separate(skyscraper_e(CIRCLE, a.vertex)))

    def test_validate_flags_nonequivariant_spread(self):
        # two swapped lines spread through different scales cannot commute
        gen = {
            g: GradedQMap(
                GradedQSpace.single(0, 2),
                GradedQSpace.single(0, 2),
                0,
                {0: QMatrix([[Q(0), Q(1)], [Q(1), Q(0)]])},
            )
            for g in O2T.top_weyl.generators
        }
        rep = QRepresentation(O2T.top_weyl, GradedQSpace.single(0, 2), gen)
        series = O2T.all_series()[0]
        module = CModule(series.ring, (F(0), F(0)))
        swap = CModuleMap(module, module, 0, {(0, 1): 1, (1, 0): 1}, lam=series.lam)
        action = SemilinearAction(
            series.weyl, module, {g: swap for g in series.weyl.generators}
        )
        lv = CModule(series.ring, (Indecomposable.laurent(0), Indecomposable.laurent(0)))
        spread = CModuleMap(lv, lv, 0, {(0, 0): 1, (1, 1): 2})
        pre = PreseparatedObject(
            O2T,
            rep,
            DefaultKind.ZERO,
            exceptions=((Member("cyclic", 1), SpreadStalk(module, action, spread)),),
        )
        report = validate_preseparated(pre)
        ok, detail = report.condition("equivariance")
        assert not ok and "breaks generator" in detail


class TestReassemble:
    def test_round_trip_of_sigma_G_is_the_same_presentation(self):
        for sp in PURE:
            x = cell_sigma_G(sp)
            assert reassemble(separate(x)).same_as(x)

    def test_vertex_skyscraper_reassembles_to_localized(self):
        # all stalks zero over vertex V comes back with a Laurent stalk on
        # the vertex at every member
        rep = trivial_rep(CIRCLE, {0: 1, 3: 1})
        back = reassemble(vertex_skyscraper(CIRCLE, rep))
        assert back.same_as(skyscraper_e(CIRCLE, rep))
        member = Member("cyclic", 7)
        stalk = back.stalk_at(member)
        assert all(s.family.name == "LAURENT" for s in stalk.module.summands)
        assert validate(back).passed

    def test_type0_vertex_skyscraper_reassembles_to_germ_object(self):
        rep = trivial_rep(O2F, {0: 2})
        back = reassemble(vertex_skyscraper(O2F, rep))
        assert back.same_as(skyscraper_e(O2F, rep))

    def test_type0_vertex_plus_stalk_is_unrepresentable(self):
        series = O2F.all_series()[0]
        module = CModule(series.ring, (F(0),))
        sd = SpreadStalk(module, SemilinearAction.trivial(series.weyl, module), None)
        pre = PreseparatedObject(
            O2F,
            trivial_rep(O2F, {0: 1}),
            DefaultKind.ZERO,
            exceptions=((Member("dihedral", 3), sd),),
        )
        with pytest.raises(UnrepresentableError, match="germs"):
            reassemble(pre)

    def test_type1_vertex_plus_stalk_is_representable(self):
        pre = direct_sum_preseparated(
            separate(skyscraper_f(CIRCLE, "cyclic", 2, CModule(CIRCLE.all_series()[0].ring, (T(0, 2),)))),
            vertex_skyscraper(CIRCLE, trivial_rep(CIRCLE, {0: 1})),
        )
        back = reassemble(pre)
        assert back.default is DefaultKind.LOCALIZED
        assert validate(back).passed
        stalk = back.stalk_at(Member("cyclic", 2))
        families = sorted(s.family.name for s in stalk.module.summands)
        assert families == ["LAURENT", "TORSION"]

    def test_reassembled_objects_validate(self):
        rng = random.Random(63)
        for _ in range(20):
            sp = rng.choice(PURE)
            y = random_representable(sp, rng)
            assert validate(reassemble(y)).passed

    def test_additive_on_representable_sums(self):
        rng = random.Random(17)
        for _ in range(8):
            sp = rng.choice(PURE)
            a = separate(random_model_object(sp, rng))
            b = separate(random_model_object(sp, rng, kind=reassemble(a).default))
            lhs = reassemble(direct_sum_preseparated(a, b))
            rhs = direct_sum(reassemble(a), reassemble(b))
            assert lhs.same_as(rhs)


class TestUnit:
    def test_unit_check_sigma_G(self):
        for sp in PURE:
            report = unit_check(cell_sigma_G(sp))
            assert report.unit_iso
            assert report.unit_map is not None

    def test_unit_morphism_is_checked_and_iso(self):
        rng = random.Random(3)
        x = random_model_object(O2T, rng)
        u = unit_morphism(x)
        assert u.source is x
        assert check_morphism(u) == []
        assert morphism_is_iso(u)

    def test_unit_on_catalog_objects(self):
        ring = CIRCLE.all_series()[0].ring
        objs = [
            cell_sigma_F(CIRCLE, "cyclic", 1),
            skyscraper_e(CIRCLE, trivial_rep(CIRCLE, {0: 1, -2: 1})),
            skyscraper_f(CIRCLE, "cyclic", 3, CModule(ring, (T(0, 3), T(2, 1)))),
            zero_object(CIRCLE),
        ]
        for x in objs:
            assert unit_check(x).unit_iso

    def test_unit_on_both_sheaf_types_random(self):
        rng = random.Random(29)
        for _ in range(24):
            sp = rng.choice(PURE)
            x = random_model_object(sp, rng)
            report = unit_check(x)
            assert report.unit_iso, report.witness

    def test_unit_with_twist(self):
        member = O2T.member("cyclic", 1)
        tw = MultiplicativeElement.from_dict({member: 4})
        x = ModelObject(O2T, trivial_rep(O2T, {0: 1}), DefaultKind.FREE, twist=tw)
        assert unit_check(x).unit_iso


class TestCounit:
    def test_counit_iso_on_type0_objects(self):
        rng = random.Random(11)
        for _ in range(12):
            sp = rng.choice(TYPE0)
            y = random_representable(sp, rng)
            report = counit_check(y)
            assert report.counit_iso, report.witness

    def test_counit_fails_on_type1_vertex_skyscraper(self):
        sky = vertex_skyscraper(CIRCLE, trivial_rep(CIRCLE, {0: 1}))
        report = counit_check(sky)
        assert report.counit_iso is False
        assert "laurent" in report.witness

    def test_counit_failure_names_the_member_stalk(self):
        series = CIRCLE.all_series()[0]
        module = CModule(series.ring, (T(0, 1),))
        sd = SpreadStalk(module, SemilinearAction.trivial(series.weyl, module), None)
        pre = PreseparatedObject(
            CIRCLE,
            trivial_rep(CIRCLE, {0: 1}),
            DefaultKind.ZERO,
            exceptions=((Member("cyclic", 5), sd),),
        )
        report = counit_check(pre)
        assert not report.counit_iso
        assert "C_5" in report.witness

    def test_counit_iso_on_type1_separated_images(self):
        rng = random.Random(59)
        for _ in range(12):
            sp = rng.choice(TYPE1)
            y = separate(random_model_object(sp, rng))
            report = counit_check(y)
            assert report.counit_iso, report.witness

    def test_report_describe_mentions_failures(self):
        sky = vertex_skyscraper(O2T, trivial_rep(O2T, {0: 1}))
        text = counit_check(sky).describe()
        assert "counit iso: NO" in text


class TestCellularEquivalence:
    def test_vertex_skyscraper_homs_agree(self):
        sky = vertex_skyscraper(CIRCLE, trivial_rep(CIRCLE, {0: 1}))
        report = cellular_equivalence_check(sky, (-4, 4))
        assert report.passed
        assert report.cells[0][0] == "sigma_G"

    def test_member_image_homs_agree(self):
        y = separate(cell_sigma_F(O2T, "cyclic", 2))
        report = cellular_equivalence_check(y, (-4, 4))
        assert report.passed
        names = [name for name, _ in report.cells]
        assert any("C_2" in name for name in names)

    def test_random_representables_agree(self):
        rng = random.Random(31)
        for _ in range(10):
            sp = rng.choice(TYPE1)
            y = random_representable(sp, rng)
            report = cellular_equivalence_check(y, (-3, 3))
            assert report.passed, report.describe()

    def test_type0_rejected(self):
        sky = vertex_skyscraper(O2F, trivial_rep(O2F, {0: 1}))
        with pytest.raises(ValueError, match="polynomial"):
            cellular_equivalence_check(sky)


class TestTriangleIdentities:
    def test_anchor_objects(self):
        for sp in (CIRCLE, O2T, O2F):
            for x in (
                cell_sigma_G(sp),
                cell_sigma_F(sp, sp.all_series()[0].name, 1),
                skyscraper_e(sp, trivial_rep(sp, {0: 1})),
            ):
                assert triangle_identities_check(x, separate(x))

    def test_holds_where_the_counit_fails(self):
        sky = vertex_skyscraper(CIRCLE, trivial_rep(CIRCLE, {0: 2}))
        assert not counit_check(sky).counit_iso
        assert triangle_identities_check(cell_sigma_G(CIRCLE), sky)

    def test_random_pairs(self):
        rng = random.Random(83)
        for _ in range(10):
            sp = rng.choice(PURE)
            x = random_model_object(sp, rng)
            y = random_representable(sp, rng)
            assert triangle_identities_check(x, y)


class TestDirectSumPreseparated:
    def test_kind_mismatch_raises(self):
        a = separate(cell_sigma_G(CIRCLE))
        b = separate(skyscraper_e(CIRCLE, trivial_rep(CIRCLE, {0: 1})))
        with pytest.raises(ValueError, match="defaults differently"):
            direct_sum_preseparated(a, b)

    def test_skyscraper_cannot_join_a_free_default(self):
        a = separate(cell_sigma_G(CIRCLE))
        sky = vertex_skyscraper(CIRCLE, trivial_rep(CIRCLE, {0: 1}))
        with pytest.raises(ValueError, match="zero-default summand"):
            direct_sum_preseparated(a, sky)

    def test_member_part_plus_skyscraper(self):
        part = separate(cell_sigma_F(CIRCLE, "cyclic", 1))
        sky = vertex_skyscraper(CIRCLE, trivial_rep(CIRCLE, {0: 1}))
        total = direct_sum_preseparated(part, sky)
        assert total.default is DefaultKind.ZERO
        assert not total.vertex.space.is_zero()
        assert validate_preseparated(total).passed
        assert validate(reassemble(total)).passed

    def test_sum_of_skyscrapers_merges_vertices(self):
        a = vertex_skyscraper(O2T, trivial_rep(O2T, {0: 1}))
        b = vertex_skyscraper(O2T, trivial_rep(O2T, {2: 1}))
        total = direct_sum_preseparated(a, b)
        assert total.vertex.space.dims == ((0, 1), (2, 1))
        assert reassemble(total).same_as(
            skyscraper_e(O2T, total.vertex)
        )


@settings(max_examples=12, deadline=None)
@given(st.integers(0, 10**6))
def test_unit_iso_property(seed):
    rng = random.Random(seed)
    sp = rng.choice(PURE)
    x = random_model_object(sp, rng)
    report = unit_check(x)
    assert report.unit_iso, report.witness


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10**6))
def test_round_trip_property(seed):
    rng = random.Random(seed)
    sp = rng.choice(PURE)
    y = random_representable(sp, rng)
    assert validate(reassemble(y)).passed
    assert counit_check(separate(reassemble(y))).counit_iso
