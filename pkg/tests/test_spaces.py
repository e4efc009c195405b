from dataclasses import replace
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from blockalg.linear import FiniteGroupData, GradedQSpace
from blockalg.spaces import (
    CATALOG_NAMES,
    INF,
    GermSpace,
    IsotropySpace,
    Member,
    MultiplicativeElement,
    SeriesData,
    SheafType,
    SubgroupLabel,
    block_partition,
    catalog,
    euler_exponent,
    germ_dimension,
    is_almost_irreducible,
    partition,
    split_rest,
    wedge_decompose,
)
from blockalg.stalks import StalkRing
from golden_tables import GOLDEN_PARTITIONS, GOLDEN_SHEAF_TYPES
from oracles import oracle_fixed_dim

Q = Fraction


def mk_series(**over) -> SeriesData:
    base = dict(
        name="s",
        pattern="S_{n}",
        cotoral_in_top=False,
        h_converges_to_top=True,
        ring=StalkRing.rational(),
        weyl_to_top=(0,),
    )
    base.update(over)
    return SeriesData(**base)


def mk_space(*series: SeriesData, **over) -> IsotropySpace:
    base = dict(
        name="test_space",
        top_name="G",
        top_weyl=FiniteGroupData.trivial(),
        series=tuple(series),
    )
    base.update(over)
    return IsotropySpace(**base)


ISOLATED = mk_series(
    name="isolated",
    pattern="J",
    cotoral_in_top=False,
    h_converges_to_top=False,
    size=1,
    weyl_to_top=None,
)

# flag pairs as in the two-point-compactified finite-subgroup example
# where infinitely many members share a different limit
NON_IRREDUCIBLE = mk_space(
    mk_series(name="finite_subgroups", pattern="H_{n}"),
    name="finite_under_product",
    infinite_k0_subsets_converge=False,
)


class TestCatalog:
    def test_all_entries_load_and_validate(self):
        for name in CATALOG_NAMES:
            space = catalog(name)
            assert space.name == name
            space.validate()

    def test_unknown_name(self):
        with pytest.raises(ValueError, match="unknown catalog name"):
            catalog("so3")

    def test_catalog_is_cached(self):
        assert catalog("circle_T") is catalog("circle_T")

    def test_golden_partitions(self):
        for name, (k0, k1, kr) in GOLDEN_PARTITIONS.items():
            part = partition(catalog(name))
            assert part.k0_names == k0, name
            assert part.k1_names == k1, name
            assert part.kr_names == kr, name

    def test_golden_sheaf_types(self):
        for name, token in GOLDEN_SHEAF_TYPES.items():
            assert catalog(name).sheaf_type is SheafType(token), name

    def test_circle_component_structure(self):
        space = catalog("circle_T")
        (s,) = space.series
        assert s.weyl.order == 1
        assert s.lam == 1
        assert s.coordinate_descriptor == "powers of c"

    def test_o2_toral_component_structure(self):
        space = catalog("o2_toral")
        (s,) = space.series
        assert space.top_weyl.order == 2
        assert s.weyl.order == 2
        assert s.weyl_to_top == (0, 1)
        assert s.lam == -1
        assert s.coordinate_step == 2
        assert s.coordinate_descriptor == "powers of c^2"

    def test_pin2_matches_o2_shape(self):
        toral = catalog("pin2_toral").series[0]
        assert toral.lam == -1
        assert toral.coordinate_step == 2
        full = catalog("pin2_full").series[0]
        assert full.weyl.order == 2
        assert not full.ring.has_c

    def test_o2_full_component_structure(self):
        space = catalog("o2_full")
        (s,) = space.series
        assert space.top_weyl.order == 1
        assert s.weyl.order == 2
        assert s.coordinate_descriptor == "characteristic functions of cofinite sets"

    def test_order_three_components(self):
        for name in ("su3_normalizer_full", "t2_c3_full"):
            space = catalog(name)
            (s,) = space.series
            assert s.weyl.order == 3
            assert space.top_weyl.order == 1

    def test_member_display(self):
        assert catalog("circle_T").member_display(Member("cyclic", 5)) == "C_5"
        assert catalog("o2_full").member_display(Member("dihedral", 3)) == "D_2n[n=3]"
        assert catalog("t2_semifree").member_display(Member("unit", 1)) == "1"

    def test_member_bounds(self):
        space = catalog("t2_semifree")
        assert space.member("unit", 1) == Member("unit", 1)
        with pytest.raises(ValueError, match="1 member"):
            space.member("unit", 2)
        with pytest.raises(ValueError, match="start at 1"):
            space.member("unit", 0)
        with pytest.raises(ValueError, match="no series"):
            space.member("cyclic", 1)

    def test_member_class(self):
        mixed = catalog("t_times_o2")
        assert mixed.member_class(Member("toral_product", 4)) == "k1"
        assert mixed.member_class(Member("dihedral_product", 4)) == "k0"


class TestPartition:
    def test_missing_flags_raise(self):
        space = mk_space(mk_series(cotoral_in_top=None))
        with pytest.raises(ValueError, match="missing topology flags"):
            partition(space)

    @given(st.lists(st.tuples(st.booleans(), st.booleans()), max_size=6))
    def test_random_flags_give_a_partition(self, flags):
        series = tuple(
            mk_series(
                name=f"s{i}",
                cotoral_in_top=cot,
                h_converges_to_top=conv,
                ring=StalkRing.poly() if cot else StalkRing.rational(),
            )
            for i, (cot, conv) in enumerate(flags)
        )
        space = mk_space(*series)
        part = partition(space)
        bucketed = part.k0_names + part.k1_names + part.kr_names
        assert sorted(bucketed) == sorted(s.name for s in series)
        for s in series:
            if s.cotoral_in_top:
                assert s.name in part.k1_names
            elif s.h_converges_to_top:
                assert s.name in part.k0_names
            else:
                assert s.name in part.kr_names

    def test_every_catalog_entry_is_almost_irreducible(self):
        for name in CATALOG_NAMES:
            assert is_almost_irreducible(catalog(name)), name

    def test_leftover_point_blocks_irreducibility(self):
        space = replace(catalog("o2_full"), sporadic=(ISOLATED,))
        space.validate()
        assert not is_almost_irreducible(space)

    def test_diverging_infinite_subsets_block_irreducibility(self):
        NON_IRREDUCIBLE.validate()
        assert not is_almost_irreducible(NON_IRREDUCIBLE)


class TestSplitRest:
    def test_nothing_to_split(self):
        space = catalog("circle_T")
        core, rest, desc = split_rest(space)
        assert core is space
        assert not rest.all_series()
        assert desc.rest_points == ()

    def test_isolated_point_moves_to_rest(self):
        space = replace(catalog("t_times_o2"), sporadic=(ISOLATED,))
        space.validate()
        core, rest, desc = split_rest(space)
        assert core.name == "t_times_o2/core"
        assert [s.name for s in core.all_series()] == [
            "toral_product",
            "dihedral_product",
        ]
        assert is_almost_irreducible(core)
        assert rest.top_name == ""
        assert [s.name for s in rest.all_series()] == ["isolated"]
        assert partition(rest).kr_names == ("isolated",)
        assert desc.rest_points == ("isolated",)
        assert "height-0" in desc.rest_shape


class TestWedgeDecompose:
    def test_limit_only_space(self):
        v0, v1, desc = wedge_decompose(catalog("o2_full"))
        assert [s.name for s in v0.all_series()] == ["dihedral"]
        assert not v1.all_series()
        assert desc.limit_name == v0.name
        assert desc.cotoral_name == v1.name

    def test_cotoral_only_space(self):
        v0, v1, _ = wedge_decompose(catalog("circle_T"))
        assert not v0.all_series()
        assert [s.name for s in v1.all_series()] == ["cyclic"]

    def test_both_halves_nonempty(self):
        v0, v1, desc = wedge_decompose(catalog("u2_torus_normalizer_dim_ge_1"))
        assert [s.name for s in v0.all_series()] == ["central"]
        assert [s.name for s in v1.all_series()] == ["antidiagonal"]
        assert v0.sheaf_type is SheafType.TYPE0
        assert v1.sheaf_type is SheafType.TYPE1
        assert desc.vertex_name == "u2_torus_normalizer_dim_ge_1/top"

    def test_requires_almost_irreducible(self):
        with pytest.raises(ValueError, match="not almost irreducible"):
            wedge_decompose(NON_IRREDUCIBLE)


class TestBlockPartition:
    W2 = FiniteGroupData.cyclic(2)

    def test_two_blocks_for_reflection_group(self):
        labels = [
            SubgroupLabel("C_1", series="cyclic", parameter=1, pi_image=frozenset({0})),
            SubgroupLabel("C_2", series="cyclic", parameter=2, pi_image=frozenset({0})),
            SubgroupLabel("SO(2)", finite=False, pi_image=frozenset({0})),
            SubgroupLabel("D_2", series="dihedral", parameter=1, pi_image=frozenset({0, 1})),
            SubgroupLabel("D_4", series="dihedral", parameter=2, pi_image=frozenset({0, 1})),
            SubgroupLabel("O(2)", finite=False, pi_image=frozenset({0, 1})),
        ]
        blocks = block_partition(labels, self.W2)
        assert set(blocks) == {frozenset({0}), frozenset({0, 1})}
        assert [l.name for l in blocks[frozenset({0})]] == ["C_1", "C_2", "SO(2)"]
        assert [l.name for l in blocks[frozenset({0, 1})]] == ["D_2", "D_4", "O(2)"]

    def test_full_block_of_double_cover(self):
        labels = [
            SubgroupLabel("C_3 x C_2", series="product", parameter=3, pi_image=frozenset({0, 1})),
            SubgroupLabel("C'_6", series="twisted", parameter=3, pi_image=frozenset({0, 1})),
            SubgroupLabel("C_3", series="plain", parameter=3, pi_image=frozenset({0})),
        ]
        blocks = block_partition(labels, self.W2)
        assert [l.name for l in blocks[frozenset({0, 1})]] == ["C_3 x C_2", "C'_6"]

    def test_trivial_group_gives_one_block(self):
        w = FiniteGroupData.trivial()
        labels = [
            SubgroupLabel("A", pi_image=frozenset({0})),
            SubgroupLabel("B", pi_image=frozenset({0})),
        ]
        assert len(block_partition(labels, w)) == 1

    def test_conjugate_images_share_a_block(self):
        s3 = FiniteGroupData.symmetric3()
        labels = [
            SubgroupLabel("first", pi_image=frozenset({0, 1})),
            SubgroupLabel("second", pi_image=frozenset({0, 2})),
        ]
        blocks = block_partition(labels, s3)
        assert len(blocks) == 1
        ((key, labs),) = blocks.items()
        assert [l.name for l in labs] == ["first", "second"]

    def test_missing_image_raises(self):
        with pytest.raises(ValueError, match="missing its component image"):
            block_partition([SubgroupLabel("A")], self.W2)

    def test_non_subgroup_image_raises(self):
        with pytest.raises(ValueError, match="misses the identity"):
            block_partition([SubgroupLabel("A", pi_image=frozenset({1}))], self.W2)

    def test_duplicate_member_raises(self):
        labels = [
            SubgroupLabel("A", series="s", parameter=1, pi_image=frozenset({0})),
            SubgroupLabel("B", series="s", parameter=1, pi_image=frozenset({0})),
        ]
        with pytest.raises(ValueError, match="duplicate series member"):
            block_partition(labels, self.W2)


class TestEulerExponent:
    def test_worked_values(self):
        assert euler_exponent([2, 3], 2) == 1
        assert euler_exponent([2, 3], 1) == 2
        assert euler_exponent([2, 3], 6) == 0

    def test_zero_character_rejected(self):
        with pytest.raises(ValueError, match="zero rotation number"):
            euler_exponent([2, 0], 3)

    def test_bad_modulus_rejected(self):
        with pytest.raises(ValueError, match="positive integer"):
            euler_exponent([2], 0)

    @given(
        st.lists(st.integers(-12, 12).filter(lambda n: n != 0), min_size=1, max_size=6),
        st.integers(1, 12),
    )
    def test_matches_brute_force_fixed_dimension(self, chars, m):
        assert euler_exponent(chars, m) == oracle_fixed_dim(chars, m)


MIXED_SPACE = catalog("t_times_o2")

exceptions_st = st.dictionaries(
    st.tuples(
        st.sampled_from(["toral_product", "dihedral_product"]), st.integers(1, 5)
    ),
    st.integers(0, 3),
    max_size=4,
)


def _mk_element(raw: dict) -> MultiplicativeElement:
    exc = {}
    for (sname, n), v in raw.items():
        exc[Member(sname, n)] = 1 + v if sname == "toral_product" else 0
    elt = MultiplicativeElement.from_dict(exc)
    elt.validate(MIXED_SPACE)
    return elt


class TestMultiplicativeElement:
    def test_exponents_validate_against_step(self):
        space = catalog("o2_toral")
        MultiplicativeElement.from_dict({Member("cyclic", 3): 2}).validate(space)
        with pytest.raises(ValueError, match="not .*twist-invariant"):
            MultiplicativeElement.from_dict({Member("cyclic", 3): 1}).validate(space)
        with pytest.raises(ValueError, match="positive c-exponent"):
            MultiplicativeElement.from_dict({Member("cyclic", 3): 0}).validate(space)

    def test_limit_member_values(self):
        space = catalog("o2_full")
        MultiplicativeElement.from_dict({Member("dihedral", 2): 0}).validate(space)
        with pytest.raises(ValueError, match="must be 0"):
            MultiplicativeElement.from_dict({Member("dihedral", 2): 1}).validate(space)

    def test_no_values_at_leftover_points(self):
        space = replace(catalog("o2_full"), sporadic=(ISOLATED,))
        elt = MultiplicativeElement.from_dict({Member("isolated", 1): 0})
        with pytest.raises(ValueError, match="no limit point"):
            elt.validate(space)

    def test_repeated_member_rejected(self):
        with pytest.raises(ValueError, match="repeated member"):
            MultiplicativeElement(
                ((Member("cyclic", 2), 1), (Member("cyclic", 2), 2))
            )

    def test_default_values_by_class(self):
        elt = MultiplicativeElement.one()
        assert elt.local_value(MIXED_SPACE, Member("toral_product", 2)) == 0
        assert elt.local_value(MIXED_SPACE, Member("dihedral_product", 2)) == 1

    def test_identity_element(self):
        elt = _mk_element({("toral_product", 1): 1, ("dihedral_product", 2): 0})
        assert elt.times(MultiplicativeElement.one(), MIXED_SPACE) == elt

    @given(exceptions_st, exceptions_st)
    def test_products_stay_in_the_set(self, d1, d2):
        a, b = _mk_element(d1), _mk_element(d2)
        ab = a.times(b, MIXED_SPACE)
        ab.validate(MIXED_SPACE)
        for sname, n in set(d1) | set(d2):
            m = Member(sname, n)
            va = a.local_value(MIXED_SPACE, m)
            vb = b.local_value(MIXED_SPACE, m)
            vab = ab.local_value(MIXED_SPACE, m)
            if sname == "toral_product":
                assert vab == va + vb
            else:
                assert vab == va * vb


class TestGermSpace:
    def test_infinite_universe_default_counts(self):
        germ = GermSpace(default=GradedQSpace.single(0))
        assert germ_dimension(germ, 0) is INF
        assert germ_dimension(germ, 1) == 0

    def test_zero_everywhere(self):
        germ = GermSpace()
        assert germ.is_zero()
        assert germ_dimension(germ, 0) == 0

    def test_finite_exceptions_are_invisible(self):
        bumps = tuple(
            (Member("dihedral", n), GradedQSpace.single(0)) for n in (1, 2, 3)
        )
        germ = GermSpace(exceptions=bumps)
        assert germ_dimension(germ, 0) == 0
        assert germ == GermSpace()
        assert hash(germ) == hash(GermSpace())

    def test_finite_universe_collapses(self):
        germ = GermSpace(default=GradedQSpace.single(0), universe_infinite=False)
        assert germ.is_zero()
        assert germ_dimension(germ, 0) == 0
        assert germ == GermSpace(universe_infinite=False)
        assert germ != GermSpace()

    def test_repeated_member_rejected(self):
        m = Member("dihedral", 1)
        with pytest.raises(ValueError, match="repeated member"):
            GermSpace(exceptions=((m, GradedQSpace()), (m, GradedQSpace.single(0))))


class TestInfinitySentinel:
    def test_comparisons(self):
        assert INF == INF
        assert INF != 7
        assert INF > 100
        assert 100 < INF
        assert INF >= INF
        assert not INF < INF
        assert sorted([INF, 3, 1]) == [1, 3, INF]

    def test_arithmetic(self):
        assert INF + 3 is INF
        assert 3 + INF is INF
        assert INF + INF is INF
        assert INF * 2 is INF
        assert 2 * INF is INF
        assert INF * 0 == 0
        assert 0 * INF == 0
        with pytest.raises(ValueError):
            INF * (-1)

    def test_truthiness(self):
        assert bool(INF)


class TestValidation:
    def test_cotoral_series_needs_polynomial_stalks(self):
        space = mk_space(mk_series(cotoral_in_top=True, ring=StalkRing.rational()))
        with pytest.raises(ValueError, match="needs polynomial stalks"):
            space.validate()

    def test_limit_series_needs_rational_stalks(self):
        space = mk_space(mk_series(cotoral_in_top=False, ring=StalkRing.poly()))
        with pytest.raises(ValueError, match="needs rational stalks"):
            space.validate()

    def test_cotoral_must_converge(self):
        space = mk_space(
            mk_series(
                cotoral_in_top=True, h_converges_to_top=False, ring=StalkRing.poly()
            )
        )
        with pytest.raises(ValueError, match="must converge"):
            space.validate()

    def test_twist_must_fix_coordinate_elements(self):
        space = mk_space(
            mk_series(
                cotoral_in_top=True,
                ring=StalkRing.poly(),
                lam=Q(-1),
                coordinate_step=1,
            )
        )
        with pytest.raises(ValueError, match="not twist-invariant"):
            space.validate()

    def test_rational_series_has_no_twist(self):
        space = mk_space(mk_series(lam=Q(-1)))
        with pytest.raises(ValueError, match="no twist"):
            space.validate()

    def test_infinite_series_needs_component_map(self):
        space = mk_space(mk_series(weyl_to_top=None))
        with pytest.raises(ValueError, match="needs a component homomorphism"):
            space.validate()

    def test_component_map_shape(self):
        space = mk_space(
            mk_series(weyl=FiniteGroupData.cyclic(2), weyl_to_top=(0,)),
            top_weyl=FiniteGroupData.cyclic(2),
        )
        with pytest.raises(ValueError, match="wrong length"):
            space.validate()

    def test_component_map_preserves_identity(self):
        space = mk_space(
            mk_series(weyl=FiniteGroupData.cyclic(2), weyl_to_top=(1, 0)),
            top_weyl=FiniteGroupData.cyclic(2),
        )
        with pytest.raises(ValueError, match="drops the identity"):
            space.validate()

    def test_component_map_is_a_homomorphism(self):
        space = mk_space(
            mk_series(weyl=FiniteGroupData.cyclic(2), weyl_to_top=(0, 1)),
            top_weyl=FiniteGroupData.cyclic(4),
        )
        with pytest.raises(ValueError, match="not a homomorphism"):
            space.validate()

    def test_duplicate_names_rejected(self):
        space = mk_space(mk_series(name="a"), mk_series(name="a"))
        with pytest.raises(ValueError, match="duplicate series names"):
            space.validate()

    def test_sporadic_must_be_single(self):
        space = mk_space(sporadic=(mk_series(name="spor", size=2, weyl_to_top=None),))
        with pytest.raises(ValueError, match="size 1"):
            space.validate()

    def test_topless_space_cannot_converge(self):
        space = mk_space(mk_series(), top_name="")
        with pytest.raises(ValueError, match="no top point"):
            space.validate()

    def test_top_scalars_are_rational(self):
        space = mk_space(mk_series(), top_ring=StalkRing.poly())
        with pytest.raises(ValueError, match="rational scalars"):
            space.validate()
