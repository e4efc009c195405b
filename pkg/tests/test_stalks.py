from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blockalg.linear import FiniteGroupData
from blockalg.stalks import (
    CModule,
    CModuleMap,
    Family,
    Indecomposable,
    SemilinearAction,
    StalkRing,
    c_multiplication,
    direct_sum_with_maps,
    equivariant_cmod_hom,
    gamma_c_with_map,
    hom_indecomposable,
    hom_translation,
    is_divisible,
    kernel_cokernel_cmod,
    localize_c,
    localize_c_with_map,
    padded_window,
    tensor_with_space,
    transport_action,
)
from oracles import oracle_hom_dim

Q = Fraction
RING = StalkRing.poly(2)
QRING = StalkRing.rational()

F = Indecomposable.free
T = Indecomposable.torsion
D = Indecomposable.divisible
L = Indecomposable.laurent


def mod(*summands: Indecomposable) -> CModule:
    return CModule(RING, tuple(summands))


indecomposable_st = st.one_of(
    st.builds(F, st.integers(-6, 6)),
    st.builds(T, st.integers(-6, 6), st.integers(1, 4)),
    st.builds(D, st.integers(-6, 6)),
    st.builds(L, st.integers(-6, 6)),
)

cmodule_st = st.lists(indecomposable_st, min_size=0, max_size=3).map(
    lambda parts: CModule(RING, tuple(parts))
)


@st.composite
def cmodule_map_st(draw):
    src = draw(cmodule_st)
    tgt = draw(cmodule_st)
    degree = draw(st.integers(-6, 6))
    entries = {}
    for i, b in enumerate(tgt.summands):
        for j, a in enumerate(src.summands):
            if hom_translation(RING, a, b, degree) is None:
                continue
            coeff = draw(st.integers(-2, 2))
            if coeff:
                entries[(i, j)] = coeff
    return CModuleMap(src, tgt, degree, entries)


class TestHomClassification:
    def test_identity_case(self):
        space, basis = hom_indecomposable(RING, F(0), F(0), (0, 0))
        assert space.dim(0) == 1
        assert 0 in basis

    def test_divisible_to_free_vanishes(self):
        space, _ = hom_indecomposable(RING, D(0), F(0), (-10, 10))
        assert space.is_zero()

    def test_socle_inclusion(self):
        space, _ = hom_indecomposable(RING, T(0, 1), D(0), (0, 0))
        assert space.dim(0) == 1

    def test_free_endomorphisms_are_c_powers(self):
        space, _ = hom_indecomposable(RING, F(0), F(0), (-6, 6))
        assert space.dims == ((0, 1), (2, 1), (4, 1), (6, 1))

    def test_laurent_to_divisible_everywhere(self):
        space, _ = hom_indecomposable(RING, L(0), D(5), (-5, 5))
        assert [d for d, _ in space.dims] == [-5, -3, -1, 1, 3, 5]

    def test_torsion_to_torsion(self):
        # maps T(0,2) -> T(0,3) are multiplication by c and c^2
        space, _ = hom_indecomposable(RING, T(0, 2), T(0, 3), (-10, 10))
        assert space.dims == ((2, 1), (4, 1))

    def test_rational_ring(self):
        assert hom_translation(QRING, F(1), F(4), 3) == 0
        assert hom_translation(QRING, F(1), F(4), 2) is None

    @given(indecomposable_st, indecomposable_st, st.integers(-12, 12))
    @settings(max_examples=300, deadline=None)
    def test_agrees_with_truncated_oracle(self, a, b, degree):
        t = hom_translation(RING, a, b, degree)
        assert (0 if t is None else 1) == oracle_hom_dim(RING, a, b, degree)


class TestLocalize:
    def test_laurent_already_local(self):
        m = mod(L(0))
        assert localize_c(m) == m

    def test_torsion_dies(self):
        assert localize_c(mod(T(0, 3))) == CModule.zero(RING)

    def test_mixed_sum(self):
        assert localize_c(mod(F(2), D(0))) == mod(L(2))

    def test_localization_map_entries(self):
        m = mod(F(2), T(0, 1))
        loc, q = localize_c_with_map(m)
        assert loc == mod(L(0))
        assert q.entries == {(0, 0): 1}

    @given(cmodule_st)
    @settings(max_examples=60, deadline=None)
    def test_idempotent(self, m):
        once = localize_c(m)
        assert localize_c(once) == once

    def test_rational_ring_rejected(self):
        with pytest.raises(ValueError):
            localize_c(CModule(QRING, (F(0),)))


class TestDivisibility:
    def test_divisible_is_divisible(self):
        assert is_divisible(mod(D(0)))

    def test_free_is_not(self):
        assert not is_divisible(mod(F(0)))

    def test_torsion_is_not(self):
        assert not is_divisible(mod(T(0, 2)))

    @given(cmodule_st)
    @settings(max_examples=60, deadline=None)
    def test_matches_c_surjectivity_on_window(self, m):
        # independent check: c-multiplication surjective degreewise
        window = padded_window([m])
        cmap = c_multiplication(m).expand(window)
        lo, hi = window
        surj = all(
            cmap.block(n).rank() == m.dim(n + RING.c_degree)
            for n in range(lo, hi - RING.c_degree + 1)
        )
        assert is_divisible(m) == surj


class TestMapAlgebra:
    def test_identity_laws(self):
        m = mod(F(0), T(2, 2))
        n = mod(D(0), L(0))
        f = CModuleMap(m, n, -2, {(0, 0): 2, (0, 1): 1, (1, 0): 3})
        assert CModuleMap.identity(n).compose(f) == f
        assert f.compose(CModuleMap.identity(m)) == f

    @given(cmodule_map_st(), st.data())
    @settings(max_examples=40, deadline=None)
    def test_expand_respects_composition(self, f, data):
        g_target = f.source
        src = data.draw(cmodule_st)
        degree = data.draw(st.integers(-4, 4))
        entries = {}
        for i, b in enumerate(g_target.summands):
            for j, a in enumerate(src.summands):
                if hom_translation(RING, a, b, degree) is not None:
                    coeff = data.draw(st.integers(-2, 2))
                    if coeff:
                        entries[(i, j)] = coeff
        g = CModuleMap(src, g_target, degree, entries)
        fg = f.compose(g)
        window = padded_window(
            [f.source, f.target, src], degrees=[f.degree, g.degree, fg.degree], extra=2
        )
        lo, hi = window
        left = fg.expand(window)
        right = f.expand(window).compose(g.expand(window))
        for n in range(lo, hi + 1):
            if lo <= n + g.degree <= hi and lo <= n + fg.degree <= hi:
                assert left.block(n) == right.block(n)

    @given(cmodule_map_st())
    @settings(max_examples=60, deadline=None)
    def test_fit_roundtrip(self, f):
        window = padded_window([f.source, f.target], degrees=[f.degree])
        again = CModuleMap.fit(f.source, f.target, f.degree, f.expand(window), window)
        assert again == f

    def test_inverse_of_identity_scale(self):
        m = mod(F(0), D(2))
        f = CModuleMap.identity(m).scale(2)
        g = f.inverse()
        assert g is not None
        assert g.compose(f) == CModuleMap.identity(m)

    def test_inverse_of_laurent_shift(self):
        m = mod(L(0))
        f = CModuleMap(m, m, 2, {(0, 0): 1})
        g = f.inverse()
        assert g is not None
        assert f.compose(g) == CModuleMap.identity(m)
        assert g.degree == -2

    def test_c_on_free_has_no_inverse(self):
        m = mod(F(0))
        assert c_multiplication(m).inverse() is None

    def test_divisible_quotient_has_no_inverse(self):
        q = CModuleMap(mod(D(0)), mod(D(-2)), 0, {(0, 0): 1})
        assert q.inverse() is None


class TestKernelCokernel:
    def test_multiplication_by_c_on_free(self):
        f = c_multiplication(mod(F(0)))
        res = kernel_cokernel_cmod(f)
        assert res.kernel.is_zero()
        assert res.cokernel == mod(T(0, 1))

    def test_divisible_quotient(self):
        q = CModuleMap(mod(D(0)), mod(D(-2)), 0, {(0, 0): 1})
        res = kernel_cokernel_cmod(q)
        assert res.kernel == mod(T(0, 1))
        assert res.cokernel.is_zero()

    def test_free_into_laurent(self):
        incl = CModuleMap(mod(F(0)), mod(L(0)), 0, {(0, 0): 1})
        res = kernel_cokernel_cmod(incl)
        assert res.kernel.is_zero()
        assert res.cokernel == mod(D(-2))

    def test_zero_map(self):
        m = mod(F(0), T(2, 1))
        z = CModuleMap.zero(m, mod(D(0)), 0)
        res = kernel_cokernel_cmod(z)
        assert res.kernel == m
        assert res.cokernel == mod(D(0))

    def test_c_on_torsion(self):
        f = c_multiplication(mod(T(0, 3)))
        res = kernel_cokernel_cmod(f)
        assert res.kernel == mod(T(4, 1))
        assert res.cokernel == mod(T(0, 1))

    @given(st.data())
    @settings(max_examples=40, deadline=None)
    def test_random_free_to_mixed_matches_gaussian(self, data):
        # the documented random example shape
        src = mod(F(0), F(0))
        tgt = mod(F(0), T(0, 2))
        entries = {}
        for i, b in enumerate(tgt.summands):
            for j, a in enumerate(src.summands):
                if hom_translation(RING, a, b, 0) is not None:
                    coeff = data.draw(st.integers(-2, 2))
                    if coeff:
                        entries[(i, j)] = coeff
        f = CModuleMap(src, tgt, 0, entries)
        res = kernel_cokernel_cmod(f)
        window = padded_window([src, tgt], degrees=[0])
        fmat = f.expand(window)
        lo, hi = window
        for n in range(lo + 1, hi):
            blk = fmat.block(n)
            assert res.kernel.dim(n) == blk.ncols - blk.rank()
            assert res.cokernel.dim(n) == tgt.dim(n) - fmat.block(n).rank()

    @given(cmodule_map_st())
    @settings(max_examples=40, deadline=None)
    def test_class_is_closed_and_witnessed(self, f):
        res = kernel_cokernel_cmod(f)
        assert f.compose(res.inclusion).is_zero()
        assert res.projection.compose(f).is_zero()

    def test_rational_ring_kernels(self):
        m2 = CModule(QRING, (F(0), F(0)))
        m1 = CModule(QRING, (F(0),))
        f = CModuleMap(m2, m1, 0, {(0, 0): 1, (0, 1): 1})
        res = kernel_cokernel_cmod(f)
        assert res.kernel == m1
        assert res.cokernel.is_zero()


def sign_action(module: CModule) -> SemilinearAction:
    grp = FiniteGroupData.cyclic(2)
    rho = CModuleMap(
        module, module, 0,
        {(i, i): 1 for i in range(len(module.summands))}, lam=-1,
    )
    return SemilinearAction(grp, module, {1: rho})


class TestSemilinear:
    def test_sign_action_validates(self):
        sign_action(mod(F(0))).validate()
        sign_action(mod(D(0), L(0))).validate()

    def test_scaled_involution_rejected(self):
        m = mod(F(0))
        grp = FiniteGroupData.cyclic(2)
        bad = SemilinearAction(grp, m, {1: CModuleMap(m, m, 0, {(0, 0): 2}, lam=-1)})
        with pytest.raises(ValueError):
            bad.validate()

    def test_equivariant_endomorphisms_are_even_powers(self):
        # with c -> -c the equivariant endomorphisms of Q[c] are Q[c^2]
        act = sign_action(mod(F(0)))
        assert len(equivariant_cmod_hom(act, act, 0)) == 1
        assert len(equivariant_cmod_hom(act, act, 2)) == 0
        assert len(equivariant_cmod_hom(act, act, 4)) == 1

    def test_mixed_semilinearity_kills_everything(self):
        m = mod(F(0))
        act_sign = sign_action(m)
        act_triv = SemilinearAction.trivial(FiniteGroupData.cyclic(2), m)
        for d in range(-4, 5):
            assert equivariant_cmod_hom(act_sign, act_triv, d) == []

    def test_trivial_action_sees_all_maps(self):
        m = mod(F(0))
        act = SemilinearAction.trivial(FiniteGroupData.cyclic(2), m)
        assert len(equivariant_cmod_hom(act, act, 2)) == 1

    def test_transport_through_localization(self):
        m = mod(F(0))
        act = sign_action(m)
        loc, q = localize_c_with_map(m)
        moved = transport_action(act, q, loc)
        moved.validate()
        assert moved.gen_maps[1].lam == -1
        assert moved.gen_maps[1].entries == {(0, 0): 1}


class TestSumsAndParts:
    def test_direct_sum_maps(self):
        parts = [mod(F(0)), mod(T(0, 2), D(4))]
        total, incls, projs = direct_sum_with_maps(RING, parts)
        assert total == mod(F(0), T(0, 2), D(4))
        for i, (inc, prj) in enumerate(zip(incls, projs)):
            assert prj.compose(inc) == CModuleMap.identity(parts[i])
        assert projs[0].compose(incls[1]).is_zero()

    def test_gamma_c(self):
        m = mod(F(0), T(2, 1), D(0), L(0))
        part, incl = gamma_c_with_map(m)
        assert part == mod(T(2, 1), D(0))
        assert localize_c(part).is_zero()
        assert incl.compose(CModuleMap.identity(part)) == incl

    def test_tensor_with_space(self):
        from blockalg.linear import GradedQSpace

        m = mod(F(0))
        v = GradedQSpace(((3, 2),))
        assert tensor_with_space(m, v) == mod(F(3), F(3))

    def test_laurent_shift_normalization(self):
        assert mod(L(4)) == mod(L(0))
        assert mod(L(3)) == mod(L(1))
        assert mod(L(3)) != mod(L(0))
