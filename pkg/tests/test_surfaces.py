"""Lattice arithmetic, Riemann-Roch counts and Mukai-vector algebra."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strangedual.surfaces import (
    ModelMismatchError,
    MukaiVector,
    chi_rr,
    chi_vec,
    elliptic_general,
    elliptic_k3,
    euler_form,
    euler_pair_hom,
    generic_k3,
    h0_surface,
    ideal_sheaf_vector,
    line_bundle_vector,
    moduli_dim,
    mukai_dual,
    mukai_pair,
    mukai_tensor,
    normalized_vector,
    ns_pair,
    point_vector,
    sign_law_sweep,
    structure_vector,
    twist,
)

E = elliptic_k3()
G2 = generic_k3(2)
GEN3 = elliptic_general(3)

coord = st.integers(min_value=-6, max_value=6)
small = st.integers(min_value=-3, max_value=3)


def evec(r, x, y, s):
    return MukaiVector(r, E.cls(x, y), s)


def ediv(x, y):
    return E.cls(x, y)


mukai_vectors = st.builds(evec, coord, coord, coord, coord)
gen3_vectors = st.builds(lambda r, x, y, s: MukaiVector(r, GEN3.cls(x, y), s),
                         small, small, small, small)
divisors = st.builds(ediv, small, small)


class TestNSPairing:
    def test_basis_products(self):
        assert ns_pair(E.sigma, E.sigma) == -2
        assert ns_pair(E.fiber, E.fiber) == 0
        assert ns_pair(E.sigma, E.fiber) == 1

    def test_bilinear_expansion(self):
        # (s+4f).(s-2f) = -2 + 4 - 2 = 0
        assert ns_pair(ediv(1, 4), ediv(1, -2)) == 0

    def test_zero_class(self):
        assert ns_pair(E.zero, ediv(3, -7)) == 0

    def test_generic_rank_one(self):
        g = generic_k3(14)
        assert ns_pair(g.hyperplane, g.hyperplane) == 14
        assert ns_pair(3 * g.hyperplane, 2 * g.hyperplane) == 84

    def test_general_model_section_square(self):
        assert ns_pair(GEN3.sigma, GEN3.sigma) == -3
        assert ns_pair(GEN3.sigma, GEN3.fiber) == 1

    def test_model_mismatch(self):
        with pytest.raises(ModelMismatchError):
            ns_pair(E.sigma, G2.hyperplane)

    @given(small, small, small, small)
    def test_symmetry(self, x1, y1, x2, y2):
        assert ns_pair(ediv(x1, y1), ediv(x2, y2)) == ns_pair(ediv(x2, y2), ediv(x1, y1))

    @given(small, small, small, small, small, small, small)
    def test_bilinearity(self, x1, y1, x2, y2, x3, y3, k):
        d1, d2, d3 = ediv(x1, y1), ediv(x2, y2), ediv(x3, y3)
        assert ns_pair(d1 + k * d2, d3) == ns_pair(d1, d3) + k * ns_pair(d2, d3)


class TestRiemannRoch:
    def test_case_study_bundle(self):
        assert chi_rr(ediv(4, 8)) == 18

    def test_trivial_bundle(self):
        assert chi_rr(E.zero) == 2
        assert chi_rr(GEN3.zero) == 3

    def test_big_nef_closed_form(self):
        # in the branch m > 0, n >= 2m the count is 2 + m(n - m)
        for m in range(1, 6):
            for n in range(2 * m, 2 * m + 10):
                d = ediv(m, n)
                assert chi_rr(d) == 2 + m * (n - m)
                assert h0_surface(d) == chi_rr(d)

    def test_general_model_canonical_twist(self):
        # K = (chi-2).f enters through D.(D-K)/2
        d = GEN3.cls(2, 5)
        dd = ns_pair(d, d)
        dk = ns_pair(d, GEN3.canonical)
        assert chi_rr(d) == (dd - dk) // 2 + 3


class TestSectionCounts:
    def test_remark_instance(self):
        assert h0_surface(ediv(3, 8)) == 17

    def test_section_multiples(self):
        assert h0_surface(ediv(4, 0)) == 1
        assert h0_surface(ediv(0, 0)) == 1

    def test_fiber_multiples(self):
        for a in range(1, 12):
            assert h0_surface(ediv(0, a - 1)) == a

    def test_negative_fiber_direction(self):
        assert h0_surface(ediv(3, -1)) == 0
        assert h0_surface(ediv(0, -5)) == 0

    def test_unknown_window(self):
        assert h0_surface(ediv(2, 3)) is None
        assert h0_surface(ediv(-1, 5)) is None

    def test_model_guard(self):
        with pytest.raises(ModelMismatchError):
            h0_surface(G2.hyperplane)


class TestMukaiPairing:
    def test_structure_sheaf(self):
        o = structure_vector(E)
        assert mukai_pair(o, o) == -2

    def test_normalized_tower_square(self):
        for r in range(1, 6):
            for a in range(0, 12):
                v = normalized_vector(r, a, E)
                assert mukai_pair(v, v) == 2 * a - 2

    def test_expansion_instance(self):
        v = evec(2, 1, 0, -2)
        w = evec(1, 0, 1, 0)
        assert mukai_pair(v, w) == 3

    def test_general_model_rejected(self):
        v = MukaiVector(1, GEN3.zero, 3)
        with pytest.raises(ModelMismatchError):
            mukai_pair(v, v)

    @given(mukai_vectors, mukai_vectors)
    def test_symmetry_and_dual_invariance(self, v, w):
        assert mukai_pair(v, w) == mukai_pair(w, v)
        assert mukai_pair(mukai_dual(v), mukai_dual(w)) == mukai_pair(v, w)


class TestDual:
    def test_structure_sheaf_self_dual(self):
        o = structure_vector(E)
        assert mukai_dual(o) == o

    def test_negates_c1_only_on_k3(self):
        v = evec(3, 1, 5, -2)
        assert mukai_dual(v) == evec(3, -1, -5, -2)

    @given(mukai_vectors)
    def test_involution(self, v):
        assert mukai_dual(mukai_dual(v)) == v

    def test_general_model_chi_correction(self):
        # chi(E*) = chi(E) + c1.K
        v = MukaiVector(2, GEN3.cls(1, 4), 5)
        dual = mukai_dual(v)
        assert dual.c1 == -v.c1
        assert dual.s == 5 + ns_pair(v.c1, GEN3.canonical)
        assert mukai_dual(dual) == v


def _tensor_chern_oracle(v, w):
    """Independent tensor-product route through explicit Chern characters."""
    model = v.model
    k = model.canonical

    def chern2(u):
        return (Fraction(chi_vec(u)) - u.r * model.chi_o
                + Fraction(ns_pair(u.c1, k), 2))

    ch2 = v.r * chern2(w) + w.r * chern2(v) + ns_pair(v.c1, w.c1)
    c1 = v.r * w.c1 + w.r * v.c1
    rank = v.r * w.r
    chi = ch2 + rank * model.chi_o - Fraction(ns_pair(c1, k), 2)
    assert chi.denominator == 1
    return rank, c1, int(chi)


class TestTensor:
    def test_unit(self):
        o = structure_vector(E)
        assert mukai_tensor(o, o) == o
        assert mukai_tensor(o, point_vector(E)) == point_vector(E)

    def test_case_study_product_has_chi_zero(self):
        v = normalized_vector(2, 9, E)
        w = twist(normalized_vector(2, 9, E), -2 * E.fiber)
        prod = mukai_tensor(v, w)
        assert chi_vec(prod) == 0
        # the product's ch2 is -8, so chi = -8 + 2*4
        assert prod.s - prod.r == -8

    @given(mukai_vectors, mukai_vectors)
    def test_commutative(self, v, w):
        assert mukai_tensor(v, w) == mukai_tensor(w, v)

    @settings(max_examples=40)
    @given(mukai_vectors, mukai_vectors, mukai_vectors)
    def test_associative(self, u, v, w):
        left = mukai_tensor(mukai_tensor(u, v), w)
        right = mukai_tensor(u, mukai_tensor(v, w))
        assert left == right

    @given(mukai_vectors, mukai_vectors)
    def test_against_chern_oracle(self, v, w):
        prod = mukai_tensor(v, w)
        rank, c1, chi = _tensor_chern_oracle(v, w)
        assert (prod.r, prod.c1, chi_vec(prod)) == (rank, c1, chi)

    @given(gen3_vectors, gen3_vectors)
    def test_general_model_against_chern_oracle(self, v, w):
        prod = mukai_tensor(v, w)
        rank, c1, chi = _tensor_chern_oracle(v, w)
        assert (prod.r, prod.c1, chi_vec(prod)) == (rank, c1, chi)


class TestTwist:
    def test_fiber_twist_raises_chi_by_one(self):
        for r in range(1, 5):
            v = normalized_vector(r, 7, E)
            assert chi_vec(twist(v, E.fiber)) == chi_vec(v) + 1

    def test_zero_twist(self):
        v = evec(2, 1, 7, -1)
        assert twist(v, E.zero) == v

    @given(mukai_vectors, divisors)
    def test_group_law(self, v, d):
        assert twist(twist(v, d), -d) == v

    @given(mukai_vectors, divisors)
    def test_twist_is_tensor_with_line_bundle(self, v, d):
        assert twist(v, d) == mukai_tensor(v, line_bundle_vector(d))

    @given(gen3_vectors, st.builds(lambda x, y: GEN3.cls(x, y), small, small))
    def test_general_model_group_law(self, v, d):
        assert twist(twist(v, d), -d) == v


class TestChiAndDimensions:
    def test_chi_examples(self):
        assert chi_vec(structure_vector(E)) == 2
        assert chi_vec(point_vector(E)) == 1
        for r in range(1, 8):
            assert chi_vec(normalized_vector(r, 11, E)) == 1

    def test_euler_form_examples(self):
        o = structure_vector(E)
        assert euler_form(o, o) == 2
        assert euler_form(o, point_vector(E)) == 1

    def test_euler_form_deformation_orthogonality(self):
        # H^2 = 2rs - r chi' - s chi makes the pair orthogonal
        g = generic_k3(14)
        v = MukaiVector(2, g.hyperplane, 0 - 2)
        w = MukaiVector(3, g.hyperplane, -1 - 3)
        assert euler_form(v, w) == 0
        assert mukai_pair(v, mukai_dual(w)) == 0

    def test_moduli_dim(self):
        assert moduli_dim(structure_vector(E)) == 0
        assert moduli_dim(evec(2, 1, 0, -2)) == 8
        for r in range(1, 6):
            for a in range(0, 10):
                assert moduli_dim(normalized_vector(r, a, E)) == 2 * a
                assert moduli_dim(normalized_vector(r, a, GEN3)) == 2 * a

    def test_ideal_sheaf_vector(self):
        v = ideal_sheaf_vector(ediv(1, 9), 9)
        assert v == normalized_vector(1, 9, E)


class TestSignLaw:
    @given(mukai_vectors, mukai_vectors)
    def test_euler_form_is_minus_pairing_with_dual(self, v, w):
        assert euler_form(v, w) == -mukai_pair(v, mukai_dual(w))
        assert (euler_form(v, w) == 0) == (mukai_pair(v, mukai_dual(w)) == 0)

    def test_documented_discrepancy(self):
        o = structure_vector(E)
        assert euler_form(o, o) == 2
        assert mukai_pair(o, mukai_dual(o)) == -2

    def test_sweep_small(self):
        checked, mismatches, discrepancy = sign_law_sweep(E, 2)
        assert checked == (5 ** 4) * (5 ** 4 + 1) // 2
        assert mismatches == []
        assert discrepancy == {"euler_form(vO, vO)": 2, "<vO, vO_dual>": -2}

    def test_sweep_generic(self):
        checked, mismatches, _ = sign_law_sweep(generic_k3(6), 2)
        assert mismatches == []
        assert checked == (5 ** 3) * (5 ** 3 + 1) // 2

    @given(mukai_vectors, mukai_vectors)
    def test_hom_pairing_is_minus_mukai_on_k3(self, v, w):
        assert euler_pair_hom(v, w) == -mukai_pair(v, w)

    def test_hom_pairing_general_model(self):
        o = structure_vector(GEN3)
        assert euler_pair_hom(o, o) == 3
        # the canonical correction is antisymmetric
        v = MukaiVector(2, GEN3.cls(1, 0), 1)
        asym = euler_pair_hom(v, o) - euler_pair_hom(o, v)
        assert asym == ns_pair(v.c1, GEN3.canonical) - 2 * ns_pair(o.c1, GEN3.canonical)


class TestNormalizedVectors:
    def test_worked_example(self):
        assert normalized_vector(2, 9, E) == evec(2, 1, 7, -1)

    def test_rank_one_is_twisted_ideal_sheaf(self):
        for a in range(0, 8):
            assert normalized_vector(1, a, E) == evec(1, 1, a, 0)

    def test_rank_validation(self):
        with pytest.raises(ValueError):
            normalized_vector(0, 5, E)
        with pytest.raises(ValueError):
            normalized_vector(2, -1, E)
        with pytest.raises(ModelMismatchError):
            normalized_vector(2, 5, G2)

    def test_general_model_normalization(self):
        v = normalized_vector(3, 10, GEN3)
        assert chi_vec(v) == 1
        assert v.c1 == GEN3.cls(1, 10 - 3 * 2 * 3 // 2)


class TestVectorHelpers:
    def test_content_and_divide(self):
        v = evec(4, 2, -6, 8)
        assert v.content() == 2
        assert v.divide(2) == evec(2, 1, -3, 4)
        with pytest.raises(ValueError):
            v.divide(3)

    def test_arithmetic(self):
        v, w = evec(1, 2, 3, 4), evec(5, 6, 7, 8)
        assert v + w == evec(6, 8, 10, 12)
        assert -v == evec(-1, -2, -3, -4)
        assert 3 * v == evec(3, 6, 9, 12)
        with pytest.raises(ModelMismatchError):
            v + MukaiVector(1, G2.hyperplane, 0)
