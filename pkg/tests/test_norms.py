import math

import numpy as np
import pytest

from normctrl.errors import ConvergenceError, ParameterError, StructuralError
from normctrl.matrices import (
    FiniteMatrix,
    FourierSymbol,
    IndexWindow,
    adjoint,
    identity,
    laurent_from_symbol,
    multiply,
)
from normctrl.norms import (
    AlgebraSpec,
    amalgam_constant,
    beurling_norm,
    bgs_norm,
    eigen_extremes_hermitian,
    family_norm,
    inclusion_constant,
    jaffard_norm,
    normalization_constant,
    operator_norm_l2,
    schur_norm,
    spectral_radius,
)

from conftest import mat, random_matrix

INF = math.inf


def single_entry(i, j, value, n=4, lo=0):
    a = np.zeros((n, n), dtype=complex)
    a[i - lo, j - lo] = value
    return FiniteMatrix(IndexWindow(lo, lo + n - 1), a)


class TestSchur:
    @pytest.mark.parametrize("p", [1, 2, 4, INF])
    @pytest.mark.parametrize("alpha", [0, 1, 2.5])
    def test_identity(self, p, alpha):
        assert schur_norm(identity(IndexWindow(-4, 4)), p, alpha) == 1.0

    def test_single_weighted_entry(self):
        assert schur_norm(single_entry(0, 1, 1.0), 1, 1) == 2.0

    def test_tridiagonal_row_sums(self):
        f = FourierSymbol({0: 2, 1: 1, -1: 1})
        a = laurent_from_symbol(f, IndexWindow(-5, 5))
        assert schur_norm(a, 1, 0) == 4.0

    def test_invalid_params(self):
        a = mat([[1]])
        with pytest.raises(ParameterError):
            schur_norm(a, 0.5, 0)
        with pytest.raises(ParameterError):
            schur_norm(a, 2, -1)


class TestBgs:
    def test_identity(self):
        assert bgs_norm(identity(IndexWindow(0, 5)), 1, 0) == 1.0

    def test_laurent_matches_wiener_norm(self):
        f = FourierSymbol({0: 2, 1: 0.5, -1: 0.5})
        a = laurent_from_symbol(f, IndexWindow(-4, 4))
        assert bgs_norm(a, 1, 0) == 3.0

    def test_single_entry_weighted(self):
        assert bgs_norm(single_entry(0, 1, 1.0), 2, 1) == 2.0


class TestBeurling:
    def test_identity(self):
        assert beurling_norm(identity(IndexWindow(0, 5)), 1, 0) == 1.0

    def test_single_entry_counts_three_offsets(self):
        # offsets k in {-1, 0, 1} all see the sup over |i-j| >= |k|
        assert beurling_norm(single_entry(0, 1, 1.0), 1, 0) == 3.0

    def test_p_inf_equals_jaffard(self, rng):
        for alpha in (0.0, 1.5):
            a = random_matrix(rng, 12)
            assert beurling_norm(a, INF, alpha) == jaffard_norm(a, alpha)


class TestJaffard:
    def test_identity(self):
        assert jaffard_norm(identity(IndexWindow(0, 3)), 2.0) == 1.0

    def test_weighted_entry(self):
        assert jaffard_norm(single_entry(0, 3, 0.5), 1) == 2.0

    def test_equals_schur_at_p_inf(self, rng):
        a = random_matrix(rng, 10)
        assert jaffard_norm(a, 1.25) == schur_norm(a, INF, 1.25)


class TestOperatorNorm:
    def test_identity(self):
        assert operator_norm_l2(identity(IndexWindow(0, 3))) == pytest.approx(1.0)

    def test_diagonal(self):
        a = mat([[3, 0], [0, 4]])
        assert operator_norm_l2(a) == pytest.approx(4.0, rel=1e-10)

    def test_symmetric_eigenvalues(self):
        a = mat([[2, 1], [1, 2]])
        assert operator_norm_l2(a) == pytest.approx(3.0, rel=1e-10)

    def test_sign_structured(self):
        # all-ones start is an exact interior eigenvector here
        a = mat([[2, -1], [-1, 2]])
        assert operator_norm_l2(a) == pytest.approx(3.0, rel=1e-10)

    def test_vs_svd_oracle(self, rng):
        for n in (7, 23):
            a = random_matrix(rng, n)
            expected = np.linalg.svd(a.entries, compute_uv=False)[0]
            assert operator_norm_l2(a) == pytest.approx(expected, rel=1e-9)

    def test_bad_tol(self):
        with pytest.raises(ParameterError):
            operator_norm_l2(mat([[1]]), tol=0.0)


class TestEigenExtremes:
    def test_identity(self):
        lam_min, lam_max = eigen_extremes_hermitian(identity(IndexWindow(0, 3)))
        assert (lam_min, lam_max) == pytest.approx((1.0, 1.0))

    def test_hand_example(self):
        lam_min, lam_max = eigen_extremes_hermitian(mat([[5, 4], [4, 5]]))
        assert lam_min == pytest.approx(1.0, abs=1e-9)
        assert lam_max == pytest.approx(9.0, rel=1e-10)

    def test_diagonal(self):
        lam_min, lam_max = eigen_extremes_hermitian(mat([[2, 0, 0], [0, 7, 0], [0, 0, 11]]))
        assert lam_min == pytest.approx(2.0, rel=1e-9)
        assert lam_max == pytest.approx(11.0, rel=1e-9)

    def test_indefinite(self):
        lam_min, lam_max = eigen_extremes_hermitian(mat([[-6, 0], [0, 2]]))
        assert lam_min == pytest.approx(-6.0, rel=1e-9)
        assert lam_max == pytest.approx(2.0, rel=1e-9)

    def test_non_hermitian_rejected(self):
        with pytest.raises(StructuralError):
            eigen_extremes_hermitian(mat([[0, 1], [0, 0]]))

    def test_vs_eigvalsh_oracle(self, rng):
        for _ in range(5):
            m = rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))
            h = m + m.conj().T
            lam_min, lam_max = eigen_extremes_hermitian(
                FiniteMatrix(IndexWindow(0, 15), h)
            )
            ev = np.linalg.eigvalsh(h)
            assert lam_min == pytest.approx(ev[0], rel=1e-8, abs=1e-8)
            assert lam_max == pytest.approx(ev[-1], rel=1e-8, abs=1e-8)


class TestSpectralRadius:
    def test_identity(self):
        assert spectral_radius(identity(IndexWindow(0, 2))) == pytest.approx(1.0)

    def test_negative_dominant(self):
        assert spectral_radius(mat([[-5, 0], [0, 2]])) == pytest.approx(5.0, rel=1e-9)

    def test_nilpotent(self):
        assert spectral_radius(mat([[0, 1], [0, 0]])) == 0.0

    def test_tied_pair_fails(self):
        with pytest.raises(ConvergenceError):
            spectral_radius(mat([[0, 1], [-1, 0]]), max_iter=2000)


class TestNormalization:
    def test_p1_alpha0_rejected(self):
        with pytest.raises(ParameterError):
            normalization_constant(AlgebraSpec("schur", 1, 0))

    def test_schur_11(self):
        assert normalization_constant(AlgebraSpec("schur", 1, 1)) == 4.0

    def test_schur_inf_2(self):
        assert normalization_constant(AlgebraSpec("schur", INF, 2)) == 24.0

    def test_operator_norm_is_normalized(self):
        assert normalization_constant(AlgebraSpec("op")) == 1.0

    def test_amalgam_constant_p1_limit(self):
        assert amalgam_constant(1, 0.5) == 1.0

    @pytest.mark.parametrize(
        "spec",
        [
            AlgebraSpec("schur", 1, 1),
            AlgebraSpec("schur", 2, 1),
            AlgebraSpec("schur", INF, 2),
            AlgebraSpec("bgs", 1, 1),
            AlgebraSpec("bgs", 2, 1.5),
            AlgebraSpec("beurling", 1, 1),
            AlgebraSpec("beurling", 2, 1),
            AlgebraSpec("jaffard", INF, 2),
            AlgebraSpec("op"),
        ],
    )
    def test_submultiplicative_after_renormalization(self, spec, rng):
        k = normalization_constant(spec)
        worst = 0.0
        for _ in range(100):
            a, b = random_matrix(rng, 8), random_matrix(rng, 8)
            na = family_norm(a, spec)
            nb = family_norm(b, spec)
            nab = family_norm(multiply(a, b), spec)
            worst = max(worst, nab / (na * nb))
        assert worst <= k * (1.0 + 1e-12)


class TestCrossFamilyProperties:
    def test_ordering(self, rng):
        for p in (1, 2, 4, INF):
            for alpha in (0, 1, 2):
                a = random_matrix(rng, 20)
                s = schur_norm(a, p, alpha)
                c = bgs_norm(a, p, alpha)
                b = beurling_norm(a, p, alpha)
                assert s <= c * (1 + 1e-12)
                assert c <= b * (1 + 1e-12)

    def test_p_inf_coincidence_exact(self, rng):
        a = random_matrix(rng, 15)
        for alpha in (0.0, 1.0, 2.0):
            j = jaffard_norm(a, alpha)
            assert schur_norm(a, INF, alpha) == j
            assert bgs_norm(a, INF, alpha) == j
            assert beurling_norm(a, INF, alpha) == j

    def test_schur_test_bounds_operator_norm(self, rng):
        for _ in range(10):
            a = random_matrix(rng, 16)
            assert operator_norm_l2(a) <= schur_norm(a, 1, 0) + 1e-9

    def test_adjoint_symmetry(self, rng):
        a = random_matrix(rng, 12)
        star = adjoint(a)
        for spec in (
            AlgebraSpec("schur", 2, 1),
            AlgebraSpec("bgs", 1, 1),
            AlgebraSpec("beurling", 3, 1),
            AlgebraSpec("jaffard", INF, 1),
        ):
            na, ns = family_norm(a, spec), family_norm(star, spec)
            assert abs(na - ns) <= 1e-14 * na

    def test_laurent_bridge(self):
        f = FourierSymbol({0: 2, 1: 0.5, -1: 0.5, 3: -0.25})
        a = laurent_from_symbol(f, IndexWindow(-12, 12))
        total = sum(abs(c) for c in f.coefficients.values())
        weighted = sum((1 + abs(n)) * abs(c) for n, c in f.coefficients.items())
        assert bgs_norm(a, 1, 0) == pytest.approx(total, rel=1e-14)
        assert schur_norm(a, 1, 0) == pytest.approx(total, rel=1e-14)
        assert schur_norm(a, 1, 1) == pytest.approx(weighted, rel=1e-14)


class TestInclusionConstant:
    def test_same_spec(self):
        s = AlgebraSpec("schur", 2, 1)
        assert inclusion_constant(s, s) == 1.0

    def test_schur_to_unweighted(self):
        c = inclusion_constant(AlgebraSpec("schur", 2, 1), AlgebraSpec("schur", 1, 0))
        assert c == pytest.approx(math.sqrt(3.0))

    def test_unweighted_to_operator(self):
        assert inclusion_constant(AlgebraSpec("schur", 1, 0), AlgebraSpec("op")) == 1.0

    def test_unsupported_pair(self):
        with pytest.raises(ParameterError):
            inclusion_constant(AlgebraSpec("schur", 1, 0), AlgebraSpec("schur", 2, 1))
