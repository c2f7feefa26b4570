import numpy as np
import pytest

from fastla.core import EPS, RngStream, gaussian_matrix, norm
from fastla.baseline import SylvesterSingularError, conventional_sylvester, jacobi_svd
from fastla.matmul import MmEngine
from fastla.sylvester import (NotTriangularError, SylvesterProblem, block_boundaries,
                              block_eigenvalues, kron_operator, min_spectral_gap,
                              predicted_sylr_bound, sep_estimate, sylr,
                              sylr_oracle_equivalence, sylvester_dd)

from helpers import random_triangular

CONV = MmEngine("conv")


def _well_separated(n, m, rng, gap=3.0):
    a = random_triangular(n, rng.split(0), shift=gap)
    b = random_triangular(m, rng.split(1), shift=gap)
    b[np.arange(m), np.arange(m)] *= -1.0
    c = gaussian_matrix(n, m, rng.split(2))
    return a, b, c


class TestSylr:
    def test_scalar_base_case(self):
        r, _ = sylr(np.array([[3.0]]), np.array([[1.0]]), np.array([[-4.0]]))
        assert r[0, 0] == 2.0

    def test_small_vs_conventional(self, rng):
        a = np.array([[3.0, 1.0], [0.0, 4.0]])
        b = np.array([[1.0, 2.0], [0.0, 2.0]])
        c = gaussian_matrix(2, 2, rng)
        r, _ = sylr(a, b, c)
        r_ref = conventional_sylvester(a, b, c)
        assert norm(r - r_ref) <= 1e-10 * norm(r_ref)

    def test_zero_rhs(self, rng):
        a, b, _ = _well_separated(5, 4, rng)
        r, _ = sylr(a, b, np.zeros((5, 4)))
        np.testing.assert_array_equal(r, np.zeros((5, 4)))

    @pytest.mark.parametrize("shape", [(3, 5), (8, 8), (7, 2), (1, 6), (9, 1)])
    def test_shapes_and_residual(self, shape, rng, engine):
        n, m = shape
        a, b, c = _well_separated(n, m, rng.split(n * 10 + m))
        r, rep = sylr(a, b, c, engine)
        assert rep.residual <= 1e3 * (n + m) ** 2 * EPS

    def test_random_64_forward_error_vs_dd_oracle(self, rng, engine):
        a, b, c = _well_separated(64, 64, rng)
        r, rep = sylr(a, b, c, engine)
        r_true = sylvester_dd(a, b, c)
        sep = sep_estimate(a, b).value
        from fastla.inverse import engine_mu_constant

        bound = predicted_sylr_bound(64, norm(a), norm(b), sep,
                                     engine_mu_constant(engine))
        assert norm(r - r_true) / norm(r_true) <= bound

    def test_spectra_overlap_rejected(self):
        a = np.diag([1.0, 2.0])
        b = np.diag([2.0])
        with pytest.raises(SylvesterSingularError):
            sylr(a, b, np.ones((2, 1)))

    def test_non_triangular_rejected(self, rng):
        a = gaussian_matrix(3, 3, rng)
        with pytest.raises(NotTriangularError):
            sylr(a, np.diag([9.0]), np.ones((3, 1)))

    def test_quasi_triangular_bumps(self, rng):
        # 2x2 complex-pair bumps in both operands, solved against the dense
        # Kronecker oracle.
        a = np.array([[2.0, 5.0, 1.0], [-1.0, 2.0, 0.5], [0.0, 0.0, 7.0]])
        b = np.array([[-3.0, 1.0, 0.2], [0.0, -1.0, 2.0], [0.0, -2.0, -1.0]])
        c = gaussian_matrix(3, 3, rng)
        r, rep = sylr(a, b, c)
        k = kron_operator(a, b)
        vec = np.linalg.solve(k, -c.flatten(order="F"))
        assert np.linalg.norm(r.flatten(order="F") - vec) <= 1e-10 * np.linalg.norm(vec)
        assert block_boundaries(a) == [0, 2, 3]
        assert block_boundaries(b) == [0, 1, 3]


class TestSepEstimate:
    def test_scalar(self):
        est = sep_estimate(np.array([[3.0]]), np.array([[1.0]]))
        assert est.value == pytest.approx(2.0, rel=1e-12)
        assert est.method == "exact-kronecker"

    def test_diag_case(self):
        est = sep_estimate(np.diag([1.0, 2.0]), np.array([[0.0]]))
        assert est.value == pytest.approx(1.0, rel=1e-9)

    def test_vs_dense_svd_oracle(self, rng):
        for t in range(5):
            a = random_triangular(4, rng.split(2 * t), shift=1.0)
            b = random_triangular(4, rng.split(2 * t + 1), shift=1.0)
            b[np.arange(4), np.arange(4)] *= -1.0
            est = sep_estimate(a, b)
            smin = jacobi_svd(kron_operator(a, b))[1][-1]
            assert est.value == pytest.approx(smin, rel=1e-8)

    def test_fallback_flagged_as_upper_bound(self, rng):
        a = random_triangular(70, rng.split(0), shift=2.0)
        b = -random_triangular(70, rng.split(1), shift=2.0).T.copy()
        b = np.triu(b.T * 0) - 3.0 * np.eye(70)
        est = sep_estimate(a, b)
        assert est.method == "diag-gap"
        assert est.is_upper_bound
        assert est.value == pytest.approx(min_spectral_gap(a, b))

    def test_subproblem_monotonicity_exhaustive(self, rng):
        # sep(A_ii, B_jj) >= sep(A, B) for every 2x2 split of an 8x8 pair.
        a, b, _ = _well_separated(8, 8, rng, gap=1.0)
        parent = sep_estimate(a, b).value
        for i in range(1, 8):
            for j in range(1, 8):
                for sa, sb in [(a[:i, :i], b[:j, :j]), (a[:i, :i], b[j:, j:]),
                               (a[i:, i:], b[:j, :j]), (a[i:, i:], b[j:, j:])]:
                    assert sep_estimate(sa, sb).value >= parent - 1e-10


class TestOracleEquivalence:
    def test_well_separated_small_stat(self, rng):
        a = np.diag(np.linspace(3.0, 4.0, 6))
        b = np.diag(np.linspace(-4.0, -3.0, 6))
        c = gaussian_matrix(6, 6, rng)
        stat = sylr_oracle_equivalence([SylvesterProblem(a, b, c)])
        assert stat <= 10.0

    def test_grid_of_random_problems(self, rng):
        probs = []
        for t in range(10):
            n = 2 + (t % 7)
            m = 2 + ((t * 3) % 7)
            a, b, c = _well_separated(n, m, rng.split(t))
            probs.append(SylvesterProblem(a, b, c))
        assert sylr_oracle_equivalence(probs) <= 1e3

    def test_tiny_sep_still_bounded(self, rng):
        delta = 1e-6
        a = np.triu(gaussian_matrix(4, 4, rng.split(0)), 1) * 0.1 + np.diag([1.0, 2.0, 3.0, 4.0])
        b = np.diag([1.0 + delta, 2.0 + delta, 3.0 + delta, 4.0 + delta])
        c = gaussian_matrix(4, 4, rng.split(1))
        stat = sylr_oracle_equivalence([SylvesterProblem(a, b, c)])
        assert stat <= 1e3

    def test_zero_rhs_both_zero(self, rng):
        a, b, _ = _well_separated(4, 4, rng)
        stat = sylr_oracle_equivalence([SylvesterProblem(a, b, np.zeros((4, 4)))])
        assert stat == 0.0


class TestForwardErrorGrowth:
    def test_growth_no_faster_than_recurrence(self, rng):
        # Forward error across sep in {1, 1e-2, 1e-4} at n = m = 32 grows
        # no faster than (1/sep)^(1+log2 n) x constant.
        n = 32
        errs = []
        seps = []
        base_diag = np.linspace(1.0, 2.0, n)
        # Diagonal shifts planting min spectral gaps of 1, 1e-2, 1e-4.
        for delta in (2.0, 1e-2, 1e-4):
            a = np.triu(gaussian_matrix(n, n, rng.split(int(1 / delta))), 1) * 0.05
            a += np.diag(base_diag)
            b = np.diag(base_diag + delta)
            c = gaussian_matrix(n, n, rng.split(int(1 / delta) + 1))
            r, _ = sylr(a, b, c)
            r_true = sylvester_dd(a, b, c)
            errs.append(max(norm(r - r_true) / norm(r_true), 1e-300))
            seps.append(sep_estimate(a, b).value)
        slope = np.polyfit(np.log10(1.0 / np.asarray(seps)), np.log10(errs), 1)[0]
        assert slope <= (1.0 + np.log2(n)) + 0.5


class TestBlockEigenvalues:
    def test_real_and_complex_blocks(self):
        t = np.array([[2.0, 5.0, 0.1], [-1.0, 2.0, 0.3], [0.0, 0.0, 7.0]])
        eigs = block_eigenvalues(t)
        want = np.array([2 + np.sqrt(5) * 1j, 2 - np.sqrt(5) * 1j, 7.0])
        assert np.allclose(np.sort_complex(eigs), np.sort_complex(want))
