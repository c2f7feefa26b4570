"""Recursive Sylvester solver with sep(A,B) conditioning diagnostics.

``sylr`` solves A R - R B = -C for (quasi-)upper-triangular A and B by
splitting all blocks in half: the lower-left equation is solved first,
its solution feeds the right-hand sides of the diagonal equations, and
the upper-right equation closes the square.  Every right-hand-side
update is materialized through the multiplication engine.

2x2 diagonal bumps (complex conjugate pairs of a real Schur form) are
respected: splits only land on block boundaries and the base case solves
the (at most 4-dimensional) Kronecker system directly.

sep(A,B) = sigma_min(I (x) A - B^T (x) I) is computed exactly for
n*m <= 4096 by inverse power iteration whose applications of K^-1 and
K^-T are themselves triangular Sylvester solves; beyond that the
min-diagonal-gap value is returned, flagged as an upper bound on sep
(not an estimate of it).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .baseline import SylvesterSingularError, conventional_sylvester
from .core import EPS, FROBENIUS, DimensionError, RngStream, as_matrix, norm
from .matmul import CONVENTIONAL, MmEngine, multiply
from .results import StabilityReport
from . import dd

EXACT_SEP_LIMIT = 4096


class NotTriangularError(ValueError):
    """Input is not (quasi-)upper-triangular with the declared block pattern."""


@dataclass(frozen=True)
class SylvesterProblem:
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        a, b, c = as_matrix(self.a), as_matrix(self.b), as_matrix(self.c)
        n, m = c.shape
        if a.shape != (n, n) or b.shape != (m, m):
            raise DimensionError("SylvesterProblem shape mismatch")


@dataclass
class SepEstimate:
    value: float
    method: str  # "exact-kronecker" or "diag-gap"
    is_upper_bound: bool = False


def block_boundaries(t) -> list:
    """Boundaries of the quasi-triangular block pattern of t (2x2 bumps)."""
    t = as_matrix(t)
    n = t.shape[0]
    bounds = [0]
    i = 0
    while i < n:
        if i + 1 < n and t[i + 1, i] != 0.0:
            i += 2
        else:
            i += 1
        bounds.append(i)
    return bounds


def block_eigenvalues(t, bounds=None) -> np.ndarray:
    """Complex eigenvalues of a quasi-triangular matrix, block by block."""
    t = as_matrix(t)
    if bounds is None:
        bounds = block_boundaries(t)
    eigs = []
    for lo, hi in zip(bounds, bounds[1:]):
        if hi - lo == 1:
            eigs.append(complex(t[lo, lo]))
        else:
            tr = t[lo, lo] + t[lo + 1, lo + 1]
            det = t[lo, lo] * t[lo + 1, lo + 1] - t[lo, lo + 1] * t[lo + 1, lo]
            disc = tr * tr - 4.0 * det
            if disc >= 0.0:
                root = np.sqrt(disc)
                eigs.extend([complex((tr + root) / 2.0), complex((tr - root) / 2.0)])
            else:
                root = np.sqrt(-disc)
                eigs.extend([complex(tr / 2.0, root / 2.0), complex(tr / 2.0, -root / 2.0)])
    return np.asarray(eigs)


def _check_pattern(t, bounds, name):
    mask = np.tril(np.ones(t.shape, dtype=bool), -1)
    for lo, hi in zip(bounds, bounds[1:]):
        mask[lo:hi, lo:hi] = False
    if np.any(t[mask] != 0.0):
        raise NotTriangularError(f"{name} is not upper triangular outside its blocks")


def min_spectral_gap(a, b, a_blocks=None, b_blocks=None) -> float:
    """min |lambda_i(A) - mu_j(B)| over the block spectra."""
    la = block_eigenvalues(a, a_blocks)
    lb = block_eigenvalues(b, b_blocks)
    return float(np.min(np.abs(la[:, None] - lb[None, :])))


def sylr(a, b, c, engine: MmEngine = CONVENTIONAL, counter=None,
         a_blocks=None, b_blocks=None, with_report: bool = True):
    """Solve A R - R B = -C recursively; returns (R, StabilityReport)."""
    a = as_matrix(a)
    b = as_matrix(b)
    c = as_matrix(c)
    n, m = c.shape
    if a.shape != (n, n) or b.shape != (m, m):
        raise DimensionError("sylr shape mismatch")
    ab = a_blocks if a_blocks is not None else block_boundaries(a)
    bb = b_blocks if b_blocks is not None else block_boundaries(b)
    _check_pattern(a, ab, "A")
    _check_pattern(b, bb, "B")
    if min_spectral_gap(a, b, ab, bb) == 0.0:
        raise SylvesterSingularError("spectra of A and B are not disjoint")
    r = _sylr_rec(a, b, c, engine, counter, np.asarray(ab), np.asarray(bb))
    if not with_report:
        return r, StabilityReport(0.0)
    resid = norm(a @ r - r @ b + c, FROBENIUS)
    denom = (norm(a, FROBENIUS) + norm(b, FROBENIUS)) * norm(r, FROBENIUS)
    report = StabilityReport(residual=resid / denom if denom > 0.0 else resid,
                             norm_kind=FROBENIUS)
    return r, report


def _nearest_cut(bounds, target):
    interior = bounds[1:-1]
    return int(interior[np.argmin(np.abs(interior - target))])


def _sylr_rec(a, b, c, engine, counter, ab, bb):
    n, m = c.shape
    a_atomic = len(ab) == 2
    b_atomic = len(bb) == 2
    if a_atomic and b_atomic:
        return _base_solve(a, b, c, counter)
    if a_atomic:
        sb = _nearest_cut(bb, m / 2.0)
        bb_l = bb[bb <= sb]
        bb_r = bb[bb >= sb] - sb
        r1 = _sylr_rec(a, b[:sb, :sb], c[:, :sb], engine, counter, ab, bb_l)
        c2 = c[:, sb:] - multiply(r1, b[:sb, sb:], engine, counter)
        if counter is not None:
            counter.count(adds=c2.size)
        r2 = _sylr_rec(a, b[sb:, sb:], c2, engine, counter, ab, bb_r)
        return np.hstack([r1, r2])
    if b_atomic:
        sa = _nearest_cut(ab, n / 2.0)
        ab_t = ab[ab <= sa]
        ab_b = ab[ab >= sa] - sa
        r2 = _sylr_rec(a[sa:, sa:], b, c[sa:, :], engine, counter, ab_b, bb)
        c1 = c[:sa, :] + multiply(a[:sa, sa:], r2, engine, counter)
        if counter is not None:
            counter.count(adds=c1.size)
        r1 = _sylr_rec(a[:sa, :sa], b, c1, engine, counter, ab_t, bb)
        return np.vstack([r1, r2])
    sa = _nearest_cut(ab, n / 2.0)
    sb = _nearest_cut(bb, m / 2.0)
    ab_t = ab[ab <= sa]
    ab_b = ab[ab >= sa] - sa
    bb_l = bb[bb <= sb]
    bb_r = bb[bb >= sb] - sb
    a11, a12, a22 = a[:sa, :sa], a[:sa, sa:], a[sa:, sa:]
    b11, b12, b22 = b[:sb, :sb], b[:sb, sb:], b[sb:, sb:]
    r21 = _sylr_rec(a22, b11, c[sa:, :sb], engine, counter, ab_b, bb_l)
    c11 = c[:sa, :sb] + multiply(a12, r21, engine, counter)
    c22 = c[sa:, sb:] - multiply(r21, b12, engine, counter)
    if counter is not None:
        counter.count(adds=c11.size + c22.size)
    r11 = _sylr_rec(a11, b11, c11, engine, counter, ab_t, bb_l)
    r22 = _sylr_rec(a22, b22, c22, engine, counter, ab_b, bb_r)
    c12 = c[:sa, sb:] - multiply(r11, b12, engine, counter) + multiply(a12, r22, engine, counter)
    if counter is not None:
        counter.count(adds=2 * c12.size)
    r12 = _sylr_rec(a11, b22, c12, engine, counter, ab_t, bb_r)
    return np.vstack([np.hstack([r11, r12]), np.hstack([r21, r22])])


def _base_solve(a, b, c, counter):
    n, m = c.shape
    if n == 1 and m == 1:
        if counter is not None:
            counter.count(mults=1, adds=1)
        return np.array([[-c[0, 0] / (a[0, 0] - b[0, 0])]])
    # Bumps: solve the dense Kronecker system of size n*m <= 4.
    k = np.kron(np.eye(m), a) - np.kron(b.T, np.eye(n))
    rhs = -c.flatten(order="F")
    x = _small_solve(k, rhs, counter)
    return x.reshape((m, n)).T


def _small_solve(k, rhs, counter):
    k = k.copy()
    x = rhs.astype(np.float64).copy()
    n = k.shape[0]
    for j in range(n):
        piv = j + int(np.argmax(np.abs(k[j:, j])))
        if k[piv, j] == 0.0:
            raise SylvesterSingularError("singular bump system in sylr base case")
        if piv != j:
            k[[j, piv]] = k[[piv, j]]
            x[[j, piv]] = x[[piv, j]]
        mult = k[j + 1 :, j] / k[j, j]
        k[j + 1 :, j + 1 :] -= np.outer(mult, k[j, j + 1 :])
        x[j + 1 :] -= mult * x[j]
    for j in range(n - 1, -1, -1):
        x[j] = (x[j] - k[j, j + 1 :] @ x[j + 1 :]) / k[j, j]
    if counter is not None:
        counter.count(mults=n * n * n // 3 + n * n, adds=n * n * n // 3 + n * n)
    return x


# ---------------------------------------------------------------------------
# sep(A, B)


def sep_estimate(a, b, a_blocks=None, b_blocks=None, max_dim: int = EXACT_SEP_LIMIT,
                 tol: float = 1e-10, max_iters: int = 500) -> SepEstimate:
    """sigma_min(I (x) A - B^T (x) I), exact for n*m <= max_dim.

    The exact route runs inverse power iteration on K^-1 K^-T where each
    application is a pair of triangular Sylvester solves.  The fallback
    returns min |A_ii - B_jj|, which upper-bounds sep.
    """
    a = as_matrix(a)
    b = as_matrix(b)
    n, m = a.shape[0], b.shape[0]
    ab = a_blocks if a_blocks is not None else block_boundaries(a)
    bb = b_blocks if b_blocks is not None else block_boundaries(b)
    _check_pattern(a, ab, "A")
    _check_pattern(b, bb, "B")
    if n * m > max_dim:
        return SepEstimate(value=min_spectral_gap(a, b, ab, bb), method="diag-gap",
                           is_upper_bound=True)
    if min_spectral_gap(a, b, ab, bb) == 0.0:
        return SepEstimate(value=0.0, method="exact-kronecker")
    ab = np.asarray(ab)
    bb = np.asarray(bb)
    rng = RngStream(0x5E9A)
    x = rng.gaussians(n * m).reshape(n, m)
    x /= norm(x, FROBENIUS)
    sigma = None
    for _ in range(max_iters):
        # y = K^-T x  then  z = K^-1 y
        y = _sylr_rec(b, a, x.T.copy(), CONVENTIONAL, None, bb, ab).T
        z = _sylr_rec(a, b, -y, CONVENTIONAL, None, ab, bb)
        nz = norm(z, FROBENIUS)
        if nz == 0.0:
            break
        new_sigma = 1.0 / np.sqrt(nz)
        x = z / nz
        if sigma is not None and abs(new_sigma - sigma) <= tol * new_sigma:
            sigma = new_sigma
            break
        sigma = new_sigma
    return SepEstimate(value=float(sigma), method="exact-kronecker")


def predicted_sylr_bound(n: int, norm_a: float, norm_b: float, sep: float,
                         mu_const: float = 1.0, calib: float = 10.0) -> float:
    """Relative forward-error bound from the recursive solver's recurrence.

    err(n)/||R|| = O(n^(1+log2 3) mu(n/2) eps ((||A||+||B||)/sep)^(1+log2 n)),
    evaluated in logs and clamped at 1 (above 1, no accuracy is promised).
    """
    import math

    if sep <= 0.0:
        return 1.0
    n = max(n, 2)
    log_b = math.log10(calib * mu_const * EPS)
    log_b += (1.0 + math.log2(3.0)) * math.log10(n)
    log_b += (1.0 + math.log2(n)) * math.log10(max((norm_a + norm_b) / sep, 1.0))
    return 1.0 if log_b >= 0.0 else 10.0 ** log_b


def sylr_oracle_equivalence(problems, engine: MmEngine = CONVENTIONAL) -> float:
    """Max normalized difference between sylr and the conventional solve.

    For each triangular problem, computes both routes and returns
    max ||R_sylr - R_conv||_F / (eps * ||R||_F * (||A|| + ||B||) / sep);
    the two perform the same scalar operations in a different order, so
    the statistic is O(1)-to-moderate, not zero.
    """
    worst = 0.0
    for p in problems:
        a, b, c = as_matrix(p.a), as_matrix(p.b), as_matrix(p.c)
        r1, _ = sylr(a, b, c, engine, with_report=False)
        r2 = conventional_sylvester(a, b, c)
        nr = norm(r2, FROBENIUS)
        if nr == 0.0:
            if norm(r1, FROBENIUS) != 0.0:
                worst = max(worst, np.inf)
            continue
        sep = sep_estimate(a, b).value
        scale = EPS * nr * (norm(a, FROBENIUS) + norm(b, FROBENIUS)) / sep
        worst = max(worst, norm(r1 - r2, FROBENIUS) / scale)
    return float(worst)


def sylvester_dd(a, b, c):
    """Extended-precision column-by-column solve of A R - R B = -C.

    This is the Kronecker-system oracle: the system is permuted
    triangular, so substitution in double-word arithmetic solves it
    exactly up to ~2^-105 roundoff.
    """
    a_dd = dd.DD(as_matrix(a))
    b_dd = dd.DD(as_matrix(b))
    c_dd = dd.DD(as_matrix(c))
    n, m = c_dd.shape
    r = dd.DD(np.zeros((n, m)))
    for j in range(m):
        rhs = -c_dd[:, j : j + 1]
        if j > 0:
            rhs = rhs + r[:, :j] @ b_dd[:j, j : j + 1]
        shift = b_dd[j, j]
        x = dd.DD(np.zeros((n, 1)))
        for i in range(n - 1, -1, -1):
            acc = rhs[i : i + 1, :]
            if i + 1 < n:
                acc = acc - a_dd[i : i + 1, i + 1 :] @ x[i + 1 :, :]
            denom = a_dd[i, i] - shift
            x[i : i + 1, :] = acc / denom
        r[:, j : j + 1] = x
    return r.to_float64()


def kron_operator(a, b) -> np.ndarray:
    """The dense Kronecker matrix I (x) A - B^T (x) I (test scale only)."""
    a = as_matrix(a)
    b = as_matrix(b)
    return np.kron(np.eye(b.shape[0]), a) - np.kron(b.T, np.eye(a.shape[0]))
