"""Logarithmically stable recursive inversion.

Triangular inversion uses the 2x2 block formula with the off-diagonal
product parenthesized as (T11^-1 T12) T22^-1; SPD inversion follows the
divide-and-conquer Schur-complement pseudocode; general inversion reduces
to the SPD case through A^-1 = A^T (A A^T)^-1.

These recursions are forward stable only up to a condition-number power
that grows with log2(n); running them in extended (double-word) precision
recovers backward-stable-grade accuracy at working precision.  The same
recursion body runs in either precision, switching between engine products
on float64 arrays and double-word products on DD arrays.

``predicted_bound`` in the report evaluates the error recurrences with the
measured condition number and the engine's measured error-model constant,
clamped at 1 (a bound of 1 means no accuracy is promised).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import dd
from .baseline import SingularMatrixError
from .core import EPS, EXTENDED, TWO, WORKING, DimensionError, RngStream, as_matrix, norm
from .matmul import CONVENTIONAL, MmEngine, measure_mm_error, multiply

# Calibration constants multiplying the paper-recurrence bounds; the
# recurrences are worst case, so modest constants dominate measured errors.
TRI_BOUND_CONST = 100.0
SPD_BOUND_CONST = 100.0

_SYMMETRY_TOL = 1e-12

_mu_cache: dict = {}


class NotPositiveDefiniteError(ValueError):
    """SPD inversion hit a nonpositive 1x1 pivot or non-finite Schur complement."""


class AsymmetricMatrixError(ValueError):
    """Input to spd_inv is not symmetric within tolerance."""


@dataclass
class InvReport:
    residual_left: float
    residual_right: float
    kappa: float
    precision_used: str
    predicted_bound: float


def engine_mu_constant(engine: MmEngine, n: int = 32) -> float:
    """Measured error-model constant of the engine (cached, fixed seed)."""
    key = (engine.kind, engine.cutoff, n)
    if key not in _mu_cache:
        model = measure_mm_error(max(4, min(n, 32)), engine, trials=2, rng=RngStream(0xF457))
        _mu_cache[key] = max(1.0, model.observed_constant)
    return _mu_cache[key]


def predicted_tri_bound(kappa: float, n: int, mu_const: float) -> float:
    """Relative forward-error bound from the triangular-inversion recurrence."""
    if n <= 1:
        return min(1.0, TRI_BOUND_CONST * EPS * kappa)
    growth = (2.0 * (kappa + 1.0)) ** math.log2(n)
    return min(1.0, TRI_BOUND_CONST * mu_const * EPS * kappa * growth)


def predicted_spd_bound(kappa: float, n: int, mu_const: float) -> float:
    """Relative forward-error bound from the SPD-inversion recurrence."""
    if n <= 1:
        return min(1.0, SPD_BOUND_CONST * EPS * kappa)
    # Work in log10: the kappa^(4 + 4 log2 n) factor overflows floats fast.
    log_b = math.log10(SPD_BOUND_CONST * mu_const * EPS)
    log_b += math.log2(10.0) * math.log10(n)  # the n^{log2 10} factor
    log_b += (4.0 + 4.0 * math.log2(n)) * math.log10(kappa)
    return 1.0 if log_b >= 0.0 else 10.0 ** log_b


def _report(a, x, precision, predicted) -> InvReport:
    n = a.shape[0]
    eye = np.eye(n)
    return InvReport(
        residual_left=float(np.linalg.norm(x @ a - eye)),
        residual_right=float(np.linalg.norm(a @ x - eye)),
        kappa=max(1.0, norm(a, TWO) * norm(x, TWO)),
        precision_used=precision,
        predicted_bound=predicted,
    )


# ---------------------------------------------------------------------------
# Triangular inversion


def tri_inv(t, engine: MmEngine = CONVENTIONAL, precision: str = WORKING,
            counter=None, with_report: bool = True):
    """Invert an upper triangular matrix recursively.

    Returns (X, InvReport).  With ``precision="extended"`` the whole
    recursion runs in double-word arithmetic and the result is rounded to
    working precision at the end.
    """
    t = as_matrix(t)
    n = t.shape[0]
    if t.shape[1] != n:
        raise DimensionError("tri_inv requires a square matrix")
    if np.any(np.diag(t) == 0.0):
        raise SingularMatrixError("zero diagonal entry in triangular matrix")
    if precision == EXTENDED:
        x = _tri_inv_rec_dd(dd.DD(t), counter).to_float64()
    else:
        x = _tri_inv_rec(t, engine, counter)
    if not with_report:
        return x, None
    kappa = max(1.0, norm(t, TWO) * norm(x, TWO))
    bound = predicted_tri_bound(kappa, n, engine_mu_constant(engine))
    return x, _report(t, x, precision, bound)


def _tri_inv_rec(t, engine, counter):
    n = t.shape[0]
    if n == 1:
        if counter is not None:
            counter.count(mults=1)
        return np.array([[1.0 / t[0, 0]]])
    s = n // 2
    x11 = _tri_inv_rec(t[:s, :s], engine, counter)
    x22 = _tri_inv_rec(t[s:, s:], engine, counter)
    m = multiply(multiply(x11, t[:s, s:], engine, counter), x22, engine, counter)
    x = np.zeros((n, n))
    x[:s, :s] = x11
    x[s:, s:] = x22
    x[:s, s:] = -m
    return x


def _tri_inv_rec_dd(t, counter):
    n = t.shape[0]
    if n == 1:
        return dd.DD(np.ones((1, 1))) / t
    s = n // 2
    x11 = _tri_inv_rec_dd(t[:s, :s], counter)
    x22 = _tri_inv_rec_dd(t[s:, s:], counter)
    m = (x11 @ t[:s, s:]) @ x22
    x = dd.DD(np.zeros((n, n)))
    x[:s, :s] = x11
    x[s:, s:] = x22
    x[:s, s:] = -m
    return x


# ---------------------------------------------------------------------------
# SPD inversion


def spd_inv(h, engine: MmEngine = CONVENTIONAL, precision: str = WORKING,
            counter=None, with_report: bool = True):
    """Invert a symmetric positive definite matrix recursively.

    Follows the Schur-complement pseudocode (Ai, AiB, BAiB, S, Si, AiBSi,
    AiBSiBAi); positive definiteness is detected lazily at the 1x1 base
    case.  The output is symmetrized, since the exact-arithmetic symmetry
    of the formula is lost to roundoff.
    """
    h = as_matrix(h)
    n = h.shape[0]
    if h.shape[1] != n:
        raise DimensionError("spd_inv requires a square matrix")
    nh = norm(h)
    if float(np.linalg.norm(h - h.T)) > _SYMMETRY_TOL * max(nh, 1e-300):
        raise AsymmetricMatrixError("matrix is not symmetric within 1e-12 relative")
    if precision == EXTENDED:
        xd = _spd_inv_rec_dd(dd.DD(h), counter)
        x = xd.to_float64()
    else:
        x = _spd_inv_rec(h, engine, counter)
    x = 0.5 * (x + x.T)
    if not with_report:
        return x, None
    kappa = max(1.0, norm(h, TWO) * norm(x, TWO))
    bound = predicted_spd_bound(kappa, n, engine_mu_constant(engine))
    return x, _report(h, x, precision, bound)


def _spd_inv_rec(h, engine, counter):
    n = h.shape[0]
    if n == 1:
        if h[0, 0] <= 0.0:
            raise NotPositiveDefiniteError("nonpositive pivot in spd_inv")
        if counter is not None:
            counter.count(mults=1)
        return np.array([[1.0 / h[0, 0]]])
    s = n // 2
    a = h[:s, :s]
    b = h[:s, s:]
    c = h[s:, s:]
    ai = _spd_inv_rec(a, engine, counter)
    aib = multiply(ai, b, engine, counter)
    baib = multiply(np.ascontiguousarray(b.T), aib, engine, counter)
    sc = c - baib
    if counter is not None:
        counter.count(adds=sc.size)
    if not np.all(np.isfinite(sc)):
        raise NotPositiveDefiniteError("non-finite Schur complement in spd_inv")
    si = _spd_inv_rec(sc, engine, counter)
    aibsi = multiply(aib, si, engine, counter)
    aibsibai = multiply(aibsi, np.ascontiguousarray(aib.T), engine, counter)
    hi11 = ai + aibsibai
    if counter is not None:
        counter.count(adds=hi11.size)
    x = np.zeros((n, n))
    x[:s, :s] = hi11
    x[:s, s:] = -aibsi
    x[s:, :s] = -aibsi.T
    x[s:, s:] = si
    return x


def _spd_inv_rec_dd(h, counter):
    n = h.shape[0]
    if n == 1:
        if h.hi[0, 0] <= 0.0:
            raise NotPositiveDefiniteError("nonpositive pivot in spd_inv")
        return dd.DD(np.ones((1, 1))) / h
    s = n // 2
    a = h[:s, :s]
    b = h[:s, s:]
    c = h[s:, s:]
    ai = _spd_inv_rec_dd(a, counter)
    aib = ai @ b
    baib = b.T @ aib
    sc = c - baib
    if not np.all(np.isfinite(sc.hi)):
        raise NotPositiveDefiniteError("non-finite Schur complement in spd_inv")
    si = _spd_inv_rec_dd(sc, counter)
    aibsi = aib @ si
    aibsibai = aibsi @ aib.T
    hi11 = ai + aibsibai
    x = dd.DD(np.zeros((n, n)))
    x[:s, :s] = hi11
    x[:s, s:] = -aibsi
    x[s:, :s] = (-aibsi).T
    x[s:, s:] = si
    return x


# ---------------------------------------------------------------------------
# General inversion via the normal-equations trick


def gen_inv(a, engine: MmEngine = CONVENTIONAL, precision: str = WORKING,
            counter=None, with_report: bool = True):
    """Invert a general square matrix via A^-1 = A^T (A A^T)^-1.

    Forming A A^T squares the condition number; in extended precision the
    Gram matrix, the SPD inversion and the final product are all carried
    in double-word arithmetic.
    """
    a = as_matrix(a)
    n = a.shape[0]
    if a.shape[1] != n:
        raise DimensionError("gen_inv requires a square matrix")
    at = np.ascontiguousarray(a.T)
    if precision == EXTENDED:
        add = dd.DD(a)
        m = add @ add.T
        mi = _spd_inv_rec_dd(m, counter)
        x = (add.T @ mi).to_float64()
    else:
        m = multiply(a, at, engine, counter)
        m = 0.5 * (m + m.T)
        mi = _spd_inv_rec(m, engine, counter)
        mi = 0.5 * (mi + mi.T)
        x = multiply(at, mi, engine, counter)
    if not with_report:
        return x, None
    kappa_a = max(1.0, norm(a, TWO) * norm(x, TWO))
    bound = predicted_spd_bound(kappa_a ** 2, n, engine_mu_constant(engine))
    return x, _report(a, x, precision, bound)


def solve_via_inverse(a, b, engine: MmEngine = CONVENTIONAL, precision: str = WORKING,
                      counter=None):
    """Solve A x = b as x = A^T ((A A^T)^-1 b)."""
    a = as_matrix(a)
    b = np.asarray(b, dtype=np.float64)
    rhs = b[:, None] if b.ndim == 1 else b
    if precision == EXTENDED:
        add = dd.DD(a)
        m = add @ add.T
        mi = _spd_inv_rec_dd(m, counter)
        x = (add.T @ (mi @ dd.DD(rhs))).to_float64()
    else:
        m = multiply(a, np.ascontiguousarray(a.T), engine, counter)
        m = 0.5 * (m + m.T)
        mi = _spd_inv_rec(m, engine, counter)
        t = multiply(mi, rhs, engine, counter)
        x = multiply(np.ascontiguousarray(a.T), t, engine, counter)
    return x[:, 0] if b.ndim == 1 else x


def theorem1_embedding(a, b, inverter=None):
    """Extract A @ B from the inverse of [[I, A, 0], [0, I, B], [0, 0, I]].

    A and B are scaled to unit Frobenius norm first so the block matrix is
    very well conditioned; the (1,3) block of the inverse is A B (up to
    sign and the scales).
    """
    a = as_matrix(a)
    b = as_matrix(b)
    p, q = a.shape
    q2, r = b.shape
    if q != q2:
        raise DimensionError("theorem1_embedding: a.cols must equal b.rows")
    sa = norm(a) or 1.0
    sb = norm(b) or 1.0
    m = np.eye(p + q + r)
    m[:p, p : p + q] = a / sa
    m[p : p + q, p + q :] = b / sb
    if inverter is None:
        inverter = lambda t: tri_inv(t, with_report=False)[0]
    minv = inverter(m)
    return minv[:p, p + q :] * (sa * sb)
