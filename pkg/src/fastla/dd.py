"""Double-word (compensated) floating point arithmetic on numpy arrays.

A value is represented as an unevaluated sum hi + lo of two binary64
numbers with |lo| <= ulp(hi)/2, giving an effective mantissa of ~106 bits
(unit roundoff ~2^-105, comfortably below 4 * eps64^2).  All primitives
are error-free transformations (Dekker/Knuth); no FMA is assumed.

This is the "extended" precision of the scalar abstraction: twice the
working mantissa, realized on working-precision hardware.
"""

from __future__ import annotations

import numpy as np

# 2^27 + 1, exact in binary64; splits a double into two 26-bit halves.
_SPLITTER = 134217729.0

# Unit roundoff of a renormalized double-word value.
DD_EPS = 2.0 ** -105


def two_sum(a, b):
    """Error-free sum: returns (s, e) with s + e == a + b exactly."""
    s = a + b
    bb = s - a
    e = (a - (s - bb)) + (b - bb)
    return s, e


def quick_two_sum(a, b):
    """Error-free sum assuming |a| >= |b| elementwise."""
    s = a + b
    e = b - (s - a)
    return s, e


def _split(a):
    c = _SPLITTER * a
    big = c - a
    hi = c - big
    lo = a - hi
    return hi, lo


def two_prod(a, b):
    """Error-free product via Dekker splitting: p + e == a * b exactly.

    Exactness requires a * b and its rounding error to stay in the normal
    binary64 range (no underflow/overflow), the standard Dekker premise.
    """
    p = a * b
    ahi, alo = _split(a)
    bhi, blo = _split(b)
    e = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo
    return p, e


def _add(xh, xl, yh, yl):
    s, e = two_sum(xh, yh)
    t, f = two_sum(xl, yl)
    e = e + t
    s, e = quick_two_sum(s, e)
    e = e + f
    return quick_two_sum(s, e)


def _mul(xh, xl, yh, yl):
    p, e = two_prod(xh, yh)
    e = e + (xh * yl + xl * yh)
    return quick_two_sum(p, e)


class DD:
    """A dense array of double-word scalars.

    Supports the slicing, arithmetic and matmul operations the recursive
    algorithms need, so the same recursion body can run in working or
    extended precision.
    """

    __slots__ = ("hi", "lo")

    def __init__(self, hi, lo=None):
        hi = np.asarray(hi, dtype=np.float64)
        self.hi = hi
        self.lo = np.zeros_like(hi) if lo is None else np.asarray(lo, dtype=np.float64)

    @property
    def shape(self):
        return self.hi.shape

    @property
    def T(self):
        return DD(self.hi.T, self.lo.T)

    def copy(self):
        return DD(self.hi.copy(), self.lo.copy())

    def to_float64(self):
        """Round to working precision (the correctly rounded hi part)."""
        s, e = two_sum(self.hi, self.lo)
        return s

    def __getitem__(self, key):
        return DD(self.hi[key], self.lo[key])

    def __setitem__(self, key, value):
        value = _coerce(value)
        self.hi[key] = value.hi
        self.lo[key] = value.lo

    def __neg__(self):
        return DD(-self.hi, -self.lo)

    def __add__(self, other):
        other = _coerce(other)
        return DD(*_add(self.hi, self.lo, other.hi, other.lo))

    def __sub__(self, other):
        other = _coerce(other)
        return DD(*_add(self.hi, self.lo, -other.hi, -other.lo))

    def __mul__(self, other):
        other = _coerce(other)
        return DD(*_mul(self.hi, self.lo, other.hi, other.lo))

    def __truediv__(self, other):
        other = _coerce(other)
        # Two Newton-ish correction steps; relative error O(DD_EPS).
        q1 = self.hi / other.hi
        r = self - other * DD(q1)
        q2 = r.hi / other.hi
        r = r - other * DD(q2)
        q3 = r.hi / other.hi
        s, e = two_sum(q1, q2)
        s, e = quick_two_sum(s, e + q3)
        return DD(s, e)

    def __matmul__(self, other):
        other = _coerce(other)
        n, k = self.shape
        k2, m = other.shape
        if k != k2:
            raise ValueError("dd matmul dimension mismatch")
        ch = np.zeros((n, m))
        cl = np.zeros((n, m))
        for j in range(k):
            ph, pl = _mul(
                self.hi[:, j, None], self.lo[:, j, None],
                other.hi[None, j, :], other.lo[None, j, :],
            )
            ch, cl = _add(ch, cl, ph, pl)
        return DD(ch, cl)

    def abs_max(self):
        return float(np.max(np.abs(self.hi)))


def _coerce(x):
    if isinstance(x, DD):
        return x
    return DD(np.asarray(x, dtype=np.float64))


def matmul_f64(a, b):
    """Conventional product of two float64 matrices in extended precision.

    Every scalar multiply-add is carried in double-word arithmetic; the
    summation order is the conventional inner-product order.
    """
    return DD(a) @ DD(b)


def solve_upper(u, b, unit_diag=False):
    """Back substitution U x = b in extended precision (b may be a matrix)."""
    u = _coerce(u)
    b = _coerce(b)
    n = u.shape[0]
    rhs = b if b.hi.ndim == 2 else DD(b.hi[:, None], b.lo[:, None])
    m = rhs.shape[1]
    x = DD(np.zeros((n, m)))
    for i in range(n - 1, -1, -1):
        acc = rhs[i : i + 1, :]
        if i + 1 < n:
            acc = acc - u[i : i + 1, i + 1 :] @ x[i + 1 :, :]
        if not unit_diag:
            acc = acc / u[i, i]
        x[i : i + 1, :] = acc
    return x if b.hi.ndim == 2 else DD(x.hi[:, 0], x.lo[:, 0])


def solve_lower(l, b, unit_diag=False):
    """Forward substitution L x = b in extended precision."""
    l = _coerce(l)
    b = _coerce(b)
    n = l.shape[0]
    rhs = b if b.hi.ndim == 2 else DD(b.hi[:, None], b.lo[:, None])
    m = rhs.shape[1]
    x = DD(np.zeros((n, m)))
    for i in range(n):
        acc = rhs[i : i + 1, :]
        if i > 0:
            acc = acc - l[i : i + 1, :i] @ x[:i, :]
        if not unit_diag:
            acc = acc / l[i, i]
        x[i : i + 1, :] = acc
    return x if b.hi.ndim == 2 else DD(x.hi[:, 0], x.lo[:, 0])


def gepp(a):
    """LU with partial pivoting in extended precision: a[p] == L @ U."""
    a = _coerce(a).copy()
    n = a.shape[0]
    perm = np.arange(n)
    for k in range(n):
        piv = k + int(np.argmax(np.abs(a.hi[k:, k])))
        if piv != k:
            perm[[k, piv]] = perm[[piv, k]]
            a.hi[[k, piv], :] = a.hi[[piv, k], :]
            a.lo[[k, piv], :] = a.lo[[piv, k], :]
        if a.hi[k, k] == 0.0:
            raise ZeroDivisionError("exactly singular matrix in dd gepp")
        col = a[k + 1 :, k : k + 1] / a[k, k]
        a[k + 1 :, k : k + 1] = col
        a[k + 1 :, k + 1 :] = a[k + 1 :, k + 1 :] - col @ a[k : k + 1, k + 1 :]
    return perm, a


def solve(a, b):
    """Solve A x = b in extended precision via GEPP."""
    b = _coerce(b)
    perm, lu = gepp(a)
    rhs = b if b.hi.ndim == 2 else DD(b.hi[:, None], b.lo[:, None])
    rhs = rhs[perm, :]
    y = solve_lower(lu, rhs, unit_diag=True)
    x = solve_upper(lu, y)
    return x if b.hi.ndim == 2 else DD(x.hi[:, 0], x.lo[:, 0])


def inv_upper(u):
    """Substitution-based inverse of an upper triangular matrix."""
    u = _coerce(u)
    n = u.shape[0]
    return solve_upper(u, DD(np.eye(n)))


def cholesky(h):
    """Extended-precision Cholesky factor: H = L L^T."""
    h = _coerce(h).copy()
    n = h.shape[0]
    l = DD(np.zeros((n, n)))
    for j in range(n):
        acc = h[j, j]
        if j > 0:
            s = l[j : j + 1, :j] @ l[j : j + 1, :j].T
            acc = acc - DD(s.hi[0, 0], s.lo[0, 0])
        if acc.hi <= 0.0:
            raise ZeroDivisionError("matrix not positive definite in dd cholesky")
        # sqrt via one Newton step on the double estimate
        r0 = np.sqrt(acc.hi)
        r = DD(r0)
        r = (r + acc / r) * DD(0.5)
        r = (r + acc / r) * DD(0.5)
        l[j, j] = r
        if j + 1 < n:
            rest = h[j + 1 :, j : j + 1]
            if j > 0:
                rest = rest - l[j + 1 :, :j] @ l[j : j + 1, :j].T
            l[j + 1 :, j : j + 1] = rest / r
    return l


def spd_inv(h):
    """Extended-precision inverse of an SPD matrix via Cholesky."""
    l = cholesky(h)
    n = l.shape[0]
    y = solve_lower(l, DD(np.eye(n)))
    return solve_upper(l.T, y)


def inv(a):
    """Extended-precision inverse via GEPP column solves."""
    a = _coerce(a)
    return solve(a, DD(np.eye(a.shape[0])))
