"""Spectral divide-and-conquer: Schur form, symmetric eigenproblem, SVD,
and eigenvector assembly.

One split works like this: a Moebius transform maps the chosen dividing
line (or circle) to the imaginary axis, the Newton iteration
A_{i+1} = (A_i + A_i^-1)/2 drives the transformed matrix to its sign,
P+ = (sign + I)/2 is the spectral projector, and a randomized
rank-revealing factorization of P+ yields an orthogonal Q whose leading
columns span the invariant subspace.  The split dimension r is chosen by
minimizing the entrywise-sum norm of the below-block of Q^T A Q over all
r in O(n^2) (ColSum/RowSum recurrences); a split is accepted only when
that norm is below the backward-error budget, retrying with a fresh
random factorization a few times and subdividing the region after that.

Real arithmetic throughout: dividing lines are vertical, circles are
centered on the real axis, and complex conjugate pairs terminate as 2x2
quasi-triangular bumps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import dd
from .baseline import SingularMatrixError, solve_unit_lower
from .core import (EPS, ENTRYWISE_SUM, FROBENIUS, DimensionError, RngStream,
                   as_matrix, norm)
from .inverse import gen_inv
from .lu import lur
from .matmul import CONVENTIONAL, MmEngine, multiply
from .qr import solve_upper_triangular
from .rurv import rurv
from .sylvester import block_boundaries, sep_estimate, sylr

DEFAULT_MAX_ATTEMPTS = 3
DEFAULT_SIGN_ITERS = 40
DEFAULT_LINE_BUDGET = 7
EVEC_EXPONENT = 3.0  # calibrated c' in the eigenvector error bound


class SignDivergenceError(RuntimeError):
    """The sign iteration failed to converge (eigenvalues on the split curve)."""


class SplitFailureError(RuntimeError):
    """No acceptable split was found for a diagonal block."""


@dataclass
class SignIterConfig:
    max_iters: int = 100
    conv_tol: float = math.sqrt(EPS)
    scaling: str = "none"  # or "determinantal"

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.conv_tol <= 0.0:
            raise ValueError("conv_tol must be > 0")
        if self.scaling not in ("none", "determinantal"):
            raise ValueError(f"unknown scaling {self.scaling!r}")


@dataclass(frozen=True)
class Moebius:
    alpha: float
    beta: float
    gamma: float
    delta: float

    def __post_init__(self):
        if self.alpha * self.delta - self.beta * self.gamma == 0.0:
            raise ValueError("degenerate Moebius transform")


@dataclass(frozen=True)
class SplitRegion:
    """A spectrum-dividing region: everything maps to a half-plane split.

    * half-plane: eigenvalues with Re > x land on the +1 side;
    * disk(center, radius) on the real axis: the exterior lands on +1.
    """

    kind: str
    x: float = 0.0
    center: float = 0.0
    radius: float = 0.0

    @staticmethod
    def half_plane(x: float) -> "SplitRegion":
        return SplitRegion(kind="half-plane", x=float(x))

    @staticmethod
    def disk(center: float, radius: float) -> "SplitRegion":
        if radius <= 0.0:
            raise ValueError("disk radius must be positive")
        return SplitRegion(kind="disk", center=float(center), radius=float(radius))

    def moebius(self) -> Moebius:
        if self.kind == "half-plane":
            return Moebius(1.0, -self.x, 0.0, 1.0)
        if self.kind == "disk":
            return Moebius(1.0, -(self.center + self.radius),
                           1.0, -(self.center - self.radius))
        raise ValueError(f"unknown region kind {self.kind!r}")


@dataclass
class SplitOutcome:
    accepted: bool
    q: np.ndarray | None = None
    r: int = 0
    ahat: np.ndarray | None = None
    norm_a21: float = float("inf")
    attempts: int = 0


@dataclass
class SchurResult:
    q: np.ndarray
    t: np.ndarray
    tree: list
    flags: list = field(default_factory=list)

    @property
    def n_splits(self) -> int:
        return sum(1 for node in self.tree if node.get("kind") == "split")


@dataclass
class EigError:
    s_floor: float
    predicted_evec_bound: float
    sep_methods: list = field(default_factory=list)


def default_split_tol(n: int) -> float:
    return 1e3 * n * EPS


# ---------------------------------------------------------------------------
# Matrix sign function


def sign_function(a, cfg: SignIterConfig | None = None,
                  engine: MmEngine = CONVENTIONAL, inverter: str = "lu",
                  counter=None) -> np.ndarray:
    """Newton iteration for sign(A); requires no eigenvalue on the imaginary axis."""
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionError("sign_function requires a square matrix")
    cfg = cfg or SignIterConfig()
    if cfg.scaling == "determinantal" and inverter != "lu":
        raise ValueError("determinantal scaling needs the lu inverter")
    x = a.copy()
    n = a.shape[0]
    for _ in range(cfg.max_iters):
        try:
            if inverter == "lu":
                xi, logdet = _inv_and_logdet(x, engine, counter)
            elif inverter == "gen":
                xi = gen_inv(x, engine, counter=counter, with_report=False)[0]
                logdet = 0.0
            else:
                xi = inverter(x)
                logdet = 0.0
        except (SingularMatrixError, ZeroDivisionError) as exc:
            raise SignDivergenceError("singular iterate in sign iteration") from exc
        if cfg.scaling == "determinantal":
            s = math.exp(-logdet / n)
            new = 0.5 * (s * x + xi / s)
        else:
            new = 0.5 * (x + xi)
        if counter is not None:
            counter.count(mults=new.size, adds=new.size)
        if not np.all(np.isfinite(new)):
            raise SignDivergenceError("non-finite sign iterate")
        step = norm(new - x, "one")
        ref = norm(x, "one")
        x = new
        if ref > 0.0 and step <= cfg.conv_tol * ref:
            return x
    raise SignDivergenceError(f"no convergence in {cfg.max_iters} sign iterations")


def _inv_and_logdet(x, engine, counter):
    res = lur(x, engine, counter, with_report=False)
    diag = np.diag(res.u)
    if res.zero_pivot or np.any(diag == 0.0):
        raise SingularMatrixError("singular matrix in sign iteration")
    n = x.shape[0]
    eye = np.eye(n)
    y = solve_unit_lower(res.l, eye[res.p], counter)
    xi = solve_upper_triangular(res.u, y, counter)
    return xi, float(np.sum(np.log(np.abs(diag))))


def moebius_apply(a, region: SplitRegion, engine: MmEngine = CONVENTIONAL, counter=None):
    """(alpha A + beta I)(gamma A + delta I)^-1 for the region's transform."""
    a = as_matrix(a)
    m = region.moebius()
    n = a.shape[0]
    num = m.alpha * a + m.beta * np.eye(n)
    if m.gamma == 0.0:
        return num / m.delta
    den = m.gamma * a + m.delta * np.eye(n)
    res = lur(np.ascontiguousarray(den.T), engine, counter, with_report=False)
    if res.zero_pivot or np.any(np.diag(res.u) == 0.0):
        raise SignDivergenceError("singular Moebius denominator")
    # X = num den^-1 from den^T X^T = num^T.
    y = solve_unit_lower(res.l, np.ascontiguousarray(num.T)[res.p], counter)
    xt = solve_upper_triangular(res.u, y, counter)
    return np.ascontiguousarray(xt.T)


# ---------------------------------------------------------------------------
# One spectral split


def norm_a21_profile(ahat) -> np.ndarray:
    """NormA21(r) = ||ahat(r+1:n, 1:r)||_S for r = 1..n-1, via the
    ColSum/RowSum recurrence (exact, O(n^2))."""
    ahat = as_matrix(ahat)
    n = ahat.shape[0]
    if n < 2:
        return np.zeros(0)
    ab = np.abs(ahat)
    col = np.array([np.sum(ab[i + 1 :, i]) for i in range(n - 1)])
    row = np.array([np.sum(ab[i, :i]) for i in range(1, n)])
    out = np.empty(n - 1)
    out[0] = col[0]
    for i in range(1, n - 1):
        out[i] = out[i - 1] + col[i] - row[i - 1]
    return out


def split_once(a, region: SplitRegion, engine: MmEngine = CONVENTIONAL,
               rng: RngStream | None = None, max_attempts: int = DEFAULT_MAX_ATTEMPTS,
               sign_cfg: SignIterConfig | None = None, split_tol: float | None = None,
               inverter: str = "lu", counter=None, symmetric: bool = False) -> SplitOutcome:
    """Attempt one spectral split of ``a`` along ``region``."""
    a = as_matrix(a)
    n = a.shape[0]
    rng = rng or RngStream(0)
    tol = split_tol if split_tol is not None else default_split_tol(n)
    cfg = sign_cfg or SignIterConfig(max_iters=DEFAULT_SIGN_ITERS)
    try:
        am = moebius_apply(a, region, engine, counter)
        if symmetric:
            am = 0.5 * (am + am.T)
        s = sign_function(am, cfg, engine, inverter, counter)
    except SignDivergenceError:
        return SplitOutcome(accepted=False, attempts=0)
    p_plus = 0.5 * (s + np.eye(n))
    if symmetric:
        p_plus = 0.5 * (p_plus + p_plus.T)
    scale = norm(a, ENTRYWISE_SUM)
    best = SplitOutcome(accepted=False)
    for attempt in range(max_attempts):
        res = rurv(p_plus, engine, rng.split(attempt), with_report=False)
        q = res.u.explicit_q(engine, counter)
        ahat = multiply(multiply(np.ascontiguousarray(q.T), a, engine, counter),
                        q, engine, counter)
        profile = norm_a21_profile(ahat)
        r = int(np.argmin(profile)) + 1
        val = float(profile[r - 1])
        if val < best.norm_a21:
            best = SplitOutcome(accepted=False, q=q, r=r, ahat=ahat,
                                norm_a21=val, attempts=attempt + 1)
        if val <= tol * scale:
            best.accepted = True
            best.attempts = attempt + 1
            return best
    best.attempts = max_attempts
    return best


# ---------------------------------------------------------------------------
# Gershgorin bounds


def gershgorin_rectangle(a):
    """Bounding box of the Gershgorin disks: (re_lo, re_hi), (im_lo, im_hi)."""
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionError("gershgorin_rectangle requires a square matrix")
    centers = np.diag(a)
    radii = np.sum(np.abs(a), axis=1) - np.abs(centers)
    re_lo = float(np.min(centers - radii))
    re_hi = float(np.max(centers + radii))
    im = float(np.max(radii)) if radii.size else 0.0
    return (re_lo, re_hi), (-im, im)


def _candidate_lines(lo: float, hi: float, min_width: float, budget: int, diag=None):
    """Dividing-line candidates inside [lo, hi].

    Starts with midpoints between sorted diagonal entries (which track the
    eigenvalue real parts of a compressed block much better than the raw
    Gershgorin box), then falls back to breadth-first bisection midpoints
    of the interval.
    """
    out = []

    def push(x):
        if lo < x < hi and all(abs(x - y) > max(min_width, 1e-300) for y in out):
            out.append(x)

    if diag is not None and len(diag) > 1:
        arr = np.asarray(diag, dtype=np.float64)
        # The trace mean is the exact mean of the eigenvalue real parts and
        # frequently lands inside a spectral gap.
        push(float(np.mean(arr)))
        centers = np.sort(arr)
        mids = 0.5 * (centers[:-1] + centers[1:])
        order = np.argsort(np.abs(np.arange(len(mids)) - (len(mids) - 1) / 2.0))
        for idx in order:
            push(float(mids[idx]))
    queue = [(lo, hi)]
    while queue and len(out) < budget:
        a, b = queue.pop(0)
        if b - a <= min_width:
            continue
        push(0.5 * (a + b))
        queue.append((a, 0.5 * (a + b)))
        queue.append((0.5 * (a + b), b))
    return out[:budget]


# ---------------------------------------------------------------------------
# Schur divide-and-conquer driver


def schur_dandc(a, engine: MmEngine = CONVENTIONAL, rng: RngStream | None = None,
                split_tol: float | None = None, max_attempts: int = DEFAULT_MAX_ATTEMPTS,
                sign_cfg: SignIterConfig | None = None, symmetric: bool = False,
                line_budget: int = DEFAULT_LINE_BUDGET, inverter: str = "lu",
                use_disks: bool = False, counter=None) -> SchurResult:
    """Block Schur factorization A = Q T Q^T by recursive spectral splitting.

    Regions are vertical bisectors of the block's Gershgorin rectangle,
    subdivided when a split is rejected; blocks whose region shrinks below
    sqrt(eps) * ||A|| without an accepted split are flagged as clusters and
    left unsplit.  Recursion bottoms out at 1x1 blocks and 2x2 blocks
    (triangularized when the eigenvalues are real, kept as bumps for
    complex pairs).
    """
    a = as_matrix(a)
    n = a.shape[0]
    if a.shape[1] != n:
        raise DimensionError("schur_dandc requires a square matrix")
    rng = rng or RngStream(0)
    t = a.copy()
    if symmetric:
        t = 0.5 * (t + t.T)
    q = np.eye(n)
    tree: list = []
    flags: list = []
    scale = max(norm(a, FROBENIUS), 1e-300)
    min_width = math.sqrt(EPS) * scale
    node_counter = [0]

    def process(lo: int, hi: int):
        size = hi - lo
        if size == 1:
            return
        if size == 2:
            kind = _finalize_2x2(t, q, lo)
            tree.append({"kind": kind, "lo": lo, "hi": hi})
            return
        block = t[lo:hi, lo:hi].copy()
        (re_lo, re_hi), (im_lo, im_hi) = gershgorin_rectangle(block)
        regions = [SplitRegion.half_plane(x)
                   for x in _candidate_lines(re_lo, re_hi, min_width, line_budget,
                                             diag=np.diag(block))]
        if use_disks and not symmetric and im_hi > 0.0:
            # Circles centered on the real axis separate complex pairs from
            # real eigenvalues even when the real parts coincide.
            cx = float(np.mean(np.diag(block)))
            extent = max(im_hi, 0.5 * (re_hi - re_lo))
            for frac in (0.5, 0.25, 0.75, 1.0):
                radius = frac * extent
                if radius > min_width:
                    regions.append(SplitRegion.disk(cx, radius))
        outcome = None
        line = None
        for region in regions:
            node_counter[0] += 1
            cand = split_once(block, region, engine,
                              rng.split(node_counter[0]), max_attempts,
                              sign_cfg, split_tol, inverter, counter, symmetric)
            if cand.accepted and 0 < cand.r < size:
                outcome = cand
                line = region.x if region.kind == "half-plane" else (region.center, region.radius)
                break
        if outcome is None:
            tree.append({"kind": "cluster", "lo": lo, "hi": hi})
            flags.append(f"cluster:{lo}:{hi}")
            return
        r = outcome.r
        ahat = outcome.ahat
        ahat[r:, :r] = 0.0
        if symmetric:
            ahat[:r, r:] = 0.0
            ahat[:r, :r] = 0.5 * (ahat[:r, :r] + ahat[:r, :r].T)
            ahat[r:, r:] = 0.5 * (ahat[r:, r:] + ahat[r:, r:].T)
        qbar = outcome.q
        t[lo:hi, lo:hi] = ahat
        if lo > 0:
            t[:lo, lo:hi] = multiply(t[:lo, lo:hi], qbar, engine, counter)
        if hi < n:
            t[lo:hi, hi:] = multiply(np.ascontiguousarray(qbar.T), t[lo:hi, hi:],
                                     engine, counter)
        q[:, lo:hi] = multiply(q[:, lo:hi], qbar, engine, counter)
        tree.append({
            "kind": "split", "lo": lo, "hi": hi, "line": line, "r": r,
            "norm_a21": outcome.norm_a21, "attempts": outcome.attempts,
        })
        process(lo, lo + r)
        process(lo + r, hi)

    process(0, n)
    return SchurResult(q=q, t=t, tree=tree, flags=flags)


def _finalize_2x2(t, q, lo):
    """Triangularize a trailing 2x2 block when its eigenvalues are real."""
    b = t[lo : lo + 2, lo : lo + 2]
    if b[1, 0] == 0.0:
        return "leaf"
    tr = b[0, 0] + b[1, 1]
    disc = (b[0, 0] - b[1, 1]) ** 2 + 4.0 * b[0, 1] * b[1, 0]
    if disc < 0.0:
        return "bump"
    root = math.sqrt(disc)
    lam = 0.5 * (tr + root) if tr >= 0.0 else 0.5 * (tr - root)
    if lam == 0.0:
        lam = 0.5 * (tr + root)
    v1 = np.array([b[0, 1], lam - b[0, 0]])
    v2 = np.array([lam - b[1, 1], b[1, 0]])
    v = v1 if np.linalg.norm(v1) >= np.linalg.norm(v2) else v2
    nv = np.linalg.norm(v)
    if nv == 0.0:
        return "leaf"
    c, s = v[0] / nv, v[1] / nv
    g = np.array([[c, -s], [s, c]])
    n = t.shape[0]
    t[lo : lo + 2, :] = g.T @ t[lo : lo + 2, :]
    t[:, lo : lo + 2] = t[:, lo : lo + 2] @ g
    q[:, lo : lo + 2] = q[:, lo : lo + 2] @ g
    t[lo + 1, lo] = 0.0
    return "leaf"


# ---------------------------------------------------------------------------
# Symmetric eigenproblem and SVD


def symmetric_eig(a, engine: MmEngine = CONVENTIONAL, rng: RngStream | None = None,
                  split_tol: float | None = None, counter=None):
    """Eigendecomposition of a symmetric matrix: A = Q diag(lam) Q^T.

    A specialization of the Schur driver with every compressed block
    re-symmetrized; eigenvalues are returned in descending order.
    """
    a = as_matrix(a)
    n = a.shape[0]
    na = norm(a, FROBENIUS)
    if float(np.linalg.norm(a - a.T)) > 1e-12 * max(na, 1e-300):
        raise DimensionError("symmetric_eig requires a symmetric matrix")
    res = schur_dandc(a, engine, rng, split_tol, symmetric=True, counter=counter)
    lam = np.diag(res.t).copy()
    order = np.argsort(-lam)
    return res.q[:, order], lam[order]


def svd_via_gram(a, engine: MmEngine = CONVENTIONAL, rng: RngStream | None = None,
                 split_tol: float | None = None, counter=None):
    """SVD of a square matrix through its Gram matrices: A = U diag(s) V^T.

    Orthogonal bases for matched left/right singular subspaces come from
    spectral splits of A A^T and A^T A (formed in extended precision);
    each compressed Q_L^T A Q_R must be close enough to block diagonal,
    at the block size minimizing both off-diagonal sums, to be accepted.
    Blocks whose Gram spectrum has no resolvable gap are near-isometries
    and finish directly (flagged as sigma clusters).
    """
    a = as_matrix(a)
    n = a.shape[0]
    if a.shape[1] != n:
        raise DimensionError("svd_via_gram requires a square matrix")
    rng = rng or RngStream(0)
    u = np.eye(n)
    v = np.eye(n)
    m = a.copy()
    flags: list = []
    node_counter = [0]
    tol = split_tol if split_tol is not None else default_split_tol(n)

    def gram(block, left: bool):
        b = dd.DD(block)
        g = (b @ b.T) if left else (b.T @ b)
        out = g.to_float64()
        return 0.5 * (out + out.T)

    def process(lo: int, hi: int):
        size = hi - lo
        block = m[lo:hi, lo:hi]
        if size == 1:
            if block[0, 0] < 0.0:
                u[:, lo] = -u[:, lo]
                m[lo, lo] = -block[0, 0]
            return
        gl = gram(block, left=True)
        gr = gram(block, left=False)
        (g_lo, g_hi), _ = gershgorin_rectangle(gl)
        g_lo = max(g_lo, 0.0)
        scale_s = norm(block, ENTRYWISE_SUM)
        width = g_hi - g_lo
        if width <= max(tol * g_hi, 0.0) or width <= 0.0:
            _finish_isometry(lo, hi)
            return
        done = False
        for thr in _candidate_lines(g_lo, g_hi, tol * g_hi, DEFAULT_LINE_BUDGET,
                                    diag=np.diag(gl)):
            node_counter[0] += 1
            sub = rng.split(node_counter[0])
            out_l = split_once(gl, SplitRegion.half_plane(thr), engine, sub.split(0),
                               symmetric=True, counter=counter)
            out_r = split_once(gr, SplitRegion.half_plane(thr), engine, sub.split(1),
                               symmetric=True, counter=counter)
            if not (out_l.accepted and out_r.accepted):
                continue
            ql, qr = out_l.q, out_r.q
            comp = multiply(multiply(np.ascontiguousarray(ql.T), block, engine, counter),
                            qr, engine, counter)
            lower = norm_a21_profile(comp)
            upper = norm_a21_profile(np.ascontiguousarray(comp.T))
            profile = lower + upper
            r = int(np.argmin(profile)) + 1
            if profile[r - 1] > tol * scale_s:
                continue
            comp[r:, :r] = 0.0
            comp[:r, r:] = 0.0
            m[lo:hi, lo:hi] = comp
            u[:, lo:hi] = multiply(u[:, lo:hi], ql, engine, counter)
            v[:, lo:hi] = multiply(v[:, lo:hi], qr, engine, counter)
            process(lo, lo + r)
            process(lo + r, hi)
            done = True
            break
        if not done:
            _finish_isometry(lo, hi)
            flags.append(f"sigma-cluster:{lo}:{hi}")

    def _finish_isometry(lo: int, hi: int):
        block = m[lo:hi, lo:hi]
        size = hi - lo
        sigma0 = norm(block, FROBENIUS) / math.sqrt(size)
        if sigma0 == 0.0:
            m[lo:hi, lo:hi] = 0.0
            return
        u[:, lo:hi] = multiply(u[:, lo:hi], block / sigma0, engine, counter)
        m[lo:hi, lo:hi] = sigma0 * np.eye(size)

    process(0, n)
    sigma = np.diag(m).copy()
    order = np.argsort(-sigma)
    return u[:, order], sigma[order], v[:, order], flags


# ---------------------------------------------------------------------------
# Eigenvectors from quasi-triangular form


def evecr(t, engine: MmEngine = CONVENTIONAL, counter=None):
    """Eigenvector matrix of a quasi-triangular T by divide-and-conquer.

    Each split solves the Sylvester equation A R - R B = -C for the
    off-diagonal coupling, recurses on the diagonal halves, and assembles
    V = [[V_A, R V_B], [0, V_B]] with the fresh columns normalized.  A 2x2
    bump is atomic: its complex eigenvector pair is represented by the
    real/imaginary basis of the bump's invariant coordinate plane (the
    identity on those two columns).

    Returns (V, EigError) where the error object carries the sep floor
    over all splits and the common eigenvector error bound.
    """
    t = as_matrix(t)
    n = t.shape[0]
    if t.shape[1] != n:
        raise DimensionError("evecr requires a square matrix")
    bounds = block_boundaries(t)
    seps: list = []
    methods: list = []

    def rec(bi_lo: int, bi_hi: int) -> np.ndarray:
        nblocks = bi_hi - bi_lo
        lo, hi = bounds[bi_lo], bounds[bi_hi]
        size = hi - lo
        if nblocks == 1:
            return np.eye(size)
        mid_idx = bi_lo + nblocks // 2
        mid = bounds[mid_idx]
        a_blk = t[lo:mid, lo:mid]
        b_blk = t[mid:hi, mid:hi]
        c_blk = t[lo:mid, mid:hi]
        ab = [x - lo for x in bounds[bi_lo : mid_idx + 1]]
        bb = [x - mid for x in bounds[mid_idx : bi_hi + 1]]
        r, _ = sylr(a_blk, b_blk, c_blk, engine, counter, ab, bb, with_report=False)
        est = sep_estimate(a_blk, b_blk, ab, bb)
        seps.append(est.value)
        methods.append(est.method)
        va = rec(bi_lo, mid_idx)
        vb = rec(mid_idx, bi_hi)
        rvb = multiply(r, vb, engine, counter)
        out = np.zeros((size, size))
        out[: mid - lo, : mid - lo] = va
        out[: mid - lo, mid - lo :] = rvb
        out[mid - lo :, mid - lo :] = vb
        norms = np.sqrt(np.sum(out[:, mid - lo :] ** 2, axis=0))
        out[:, mid - lo :] /= norms[None, :]
        return out

    vmat = rec(0, len(bounds) - 1)
    s_floor = min(seps) if seps else norm(t, FROBENIUS)
    nt = norm(t, FROBENIUS)
    if s_floor <= 0.0:
        bound = 1.0
    else:
        log_b = EVEC_EXPONENT * math.log10(max(n, 2)) + math.log10(EPS)
        log_b += (2.0 + math.log2(max(n, 2))) * math.log10(max(nt / s_floor, 1.0))
        bound = 1.0 if log_b >= 0.0 else 10.0 ** log_b
    err = EigError(s_floor=s_floor, predicted_evec_bound=bound, sep_methods=methods)
    return vmat, err


def eigenvalues_of_schur(t) -> np.ndarray:
    """Complex eigenvalue multiset of a quasi-triangular matrix."""
    from .sylvester import block_eigenvalues

    return block_eigenvalues(t)
