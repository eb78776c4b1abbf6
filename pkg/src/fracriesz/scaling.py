"""Log-log scaling fits: volume growth, exit times, heat-kernel shape.

Exponent fits are ordinary least-squares lines through ``(log scale, log value)``
and report their worst absolute log-residual alongside the slope.  Heat-kernel
shape checks instead fit an upper envelope (a line through per-bin maxima) and
report the worst excess of any sample above it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import FitError, SolverError
from .graph import WeightedGraph, ball_volumes
from .operators import heat_columns_at

__all__ = [
    "ScalingFit",
    "ShapeFit",
    "KERNEL_FLOOR",
    "fit_power_law",
    "default_radii",
    "fit_volume_growth",
    "escape_time",
    "escape_time_monte_carlo",
    "fit_escape_exponent",
    "verify_ue_shape",
    "verify_dkue",
    "on_diagonal_fit",
]

KERNEL_FLOOR = 1e-14
SOLVER_TOL = 1e-8


@dataclass(frozen=True)
class ScalingFit:
    """Slope and intercept of ``log value = intercept + exponent * log scale``."""

    exponent: float
    intercept: float
    residual: float
    sample: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if len(self.sample) < 4:
            raise FitError(f"a scaling fit needs at least 4 points, got {len(self.sample)}")
        s = [x for x, _ in self.sample]
        if any(b <= a for a, b in zip(s, s[1:])):
            raise FitError("scales must be strictly increasing")

    def predict(self, scale) -> np.ndarray:
        return np.exp(self.intercept) * np.asarray(scale, dtype=float) ** self.exponent


def fit_power_law(scales, values) -> ScalingFit:
    """Least-squares power law through positive samples."""
    x = np.asarray(scales, dtype=float)
    y = np.asarray(values, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise FitError("scales and values must be 1-d arrays of equal length")
    if x.size < 4:
        raise FitError(f"a scaling fit needs at least 4 points, got {x.size}")
    if np.any(x <= 0) or np.any(y <= 0) or not np.all(np.isfinite(y)):
        raise FitError("power-law fit needs positive finite scales and values")
    lx, ly = np.log(x), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    res = float(np.max(np.abs(ly - (intercept + slope * lx))))
    return ScalingFit(float(slope), float(intercept), res, tuple(zip(x.tolist(), y.tolist())))


def default_radii(g: WeightedGraph, n: int = 8, lo: int | None = None, hi: int | None = None) -> list[int]:
    """Geometric radii between ``max(4, diam/25)`` and ``diam/4``.

    The lower end skips the lattice-discreteness regime; the upper end keeps
    balls well away from saturation.
    """
    diam = g.diameter
    hi = hi if hi is not None else max(diam // 4, 1)
    lo = lo if lo is not None else max(4, int(round(diam / 25)))
    lo = min(lo, hi)
    r = np.unique(np.round(np.geomspace(lo, hi, n)).astype(int))
    return [int(v) for v in r]


# -- volume -------------------------------------------------------------------------------


def fit_volume_growth(g: WeightedGraph, centers, radii) -> ScalingFit:
    """Slope of ``log V(x, r)`` against ``log r``, pooled over centres.

    The sample holds the geometric mean of ``V(x, r)`` over centres; the
    slope is that of the pooled regression, which coincides with it.
    Radii at which some ball reaches the whole graph are rejected.
    """
    centers = [int(c) for c in np.atleast_1d(centers)]
    radii = sorted({int(r) for r in radii})
    if not centers:
        raise FitError("no centres given")
    logs = np.empty((len(centers), len(radii)))
    for j, r in enumerate(radii):
        vol = ball_volumes(g, r, centers)
        if np.any(vol >= g.total_mass * (1 - 1e-12)):
            raise FitError(f"radius {r} saturates the graph; choose radii below diameter/2")
        logs[:, j] = np.log(vol)
    return fit_power_law(radii, np.exp(logs.mean(axis=0)))


# -- exit times ----------------------------------------------------------------------------


def escape_time(g: WeightedGraph, x: int, r: int, tol: float = SOLVER_TOL, return_solution: bool = False):
    """Expected exit time of the walk from ``B(x, r)`` started at ``x``.

    Solves ``u = 1 + P_B u`` on the ball (``u = 0`` outside) in the
    symmetric form ``(M - W)_BB u = m_B`` by Jacobi-preconditioned conjugate
    gradients, then refines until ``||(I - P_B) u - 1||_inf <= tol``.
    """
    d = g.distances_from(int(x), limit=int(r))
    B = np.flatnonzero(d >= 0)
    if B.size == g.n_vertices:
        raise ValueError(f"ball B({x}, {r}) is the whole graph; no exit possible")
    W = g.weights[B][:, B]
    mB = g.m[B]
    A = (sp.diags(mB) - W).tocsr()
    Pb = (sp.diags(1.0 / mB) @ W).tocsr()
    Minv = sp.diags(1.0 / A.diagonal())
    u = np.zeros(B.size)
    res = math.inf
    for _ in range(20):
        rhs = mB - A @ u
        du, info = spla.cg(A, rhs, rtol=1e-13, atol=0.0, maxiter=20 * B.size + 1000, M=Minv)
        u = u + du
        res = float(np.max(np.abs(u - Pb @ u - 1.0)))
        if res <= tol:
            break
    else:
        raise SolverError(f"exit-time solve for B({x}, {r}) stalled", residual=res)
    tx = float(u[np.searchsorted(B, int(x))])
    if return_solution:
        full = np.zeros(g.n_vertices)
        full[B] = u
        return tx, full
    return tx


def escape_time_monte_carlo(g: WeightedGraph, x: int, r: int, n_walks: int = 10_000, seed: int = 0, max_steps: int = 10**8):
    """Simulated exit times; returns ``(mean, standard error)``.

    Used only to cross-check :func:`escape_time`.
    """
    rng = np.random.default_rng(seed)
    d = g.distances_from(int(x), limit=int(r))
    inside = d >= 0
    P = g.P
    cum = np.cumsum(P.data)
    row_start = P.indptr[:-1]
    row_base = np.where(row_start > 0, cum[np.maximum(row_start - 1, 0)], 0.0)
    pos = np.full(n_walks, int(x))
    steps = np.zeros(n_walks, dtype=np.int64)
    alive = np.ones(n_walks, dtype=bool)
    t = 0
    while alive.any():
        if t >= max_steps:
            raise SolverError("Monte Carlo walks did not all exit")
        idx = np.flatnonzero(alive)
        cur = pos[idx]
        u = row_base[cur] + rng.random(idx.size) * (cum[P.indptr[cur + 1] - 1] - row_base[cur])
        k = np.searchsorted(cum, u, side="right")
        k = np.minimum(k, P.indptr[cur + 1] - 1)
        nxt = P.indices[k]
        pos[idx] = nxt
        steps[idx] += 1
        alive[idx] = inside[nxt]
        t += 1
    return float(steps.mean()), float(steps.std(ddof=1) / math.sqrt(n_walks))


def fit_escape_exponent(g: WeightedGraph, x: int, radii) -> ScalingFit:
    radii = sorted({int(r) for r in radii})
    if len(radii) < 4:
        raise FitError("escape fit needs at least 4 radii")
    return fit_power_law(radii, [escape_time(g, x, r) for r in radii])


# -- heat-kernel shape ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ShapeFit:
    """Sub-Gaussian profile ``log(p V) <= log C - c z`` fitted to the upper envelope.

    ``violation`` is the largest positive residual of any sample against the
    fitted profile, in log units; ``rms`` is the root-mean-square residual of
    all samples.
    """

    C: float
    c: float
    violation: float
    rms: float
    n_samples: int
    beta: float
    per_step: tuple[tuple[int, float], ...]   # (k, max positive residual at k)


ENVELOPE_BINS = 20


def _shape_regression(z, w, ks_of_sample, beta, n_bins: int = ENVELOPE_BINS) -> ShapeFit:
    # A pointwise upper bound is a statement about the envelope: at each
    # distance scale only the largest normalised kernel value matters.  The
    # line is fitted through the per-bin maxima (equal-width bins in z).
    if z.size < 4:
        raise FitError("fewer than 4 samples above the kernel floor")
    edges = np.linspace(0.0, z.max(), n_bins + 1)
    idx = np.clip(np.digitize(z, edges) - 1, 0, n_bins - 1)
    order = np.lexsort((-w, idx))
    first = np.flatnonzero(np.r_[True, idx[order][1:] != idx[order][:-1]])
    top = order[first]
    if top.size < 2:
        raise FitError("samples occupy fewer than 2 distance bins")
    slope, logC = np.polyfit(z[top], w[top], 1)
    r = w - (logC + slope * z)
    per = []
    for k in np.unique(ks_of_sample):
        sel = ks_of_sample == k
        per.append((int(k), float(max(r[sel].max(), 0.0))))
    return ShapeFit(
        float(np.exp(logC)), float(-slope), float(max(r.max(), 0.0)), float(np.sqrt(np.mean(r * r))),
        int(z.size), float(beta), tuple(per)
    )


def _volume_table(g: WeightedGraph, radii) -> dict[int, np.ndarray]:
    return {int(R): ball_volumes(g, int(R)) for R in sorted(set(int(R) for R in radii))}


def _shape_samples(g, y, ks, beta, floor, derivative):
    ks = sorted({int(k) for k in ks})
    steps = sorted(set(ks) | ({k - 1 for k in ks} if derivative else set()))
    cols = {c.step: c.values for c in heat_columns_at(g, y, steps)}
    dist = g.distances_from(int(y)).astype(float)
    radius = {k: max(int(math.floor(k ** (1.0 / beta))), 0) for k in ks}
    vols = _volume_table(g, radius.values())
    zs, ws, kk = [], [], []
    for k in ks:
        val = np.abs(cols[k] - cols[k - 1]) * k if derivative else cols[k]
        sel = val > floor
        V = vols[radius[k]]
        zs.append((dist[sel] ** beta / k) ** (1.0 / (beta - 1.0)))
        ws.append(np.log(val[sel] * V[sel]))
        kk.append(np.full(int(sel.sum()), k))
    return np.concatenate(zs), np.concatenate(ws), np.concatenate(kk)


def verify_ue_shape(g: WeightedGraph, y: int, ks, beta: float, floor: float = KERNEL_FLOOR) -> ShapeFit:
    """Collapse ``p_k(x, y) V(x, k^{1/beta})`` onto ``C exp(-c z)``, ``z = (d^beta/k)^{1/(beta-1)}``.

    ``beta`` is an input, not fitted.  Samples below ``floor`` are discarded
    as round-off.
    """
    if not beta > 1:
        raise ValueError("beta must exceed 1")
    z, w, kk = _shape_samples(g, y, ks, beta, floor, derivative=False)
    return _shape_regression(z, w, kk, beta)


def verify_dkue(g: WeightedGraph, y: int, ks, beta: float, floor: float = KERNEL_FLOOR) -> ShapeFit:
    """As :func:`verify_ue_shape` for ``k |p_k - p_{k-1}|(x, y)``."""
    if not beta > 1:
        raise ValueError("beta must exceed 1")
    if min(ks) < 1:
        raise ValueError("time derivative needs k >= 1")
    z, w, kk = _shape_samples(g, y, ks, beta, floor, derivative=True)
    return _shape_regression(z, w, kk, beta)


def on_diagonal_fit(g: WeightedGraph, y: int, ks) -> ScalingFit:
    """Slope of ``log(p_k(y, y) m(y))`` against ``log k``; about ``-D/beta``."""
    ks = sorted({int(k) for k in ks})
    cols = heat_columns_at(g, y, ks)
    return fit_power_law(ks, [c.values[y] * g.m[y] for c in cols])
