"""Fractional powers ``Delta**gamma`` of the graph Laplacian.

Four routes, meant to check each other:

* ``spectral``   dense eigendecomposition of the m-symmetrised operator
                 (small graphs, the reference);
* ``binomial``   ``(I - P)**gamma = sum_n a_n P**n`` with a certified tail;
* ``chebyshev``  Chebyshev interpolant of ``x**gamma`` on the nonzero
                 spectrum, for graphs beyond the dense cap;
* ``quotient``   dense eigendecomposition restricted to the functions that
                 are constant on the cells of an equitable partition; exact
                 for witnesses with the symmetry of a rooted partition.

Conventions: ``0**gamma = 0`` for ``gamma > 0`` and ``Delta**0 = I``.  The
constant component is annihilated exactly for ``gamma > 0``, so the series
routes only ever expand the mean-zero part.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import CapExceededError, GraphMismatchError, SeriesNotConvergedError
from .graph import WeightedGraph
from .operators import as_vertex_function, lp_norm

__all__ = [
    "DENSE_CAP",
    "SpectralDecomposition",
    "SpectralBounds",
    "SeriesResult",
    "QuotientDecomposition",
    "spectral_decompose",
    "frac_power_spectral",
    "spectral_bounds",
    "binomial_coefficients",
    "binomial_tail",
    "frac_power_binomial",
    "frac_power_binomial_multi",
    "frac_power_chebyshev",
    "chebyshev_coefficients",
    "equitable_partition",
    "quotient_decompose",
    "frac_power",
    "PowerBackend",
    "make_backend",
]

DENSE_CAP = 4000
RESIDUAL_TOL = 1e-8
ZERO_EIG_TOL = 1e-10


def _powers(lam: np.ndarray, gamma: float) -> np.ndarray:
    lam = np.clip(lam, 0.0, None)
    if gamma == 0:
        return np.ones_like(lam)
    out = lam**gamma
    out[lam <= ZERO_EIG_TOL] = 0.0
    return out


# -- dense spectral route ---------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigenpairs of ``Delta`` with eigenvectors orthonormal in ``L^2(m)``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    m: np.ndarray
    graph_fingerprint: str
    max_residual: float

    @property
    def n(self) -> int:
        return self.eigenvalues.size

    @property
    def spectral_gap(self) -> float:
        return float(self.eigenvalues[1]) if self.n > 1 else 0.0

    def coefficients(self, f: np.ndarray) -> np.ndarray:
        """``<f, v_i>_m`` for every eigenvector (rows) and column of ``f``."""
        w = self.m if f.ndim == 1 else self.m[:, None]
        return self.eigenvectors.T @ (w * f)

    def apply_function(self, phi: np.ndarray, f: np.ndarray) -> np.ndarray:
        c = self.coefficients(f)
        c = phi * c if c.ndim == 1 else phi[:, None] * c
        return self.eigenvectors @ c


def spectral_decompose(g: WeightedGraph, cap: int = DENSE_CAP) -> SpectralDecomposition:
    """Full eigensystem of ``Delta = I - P`` via the symmetric form.

    ``S = D^{-1/2} W D^{-1/2}`` is similar to ``P``; if ``S u = (1 - lam) u``
    then ``v = D^{-1/2} u`` satisfies ``Delta v = lam v`` and the ``v`` are
    orthonormal for ``<f, h>_m = sum f h m``.

    Raises
    ------
    CapExceededError
        Above ``cap`` vertices; use :func:`frac_power_binomial` or
        :func:`frac_power_chebyshev` instead.
    """
    n = g.n_vertices
    if n > cap:
        raise CapExceededError(
            f"{n} vertices exceed the dense cap {cap}; use the binomial or chebyshev route"
        )
    s = 1.0 / np.sqrt(g.m)
    W = g.weights.toarray()
    L = np.eye(n) - s[:, None] * W * s[None, :]
    L = 0.5 * (L + L.T)
    lam, U = scipy.linalg.eigh(L)
    V = s[:, None] * U
    R = V - g.P @ V - V * lam[None, :]
    res = float(np.max(np.sqrt(np.sum(R * R, axis=0))))
    if res > RESIDUAL_TOL:
        raise ArithmeticError(f"eigenpair residual {res:.2e} exceeds {RESIDUAL_TOL:.0e}")
    lam = lam.copy()
    if abs(lam[0]) <= ZERO_EIG_TOL:
        lam[0] = 0.0
    return SpectralDecomposition(lam, V, g.m.copy(), g.fingerprint, res)


def frac_power_spectral(dec: SpectralDecomposition, gamma: float, f, g: WeightedGraph | None = None) -> np.ndarray:
    """``sum_i lam_i**gamma <f, v_i>_m v_i``."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError("gamma must lie in [0, 1]")
    if g is not None:
        if g.fingerprint != dec.graph_fingerprint:
            raise GraphMismatchError("decomposition was computed for a different graph")
        f = as_vertex_function(g, f)
    f = np.asarray(f, dtype=float)
    if f.shape[0] != dec.n:
        raise GraphMismatchError(f"function of length {f.shape[0]} vs decomposition of size {dec.n}")
    return dec.apply_function(_powers(dec.eigenvalues, gamma), f)


# -- spectral bounds for the iterative routes ----------------------------------------------------


@dataclass(frozen=True)
class SpectralBounds:
    """Smallest nonzero and largest eigenvalue of ``Delta``."""

    lambda_1: float
    lambda_max: float

    @property
    def rho(self) -> float:
        """Spectral radius of ``P`` on mean-zero functions."""
        return max(1.0 - self.lambda_1, self.lambda_max - 1.0)


def spectral_bounds(g: WeightedGraph) -> SpectralBounds:
    """``lambda_1`` by shift-invert Lanczos and ``lambda_max`` by plain Lanczos."""
    n = g.n_vertices
    s = 1.0 / np.sqrt(g.m)
    Ssym = sp.diags(s) @ g.weights @ sp.diags(s)
    L = (sp.identity(n) - Ssym).tocsc()
    if n <= 64:
        lam = np.linalg.eigvalsh(L.toarray())
        return SpectralBounds(float(lam[1]), float(lam[-1]))
    lo = spla.eigsh(L, k=2, sigma=-1e-4, which="LM", return_eigenvectors=False, tol=1e-13)
    hi = spla.eigsh(L, k=1, which="LA", return_eigenvectors=False, tol=1e-12)
    return SpectralBounds(float(np.sort(lo)[1]), float(hi[0]))


# -- binomial series ---------------------------------------------------------------------------------


@dataclass(frozen=True)
class SeriesResult:
    values: np.ndarray
    n_terms: int
    tail_bound: float
    method: str


def binomial_coefficients(gamma: float, N: int) -> np.ndarray:
    """``a_0 .. a_N`` of ``(1 - x)**gamma = sum a_n x**n``."""
    a = np.empty(N + 1)
    a[0] = 1.0
    for n in range(1, N + 1):
        a[n] = a[n - 1] * (n - 1 - gamma) / n
    return a


def binomial_tail(gamma: float, N: int) -> float:
    """``sum_{n > N} |a_n|``, exactly, as the partial sum ``prod_{j<=N}(1 - gamma/j)``.

    For ``0 < gamma <= 1`` all ``a_n`` with ``n >= 1`` are nonpositive and
    the full series sums to zero, so the tail equals ``sum_{n <= N} a_n``.
    """
    if gamma == 1:
        return 0.0 if N >= 1 else 1.0
    j = np.arange(1, N + 1)
    return float(np.exp(np.sum(np.log1p(-gamma / j))))


def _lp_from_l2_constant(g: WeightedGraph, p: float) -> float:
    # ||h||_p <= K ||h||_2 on a finite measure space.
    if p == 2:
        return 1.0
    if p > 2:
        return float(g.m.min() ** (1.0 / p - 0.5)) if np.isfinite(p) else float(g.m.min() ** -0.5)
    return float(g.total_mass ** (1.0 / p - 0.5))


def frac_power_binomial(
    g: WeightedGraph,
    gamma: float,
    f,
    tol: float = 1e-8,
    p: float = 2.0,
    bounds: SpectralBounds | None = None,
    max_terms: int = 5_000_000,
    use_gap: bool = True,
) -> SeriesResult:
    """Truncated series ``sum_{n<=N} a_n P**n f`` with a certified L^p tail.

    The tail after ``N`` terms is bounded by the smaller of
    ``sum_{n>N}|a_n| ||f0||_p`` (contraction of ``P``) and, unless
    ``use_gap`` is off, ``K_p ||f0||_2 |a_{N+1}| rho**(N+1) / (1 - rho)``
    where ``f0`` is the mean-zero part and ``rho`` the spectral radius of
    ``P`` on mean-zero functions.  ``N`` is the first index (checked in
    blocks) at which that bound drops below ``tol``.  Spectral bounds are
    computed by Lanczos when not supplied.
    """
    return frac_power_binomial_multi(
        g, [gamma], f, tol=tol, p=p, bounds=bounds, max_terms=max_terms, use_gap=use_gap
    )[gamma]


def frac_power_binomial_multi(
    g: WeightedGraph,
    gammas,
    f,
    tol: float = 1e-8,
    p: float = 2.0,
    bounds: SpectralBounds | None = None,
    max_terms: int = 5_000_000,
    check_every: int = 32,
    use_gap: bool = True,
) -> dict[float, SeriesResult]:
    """Binomial route for several exponents sharing the powers ``P**n f``."""
    gammas = [float(x) for x in gammas]
    for gm in gammas:
        if not 0.0 < gm <= 1.0:
            raise ValueError("binomial route needs 0 < gamma <= 1")
    if not tol > 0:
        raise ValueError("tol must be positive")
    f = as_vertex_function(g, f)
    w = g.m if f.ndim == 1 else g.m[:, None]
    f0 = f - np.sum(f * w, axis=0) / g.total_mass
    fp = float(np.max(lp_norm(g, f0, p)))
    f2 = float(np.max(lp_norm(g, f0, 2)))
    Kp = _lp_from_l2_constant(g, p)
    if bounds is None and use_gap:
        bounds = spectral_bounds(g)
    rho = bounds.rho if bounds is not None else 1.0

    out: dict[float, SeriesResult] = {}
    active = []
    for gm in gammas:
        if gm == 1.0:
            out[gm] = SeriesResult(f0 - g.P @ f0, 1, 0.0, "binomial")
        else:
            active.append(gm)
    if not active or fp == 0.0:
        for gm in active:
            out[gm] = SeriesResult(np.zeros_like(f), 0, 0.0, "binomial")
        return out

    ga = np.array(active)
    coef = np.ones_like(ga)              # a_n for each gamma
    log_tail = np.zeros_like(ga)         # log sum_{k>n} |a_k| = log prod (1 - g/j)
    acc = [f0.copy() for _ in active]
    done: dict[float, tuple[int, float]] = {}
    h = f0
    P = g.P
    n = 0
    while len(done) < len(active):
        if n >= max_terms:
            gm = next(x for x in active if x not in done)
            i = active.index(gm)
            raise SeriesNotConvergedError(n, _tail_bound(log_tail[i], coef[i], ga[i], n, fp, f2, Kp, rho), tol)
        n += 1
        h = P @ h
        coef = coef * (n - 1 - ga) / n
        log_tail = log_tail + np.log1p(-ga / n)
        for i, gm in enumerate(active):
            if gm not in done:
                acc[i] += coef[i] * h
        if n % check_every == 0:
            for i, gm in enumerate(active):
                if gm in done:
                    continue
                bound = _tail_bound(log_tail[i], coef[i], ga[i], n, fp, f2, Kp, rho)
                if bound <= tol:
                    done[gm] = (n, bound)
    for i, gm in enumerate(active):
        N, bound = done[gm]
        out[gm] = SeriesResult(acc[i], N, bound, "binomial")
    return {gm: out[gm] for gm in gammas}


def _tail_bound(log_tail, a_n, gamma, n, fp, f2, Kp, rho):
    plain = float(np.exp(log_tail)) * fp
    if rho >= 1.0:
        return plain
    a_next = abs(a_n) * (n - gamma) / (n + 1)
    gap = Kp * f2 * a_next * rho ** (n + 1) / (1.0 - rho)
    return min(plain, gap)


# -- Chebyshev route ------------------------------------------------------------------------------------


def chebyshev_coefficients(func, a: float, b: float, n_nodes: int) -> np.ndarray:
    """Chebyshev coefficients of ``func`` on ``[a, b]`` from ``n_nodes`` first-kind nodes."""
    k = np.arange(n_nodes)
    t = np.cos(np.pi * (k + 0.5) / n_nodes)
    vals = func(0.5 * (b - a) * t + 0.5 * (a + b))
    c = scipy.fft.dct(vals, type=2) / n_nodes
    c[0] *= 0.5
    return c


def frac_power_chebyshev(
    g: WeightedGraph,
    gamma: float,
    f,
    tol: float = 1e-8,
    p: float = 2.0,
    bounds: SpectralBounds | None = None,
    max_degree: int = 400_000,
) -> SeriesResult:
    """Chebyshev expansion of ``x**gamma`` on ``[lambda_1, lambda_max]``.

    Applied to the mean-zero part, whose spectral measure lives on that
    interval.  The degree is the smallest one whose coefficient tail (from a
    reference expansion of twice the degree, itself converged to round-off)
    keeps the uniform error, times ``K_p ||f0||_2``, below ``tol``.
    """
    if not 0.0 < gamma <= 1.0:
        raise ValueError("chebyshev route needs 0 < gamma <= 1")
    f = as_vertex_function(g, f)
    w = g.m if f.ndim == 1 else g.m[:, None]
    f0 = f - np.sum(f * w, axis=0) / g.total_mass
    if gamma == 1.0:
        return SeriesResult(f0 - g.P @ f0, 1, 0.0, "chebyshev")
    bounds = bounds or spectral_bounds(g)
    a = bounds.lambda_1 * (1.0 - 1e-6)
    b = bounds.lambda_max * (1.0 + 1e-9) + 1e-12
    scale = _lp_from_l2_constant(g, p) * float(np.max(lp_norm(g, f0, 2)))
    if scale == 0.0:
        return SeriesResult(np.zeros_like(f), 0, 0.0, "chebyshev")
    target = tol / scale

    n_nodes = 256
    while True:
        c = chebyshev_coefficients(lambda x: x**gamma, a, b, n_nodes)
        tails = np.cumsum(np.abs(c[::-1]))[::-1]  # tails[j] = sum_{i>=j} |c_i|
        # Reference expansion must itself be resolved to well below target.
        if tails[n_nodes // 2] < 0.01 * target or n_nodes >= 2 * max_degree:
            break
        n_nodes *= 2
    ok = np.flatnonzero(tails[1:] <= target)
    if ok.size == 0:
        raise SeriesNotConvergedError(n_nodes, float(tails[-1]) * scale, tol)
    degree = int(ok[0])  # keep c_0 .. c_degree, tail = tails[degree + 1]
    if degree > max_degree:
        raise SeriesNotConvergedError(max_degree, float(tails[max_degree + 1]) * scale, tol)
    bound = (float(tails[degree + 1]) + 2.0 * float(tails[n_nodes // 2])) * scale

    P = g.P
    alpha = 2.0 / (b - a)
    shift = (a + b) / (b - a)

    def X(v):
        # (2 Delta - (a + b)) / (b - a), with Delta v = v - P v
        return alpha * (v - P @ v) - shift * v

    t_prev = f0
    t_cur = X(f0)
    acc = c[0] * t_prev + (c[1] * t_cur if degree >= 1 else 0.0)
    for j in range(2, degree + 1):
        t_next = 2.0 * X(t_cur) - t_prev
        acc = acc + c[j] * t_next
        t_prev, t_cur = t_cur, t_next
    return SeriesResult(np.asarray(acc), degree, bound, "chebyshev")


# -- equitable-partition quotient -------------------------------------------------------------------------


def equitable_partition(g: WeightedGraph, root: int | None = None, max_rounds: int | None = None) -> np.ndarray:
    """Coarsest equitable refinement of ``{root}, rest`` by colour refinement.

    Each round recolours a vertex by its colour together with the multiset
    of (neighbour colour, edge weight) pairs.  Cells are numbered by their
    smallest vertex.  The result is verified exactly in
    :func:`quotient_decompose`, so hash collisions cannot go unnoticed.
    """
    n = g.n_vertices
    W = g.weights
    rows = np.repeat(np.arange(n), np.diff(W.indptr))
    cols = W.indices
    mu_bits = np.ascontiguousarray(W.data).view(np.uint64)
    mu_hash = _mix(mu_bits ^ np.uint64(0x9E3779B97F4A7C15))
    colors = np.zeros(n, dtype=np.int64)
    if root is not None:
        colors[root] = 1
    colors = _canonical(colors)
    n_colors = int(colors.max()) + 1
    rng = np.random.default_rng(20240601)
    rounds = 0
    while max_rounds is None or rounds < max_rounds:
        rounds += 1
        r_self = rng.integers(1, 2**63 - 1, size=n_colors, dtype=np.int64).astype(np.uint64)
        r_nbr = rng.integers(1, 2**63 - 1, size=n_colors, dtype=np.int64).astype(np.uint64)
        contrib = _mix(r_nbr[colors[cols]] ^ mu_hash)
        with np.errstate(over="ignore"):
            s = np.zeros(n, dtype=np.uint64)
            np.add.at(s, rows, contrib)
            s = s + _mix(r_self[colors])
        new = _canonical(np.unique(s, return_inverse=True)[1].ravel())
        new_count = int(new.max()) + 1
        colors = new
        if new_count == n_colors:
            break
        n_colors = new_count
    return colors


def _mix(x: np.ndarray) -> np.ndarray:
    # splitmix64 finaliser
    x = x.astype(np.uint64, copy=True)
    with np.errstate(over="ignore"):
        x ^= x >> np.uint64(30)
        x *= np.uint64(0xBF58476D1CE4E5B9)
        x ^= x >> np.uint64(27)
        x *= np.uint64(0x94D049BB133111EB)
        x ^= x >> np.uint64(31)
    return x


def _canonical(labels: np.ndarray) -> np.ndarray:
    _, first = np.unique(labels, return_index=True)
    order = np.argsort(first)
    remap = np.empty(order.size, dtype=np.int64)
    remap[order] = np.arange(order.size)
    return remap[np.unique(labels, return_inverse=True)[1].ravel()]


@dataclass(frozen=True, eq=False)
class QuotientDecomposition:
    """Spectral data of ``Delta`` on functions constant on partition cells.

    The span of the cell indicators is invariant under ``P`` when the
    partition is equitable, so ``Delta**gamma`` of a cell-constant function
    is computed exactly from the ``k x k`` quotient.
    """

    labels: np.ndarray
    cell_mass: np.ndarray
    quotient: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    graph_fingerprint: str

    @property
    def n_cells(self) -> int:
        return self.cell_mass.size

    def project(self, f: np.ndarray, atol: float = 1e-12) -> np.ndarray:
        """Cell values of a cell-constant function; raises if ``f`` is not one."""
        f = np.asarray(f, dtype=float)
        F = np.zeros((self.n_cells,) + f.shape[1:])
        F[self.labels] = f
        scale = max(1.0, float(np.max(np.abs(f))))
        if np.max(np.abs(F[self.labels] - f)) > atol * scale:
            raise ValueError("function is not constant on the partition cells")
        return F

    def lift(self, F: np.ndarray) -> np.ndarray:
        return np.asarray(F)[self.labels]

    def frac_power(self, gamma: float, F: np.ndarray) -> np.ndarray:
        w = self.cell_mass if F.ndim == 1 else self.cell_mass[:, None]
        c = self.eigenvectors.T @ (w * F)
        phi = _powers(self.eigenvalues, gamma)
        c = phi * c if c.ndim == 1 else phi[:, None] * c
        return self.eigenvectors @ c

    def gradient_length(self, F: np.ndarray) -> np.ndarray:
        Q = self.quotient
        if F.ndim == 1:
            d = F[None, :] - F[:, None]
            return np.sqrt(0.5 * np.sum(Q * d * d, axis=1))
        d = F[None, :, :] - F[:, None, :]
        return np.sqrt(0.5 * np.einsum("ab,abk->ak", Q, d * d))

    def lp_norm(self, F: np.ndarray, p: float):
        a = np.abs(F)
        if np.isinf(p):
            return a.max(axis=0)
        w = self.cell_mass if F.ndim == 1 else self.cell_mass[:, None]
        scale = a.max(axis=0)
        safe = np.where(scale > 0, scale, 1.0)
        return safe * np.sum((a / safe) ** p * w, axis=0) ** (1.0 / p) * (scale > 0)


def quotient_decompose(g: WeightedGraph, root: int | None = None, labels: np.ndarray | None = None, cap: int = DENSE_CAP) -> QuotientDecomposition:
    """Quotient eigensystem for the equitable partition rooted at ``root``."""
    if labels is None:
        labels = equitable_partition(g, root)
    k = int(labels.max()) + 1
    if k > cap:
        raise CapExceededError(f"quotient has {k} cells > dense cap {cap}")
    n = g.n_vertices
    ind = sp.csr_matrix((np.ones(n), (np.arange(n), labels)), shape=(n, k))
    S = (g.P @ ind).toarray()                    # S[x, b] = sum_{y in b} P[x, y]
    first = np.zeros(k, dtype=np.int64)
    first[labels[::-1]] = np.arange(n)[::-1]
    Q = S[first]
    if np.max(np.abs(S - Q[labels])) > 1e-12:
        raise ArithmeticError("partition is not equitable")
    M = np.bincount(labels, weights=g.m, minlength=k)
    sq = np.sqrt(M)
    Ssym = sq[:, None] * Q / sq[None, :]
    asym = np.max(np.abs(Ssym - Ssym.T))
    if asym > 1e-10:
        raise ArithmeticError(f"quotient is not reversible (asymmetry {asym:.1e})")
    Ssym = 0.5 * (Ssym + Ssym.T)
    lam, U = scipy.linalg.eigh(np.eye(k) - Ssym)
    if abs(lam[0]) <= ZERO_EIG_TOL:
        lam[0] = 0.0
    V = U / sq[:, None]
    return QuotientDecomposition(labels, M, Q, lam, V, g.fingerprint)


# -- dispatch -----------------------------------------------------------------------------------------------


def frac_power(
    g: WeightedGraph,
    gamma: float,
    f,
    method: str = "auto",
    tol: float = 1e-8,
    p: float = 2.0,
    dec: SpectralDecomposition | None = None,
    bounds: SpectralBounds | None = None,
) -> np.ndarray:
    """``Delta**gamma f`` by the requested route (``auto``: dense if small)."""
    if method == "auto":
        method = "spectral" if (dec is not None or g.n_vertices <= DENSE_CAP) else "chebyshev"
    f = as_vertex_function(g, f)
    if gamma == 0.0:
        return f.copy()
    if method == "spectral":
        dec = dec or spectral_decompose(g)
        return frac_power_spectral(dec, gamma, f, g)
    if method == "binomial":
        return frac_power_binomial(g, gamma, f, tol=tol, p=p, bounds=bounds).values
    if method == "chebyshev":
        return frac_power_chebyshev(g, gamma, f, tol=tol, p=p, bounds=bounds).values
    raise ValueError(f"unknown method {method!r}")


# -- block backends ---------------------------------------------------------------------------------------


class PowerBackend:
    """Applies ``Delta**gamma`` for several exponents to a block of functions.

    ``error_bound(F)`` is the certified absolute L^2 error per column (zero
    up to round-off for the exact routes).
    """

    name = "abstract"

    def __init__(self, g: WeightedGraph, tol: float = 1e-8):
        self.g = g
        self.tol = tol

    def apply(self, gammas, F: np.ndarray) -> dict[float, np.ndarray]:
        raise NotImplementedError


class _SpectralBackend(PowerBackend):
    name = "spectral"

    def __init__(self, g, tol=1e-8, dec: SpectralDecomposition | None = None):
        super().__init__(g, tol)
        self.dec = dec or spectral_decompose(g)
        if self.dec.graph_fingerprint != g.fingerprint:
            raise GraphMismatchError("decomposition was computed for a different graph")

    def apply(self, gammas, F):
        c = self.dec.coefficients(np.asarray(F, dtype=float))
        out = {}
        for gm in gammas:
            phi = _powers(self.dec.eigenvalues, float(gm))
            out[float(gm)] = self.dec.eigenvectors @ (phi[:, None] * c if c.ndim == 2 else phi * c)
        return out


class _BinomialBackend(PowerBackend):
    name = "binomial"

    def __init__(self, g, tol=1e-8, bounds: SpectralBounds | None = None):
        super().__init__(g, tol)
        self.bounds = bounds or spectral_bounds(g)

    def apply(self, gammas, F):
        gammas = [float(x) for x in gammas]
        pos = [x for x in gammas if x > 0]
        res = frac_power_binomial_multi(self.g, pos, F, tol=self.tol, bounds=self.bounds) if pos else {}
        return {x: (np.asarray(F, dtype=float).copy() if x == 0 else res[x].values) for x in gammas}


class _ChebyshevBackend(PowerBackend):
    name = "chebyshev"

    def __init__(self, g, tol=1e-8, bounds: SpectralBounds | None = None):
        super().__init__(g, tol)
        self.bounds = bounds or spectral_bounds(g)

    def apply(self, gammas, F):
        out = {}
        for x in gammas:
            x = float(x)
            if x == 0:
                out[x] = np.asarray(F, dtype=float).copy()
            else:
                out[x] = frac_power_chebyshev(self.g, x, F, tol=self.tol, bounds=self.bounds).values
        return out


class _QuotientBackend(PowerBackend):
    name = "quotient"

    def __init__(self, g, tol=1e-8, root: int | None = None, quotient: QuotientDecomposition | None = None):
        super().__init__(g, tol)
        self.q = quotient or quotient_decompose(g, g.center if root is None else root)

    def apply(self, gammas, F):
        Fc = self.q.project(np.asarray(F, dtype=float))
        return {float(x): self.q.lift(self.q.frac_power(float(x), Fc)) for x in gammas}


def make_backend(g: WeightedGraph, method: str = "auto", tol: float = 1e-8, **kw) -> PowerBackend:
    """Backend by name: ``spectral``, ``binomial``, ``chebyshev``, ``quotient`` or ``auto``."""
    if method == "auto":
        method = "spectral" if g.n_vertices <= DENSE_CAP else "chebyshev"
    table = {
        "spectral": _SpectralBackend,
        "binomial": _BinomialBackend,
        "chebyshev": _ChebyshevBackend,
        "quotient": _QuotientBackend,
    }
    if method not in table:
        raise ValueError(f"unknown method {method!r}; expected one of {sorted(table)}")
    return table[method](g, tol=tol, **kw)
