"""Markov operator, Laplacian, gradient length, heat kernels and L^p norms.

Vertex functions are plain numpy arrays of length ``n_vertices`` (or
``(n_vertices, k)`` blocks, one function per column).  All norms and inner
products are weighted by the vertex measure ``m``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceededError, GraphMismatchError
from .graph import WeightedGraph

__all__ = [
    "HeatKernelColumn",
    "as_vertex_function",
    "apply_markov",
    "laplacian_apply",
    "gradient_length",
    "heat_column",
    "heat_columns_at",
    "time_derivative",
    "lp_norm",
    "inner",
    "mean_zero",
    "lp_functional",
    "SquareFunction",
    "read_vertex_function",
    "write_vertex_function",
    "DEFAULT_HEAT_BUDGET",
]

DEFAULT_HEAT_BUDGET = 2_000_000_000


def as_vertex_function(g: WeightedGraph, f) -> np.ndarray:
    arr = np.asarray(f, dtype=float)
    if arr.ndim == 0 or arr.shape[0] != g.n_vertices or arr.ndim > 2:
        raise GraphMismatchError(
            f"vertex function of shape {arr.shape} does not match graph with {g.n_vertices} vertices"
        )
    if not np.all(np.isfinite(arr)):
        raise ValueError("vertex function has non-finite values")
    return arr


def apply_markov(g: WeightedGraph, f) -> np.ndarray:
    """``Pf(x) = sum_y p(x, y) f(y) m(y)``."""
    return g.P @ as_vertex_function(g, f)


def laplacian_apply(g: WeightedGraph, f) -> np.ndarray:
    """``Delta f = (I - P) f``."""
    f = as_vertex_function(g, f)
    return f - g.P @ f


def gradient_length(g: WeightedGraph, f) -> np.ndarray:
    """``(1/2 sum_{y ~ x} p(x, y) |f(y) - f(x)|^2 m(y))^(1/2)``, edge by edge."""
    f = as_vertex_function(g, f)
    P = g.P
    rows = np.repeat(np.arange(g.n_vertices), np.diff(P.indptr))
    diff = f[P.indices] - f[rows]
    sq = diff * diff
    if f.ndim == 1:
        acc = np.bincount(rows, weights=P.data * sq, minlength=g.n_vertices)
    else:
        acc = np.zeros_like(f)
        np.add.at(acc, rows, P.data[:, None] * sq)
    return np.sqrt(0.5 * acc)


def lp_norm(g: WeightedGraph, f, p: float) -> float | np.ndarray:
    """``(sum_x |f(x)|^p m(x))^(1/p)``; the sup norm for ``p = inf``.

    For a block ``(n, k)`` the norms of the ``k`` columns are returned.
    """
    if not p >= 1:
        raise ValueError(f"p must be >= 1, got {p!r}")
    f = as_vertex_function(g, f)
    a = np.abs(f)
    if np.isinf(p):
        return a.max(axis=0)
    m = g.m if f.ndim == 1 else g.m[:, None]
    if p == 2:
        return np.sqrt(np.sum(a * a * m, axis=0))
    if p == 1:
        return np.sum(a * m, axis=0)
    # Rescale before powering so large p cannot overflow or underflow.
    scale = a.max(axis=0)
    safe = np.where(scale > 0, scale, 1.0)
    return safe * np.sum((a / safe) ** p * m, axis=0) ** (1.0 / p) * (scale > 0)


def inner(g: WeightedGraph, f, h) -> float:
    return float(np.sum(as_vertex_function(g, f) * as_vertex_function(g, h) * g.m))


def mean_zero(g: WeightedGraph, f) -> np.ndarray:
    """Subtract the ``m``-weighted mean (column-wise for blocks)."""
    f = as_vertex_function(g, f)
    m = g.m if f.ndim == 1 else g.m[:, None]
    return f - np.sum(f * m, axis=0) / g.total_mass


# -- heat kernel ----------------------------------------------------------------------


@dataclass(frozen=True)
class HeatKernelColumn:
    """``p_k(., source)`` as a vertex function."""

    source: int
    step: int
    values: np.ndarray

    def mass(self, g: WeightedGraph) -> float:
        return float(self.values @ g.m)


def heat_column(g: WeightedGraph, y: int, k_max: int, budget: int = DEFAULT_HEAT_BUDGET) -> list[HeatKernelColumn]:
    """Columns ``p_k(., y)`` for ``k = 0, ..., k_max``.

    ``p_0(., y) = delta_y / m(y)`` and ``p_{k+1}(., y) = P p_k(., y)``.
    """
    return heat_columns_at(g, y, range(k_max + 1), budget=budget)


def heat_columns_at(g: WeightedGraph, y: int, steps, budget: int = DEFAULT_HEAT_BUDGET) -> list[HeatKernelColumn]:
    """Only the requested steps of the heat recursion (ascending order)."""
    g._check_vertex(y)
    steps = sorted({int(k) for k in steps})
    if not steps:
        return []
    if steps[0] < 0:
        raise ValueError("steps must be nonnegative")
    if steps[-1] * g.n_vertices > budget:
        raise BudgetExceededError(
            f"k_max * n_vertices = {steps[-1] * g.n_vertices} exceeds budget {budget}"
        )
    col = np.zeros(g.n_vertices)
    col[y] = 1.0 / g.m[y]
    out = []
    k = 0
    P = g.P
    for target in steps:
        while k < target:
            col = P @ col
            k += 1
        out.append(HeatKernelColumn(int(y), k, col.copy()))
    return out


def time_derivative(col_k: HeatKernelColumn, col_km1: HeatKernelColumn) -> np.ndarray:
    """``p_k(., y) - p_{k-1}(., y)``."""
    if col_k.source != col_km1.source:
        raise ValueError("heat columns have different sources")
    if col_k.step != col_km1.step + 1:
        raise ValueError(f"steps {col_km1.step} and {col_k.step} are not consecutive")
    if col_k.values.shape != col_km1.values.shape:
        raise GraphMismatchError("heat columns live on different graphs")
    return col_k.values - col_km1.values


# -- Littlewood-Paley square function ------------------------------------------------------


@dataclass(frozen=True)
class SquareFunction:
    values: np.ndarray
    n_terms: int
    tail_estimate: float
    decay_constant: float


def lp_functional(g: WeightedGraph, gamma: float, f, K: int) -> SquareFunction:
    """Discrete Littlewood-Paley-Stein functional truncated at ``k = K``.

    ``g_gamma f(x) = (sum_{k=0}^{K} (k+1)^{1-2 gamma} |Delta P^k f(x)|^2)^(1/2)``.

    The returned ``tail_estimate`` bounds the relative L^2 mass of the
    omitted terms assuming the analytic decay
    ``||Delta P^k f||_2 <= C ||f||_2 / (k + 1)`` with ``C`` the largest
    ratio observed over the computed terms.
    """
    if not 0.0 < gamma < 1.0:
        raise ValueError("gamma must lie in (0, 1)")
    if K < 0:
        raise ValueError("K must be nonnegative")
    f = as_vertex_function(g, f)
    P = g.P
    acc = np.zeros_like(f)
    h = f.copy()
    fn = np.atleast_1d(lp_norm(g, f, 2))
    fn = np.where(fn > 0, fn, 1.0)
    C = 0.0
    total = np.zeros_like(fn)
    for k in range(K + 1):
        ph = P @ h
        d = h - ph
        w = (k + 1.0) ** (1.0 - 2.0 * gamma)
        acc += w * d * d
        dn = np.atleast_1d(lp_norm(g, d, 2))
        total += w * dn * dn
        C = max(C, float(np.max((k + 1.0) * dn / fn)))
        h = ph
    # sum_{k > K} (k+1)^{1-2g} C^2/(k+1)^2 <= C^2 (K+1)^{-2g} / (2g)
    tail_sq = C * C * (K + 1.0) ** (-2.0 * gamma) / (2.0 * gamma)
    rel = np.where(total > 0, tail_sq * fn * fn / np.where(total > 0, total, 1.0), 0.0)
    tail = float(np.sqrt(rel.max()))
    return SquareFunction(np.sqrt(acc), K + 1, tail, C)


# -- text IO --------------------------------------------------------------------------------


def write_vertex_function(path, f) -> None:
    with open(path, "w") as fh:
        for v in np.asarray(f, dtype=float).ravel():
            fh.write(f"{float(v)!r}\n")


def read_vertex_function(path, g: WeightedGraph | None = None) -> np.ndarray:
    vals = np.loadtxt(path, dtype=float, ndmin=1)
    if g is not None:
        as_vertex_function(g, vals)
    return vals
