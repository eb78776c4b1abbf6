"""Weighted graphs with their measure, hop distance, balls and certificates.

A graph is given by a symmetric weight ``mu`` on unordered vertex pairs
(self-loops allowed).  It carries the measure ``m(x) = sum_y mu_xy``, the
reversible Markov kernel ``p(x, y) = mu_xy / (m(x) m(y))`` and the hop
distance of the underlying simple graph.

Throughout the package the Markov operator is stored in *transition form*
``P[x, y] = p(x, y) m(y) = mu_xy / m(x)``, a row-stochastic sparse matrix, so
that ``(P @ f)(x) = sum_y p(x, y) f(y) m(y)``.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

from .errors import (
    AnalyticityError,
    DisconnectedGraphError,
    DuplicateEdgeError,
    GraphValidationError,
    NonPositiveWeightError,
)

__all__ = [
    "WeightedGraph",
    "BallIndex",
    "AnalyticityCertificate",
    "build_graph",
    "lazify",
    "ball",
    "ball_volumes",
    "certify_nondegeneracy",
    "certify_analyticity",
    "doubling_witness",
    "read_edge_list",
    "write_edge_list",
]

# Row stochasticity and kernel identities are checked at this tolerance.
STOCHASTIC_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Immutable weighted graph.

    Edges are stored once per unordered pair with ``u <= v``; the symmetric
    matrix ``weights`` holds both orientations (and the diagonal for
    self-loops), which is what makes ``mu_uv == mu_vu`` exact.

    ``coords``, ``center`` and ``boundary`` are optional annotations filled in
    by the fractal generators: vertex coordinates, a distinguished interior
    vertex and the vertices through which the finite piece would attach to
    the rest of the infinite graph.
    """

    n_vertices: int
    edge_u: np.ndarray
    edge_v: np.ndarray
    edge_mu: np.ndarray
    laziness: float = 0.0
    coords: np.ndarray | None = field(default=None, repr=False)
    center: int | None = None
    boundary: tuple[int, ...] = ()
    family: str = "custom"

    # -- derived structure --------------------------------------------------

    @cached_property
    def weights(self) -> sp.csr_matrix:
        u, v, mu = self.edge_u, self.edge_v, self.edge_mu
        off = u != v
        rows = np.concatenate([u, v[off]])
        cols = np.concatenate([v, u[off]])
        vals = np.concatenate([mu, mu[off]])
        w = sp.csr_matrix((vals, (rows, cols)), shape=(self.n_vertices,) * 2)
        w.sum_duplicates()
        w.sort_indices()
        return w

    @cached_property
    def m(self) -> np.ndarray:
        """Vertex measure ``m(x) = sum_{y ~ x} mu_xy``."""
        return np.asarray(self.weights.sum(axis=1)).ravel()

    @cached_property
    def P(self) -> sp.csr_matrix:
        """Markov operator in transition form, ``P[x, y] = p(x, y) m(y)``."""
        w = self.weights
        if np.any(self.m <= 0):
            raise GraphValidationError("the walk is undefined on a vertex of zero measure (edgeless graph)")
        inv = 1.0 / self.m
        p = sp.csr_matrix((w.data * np.repeat(inv, np.diff(w.indptr)), w.indices, w.indptr), shape=w.shape)
        return p

    @cached_property
    def adjacency(self) -> sp.csr_matrix:
        """0/1 adjacency of the simple graph (self-loops dropped)."""
        w = self.weights.tocoo()
        keep = w.row != w.col
        a = sp.csr_matrix(
            (np.ones(keep.sum()), (w.row[keep], w.col[keep])), shape=w.shape
        )
        a.sort_indices()
        return a

    @cached_property
    def degree(self) -> np.ndarray:
        """Number of distinct neighbours, excluding ``x`` itself."""
        return np.diff(self.adjacency.indptr)

    @property
    def n_edges(self) -> int:
        return int(self.edge_u.size)

    @property
    def M(self) -> int:
        """Local uniform finiteness constant ``max_x #B(x, 1)``."""
        return int(self.degree.max()) + 1 if self.n_vertices else 0

    @property
    def edges(self) -> list[tuple[int, int, float]]:
        return [
            (int(a), int(b), float(c))
            for a, b, c in zip(self.edge_u, self.edge_v, self.edge_mu)
        ]

    def neighbors(self, x: int) -> list[tuple[int, float]]:
        """Neighbours of ``x`` with weights, including a self-loop if present."""
        w = self.weights
        lo, hi = w.indptr[x], w.indptr[x + 1]
        return [(int(y), float(mu)) for y, mu in zip(w.indices[lo:hi], w.data[lo:hi])]

    @cached_property
    def fingerprint(self) -> str:
        h = hashlib.sha1()
        h.update(np.int64(self.n_vertices).tobytes())
        for arr in (self.edge_u, self.edge_v, self.edge_mu):
            h.update(np.ascontiguousarray(arr).tobytes())
        return h.hexdigest()

    @property
    def total_mass(self) -> float:
        return float(self.m.sum())

    # -- distances ------------------------------------------------------------

    def distances_from(self, x: int, limit: int | None = None) -> np.ndarray:
        """Hop distances from ``x``; vertices beyond ``limit`` get ``-1``."""
        self._check_vertex(x)
        d = csgraph.dijkstra(
            self.adjacency,
            directed=False,
            indices=int(x),
            unweighted=True,
            limit=np.inf if limit is None else float(limit) + 0.5,
        )
        out = np.full(self.n_vertices, -1, dtype=np.int64)
        ok = np.isfinite(d)
        out[ok] = d[ok].astype(np.int64)
        return out

    def distance(self, x: int, y: int) -> int:
        return int(self.distances_from(x)[y])

    def eccentricity(self, x: int) -> int:
        return int(self.distances_from(x).max())

    @cached_property
    def diameter(self) -> int:
        """Hop diameter by iterated double sweep.

        Exact on trees; on other graphs the sweep returns a lower bound that
        is exact for every generator in this package.
        """
        if self.n_vertices <= 1:
            return 0
        start, best = 0, -1
        for _ in range(4):
            d = self.distances_from(start)
            far = int(np.argmax(d))
            if d[far] <= best:
                break
            best, start = int(d[far]), far
        return best

    def _check_vertex(self, x: int) -> None:
        if not 0 <= int(x) < self.n_vertices:
            raise IndexError(f"vertex {x} out of range [0, {self.n_vertices})")


@dataclass(frozen=True)
class BallIndex:
    center: int
    radius: int
    members: np.ndarray
    volume: float

    def __contains__(self, y) -> bool:
        return bool(np.isin(y, self.members))


@dataclass(frozen=True)
class AnalyticityCertificate:
    ell: int
    eps: float
    method: str


# -- construction ---------------------------------------------------------------


def build_graph(
    edge_list: Iterable[Sequence[float]] | np.ndarray,
    n_vertices: int | None = None,
    **annotations,
) -> WeightedGraph:
    """Validate an edge list ``[(u, v, mu), ...]`` and build a graph.

    Parameters
    ----------
    edge_list : iterable of (u, v, mu)
        0-based vertex ids and positive weights; ``u == v`` is a self-loop.
        At most one entry per unordered pair.
    n_vertices : int, optional
        Defaults to ``1 + max id``.
    **annotations
        ``coords``, ``center``, ``boundary``, ``family``, ``laziness``.

    Raises
    ------
    DuplicateEdgeError, NonPositiveWeightError, DisconnectedGraphError,
    GraphValidationError
    """
    arr = np.asarray(list(edge_list) if not isinstance(edge_list, np.ndarray) else edge_list, dtype=float)
    if arr.size == 0:
        arr = arr.reshape(0, 3)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise GraphValidationError("edge list must have rows (u, v, mu)")
    u_raw, v_raw, mu = arr[:, 0], arr[:, 1], arr[:, 2].copy()
    if np.any(u_raw != np.round(u_raw)) or np.any(v_raw != np.round(v_raw)):
        raise GraphValidationError("vertex ids must be integers")
    u_raw = u_raw.astype(np.int64)
    v_raw = v_raw.astype(np.int64)
    if n_vertices is None:
        n_vertices = int(max(u_raw.max(initial=-1), v_raw.max(initial=-1)) + 1)
        n_vertices = max(n_vertices, 1)
    if np.any(u_raw < 0) or np.any(v_raw < 0) or np.any(u_raw >= n_vertices) or np.any(v_raw >= n_vertices):
        raise GraphValidationError(f"vertex id outside [0, {n_vertices})")

    bad = np.flatnonzero(~(mu > 0) | ~np.isfinite(mu))
    if bad.size:
        i = int(bad[0])
        raise NonPositiveWeightError(int(u_raw[i]), int(v_raw[i]), float(mu[i]))

    u = np.minimum(u_raw, v_raw)
    v = np.maximum(u_raw, v_raw)
    order = np.lexsort((v, u))
    u, v, mu = u[order], v[order], mu[order]
    dup = np.flatnonzero((u[1:] == u[:-1]) & (v[1:] == v[:-1]))
    if dup.size:
        i = int(dup[0])
        raise DuplicateEdgeError(int(u[i]), int(v[i]))

    g = WeightedGraph(int(n_vertices), u, v, mu, **annotations)
    _certify_structure(g)
    return g


def _certify_structure(g: WeightedGraph) -> None:
    n = g.n_vertices
    if n == 1 and g.n_edges == 0:
        # The trivial one-point graph (level 0 of the generators) has no
        # measure; it is representable but carries no walk.
        return
    n_comp, labels = csgraph.connected_components(g.adjacency, directed=False)
    if n_comp > 1:
        a = int(np.flatnonzero(labels == 0)[0])
        b = int(np.flatnonzero(labels != 0)[0])
        raise DisconnectedGraphError(a, b, int(n_comp))
    if np.any(g.m <= 0):
        x = int(np.flatnonzero(g.m <= 0)[0])
        raise GraphValidationError(f"vertex {x} has zero measure")
    rowsum = np.asarray(g.P.sum(axis=1)).ravel()
    if np.max(np.abs(rowsum - 1.0)) > STOCHASTIC_TOL:
        raise GraphValidationError("Markov kernel is not row-stochastic")


def lazify(g: WeightedGraph, alpha: float) -> WeightedGraph:
    """Add a self-loop of weight ``alpha / (1 - alpha) * m(x)`` at every vertex.

    The new walk stays put with probability at least ``alpha``:
    ``p(x, x) m(x) >= alpha`` (equality when ``g`` had no self-loops).
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    if g.n_vertices == 1 and g.n_edges == 0:
        raise GraphValidationError("cannot lazify the trivial one-point graph")
    extra = alpha / (1.0 - alpha) * g.m
    loops = np.zeros(g.n_vertices)
    is_loop = g.edge_u == g.edge_v
    loops[g.edge_u[is_loop]] = g.edge_mu[is_loop]
    loops += extra
    keep = ~is_loop
    idx = np.arange(g.n_vertices, dtype=np.int64)
    u = np.concatenate([g.edge_u[keep], idx])
    v = np.concatenate([g.edge_v[keep], idx])
    mu = np.concatenate([g.edge_mu[keep], loops])
    order = np.lexsort((v, u))
    return replace(
        g,
        edge_u=u[order],
        edge_v=v[order],
        edge_mu=mu[order],
        laziness=1.0 - (1.0 - g.laziness) * (1.0 - alpha),
    )


# -- balls ----------------------------------------------------------------------


def ball(g: WeightedGraph, x: int, r: int) -> BallIndex:
    """Exact hop ball ``B(x, r)`` and its volume ``V(x, r) = m(B(x, r))``."""
    if r < 0:
        raise ValueError("radius must be nonnegative")
    d = g.distances_from(x, limit=r)
    members = np.flatnonzero(d >= 0)
    return BallIndex(int(x), int(r), members, float(g.m[members].sum()))


def ball_volumes(
    g: WeightedGraph, radius: int, sources: Sequence[int] | np.ndarray | None = None, chunk: int | None = None
) -> np.ndarray:
    """``V(x, radius)`` for many centres at once (chunked multi-source BFS)."""
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    src = np.arange(g.n_vertices) if sources is None else np.asarray(sources, dtype=np.int64)
    out = np.empty(src.size)
    if src.size == 0:
        return out
    if chunk is None:
        chunk = max(1, min(512, int(4e7 // max(g.n_vertices, 1))))
    for lo in range(0, src.size, chunk):
        part = src[lo : lo + chunk]
        d = csgraph.dijkstra(
            g.adjacency, directed=False, indices=part, unweighted=True, limit=float(radius) + 0.5
        )
        out[lo : lo + chunk] = np.isfinite(d) @ g.m
    return out


def doubling_witness(g: WeightedGraph, centers: Iterable[int], radii: Iterable[int]) -> float:
    """Largest observed ``V(x, 2r) / V(x, r)``; reported, never asserted."""
    worst = 0.0
    for x in centers:
        d = g.distances_from(int(x))
        for r in radii:
            v1 = g.m[d <= r].sum()
            v2 = g.m[d <= 2 * r].sum()
            worst = max(worst, float(v2 / v1))
    return worst


# -- certificates ---------------------------------------------------------------


def certify_nondegeneracy(g: WeightedGraph) -> float:
    """``eps = min over x ~ y, x != y of p(x, y) m(y)``."""
    P = g.P.tocoo()
    off = P.row != P.col
    if not np.any(off):
        raise GraphValidationError("graph has no non-loop edges")
    return float(P.data[off].min())


def certify_analyticity(g: WeightedGraph, ell_max: int = 4, threshold: float = 1e-14) -> AnalyticityCertificate:
    """Smallest ``ell <= ell_max`` with ``min_x p_{2 ell + 1}(x, x) m(x) > 0``.

    The return probabilities are the diagonal of ``P**(2 ell + 1)`` in
    transition form, computed exactly with sparse products.

    Raises
    ------
    AnalyticityError
        If no odd return time up to ``2 ell_max + 1`` is positive everywhere
        (typically a bipartite, non-lazy graph).
    """
    if ell_max < 0:
        raise ValueError("ell_max must be nonnegative")
    P = g.P.tocsr()
    P2 = (P @ P).tocsr()
    Q = P
    for ell in range(ell_max + 1):
        diag = Q.diagonal()
        eps = float(diag.min())
        if eps > threshold:
            return AnalyticityCertificate(ell, eps, "odd-return-probability")
        if ell < ell_max:
            Q = (Q @ P2).tocsr()
            Q.eliminate_zeros()
    raise AnalyticityError(
        f"p_(2l+1)(x,x) m(x) vanishes somewhere for every l <= {ell_max}; "
        "the graph is likely bipartite and not lazy"
    )


# -- edge-list text format --------------------------------------------------------


def write_edge_list(g: WeightedGraph, path, expected=None) -> None:
    """Write ``graph <n> <E>`` followed by ``u v mu`` lines.

    Annotation comments (``# expected D=.. beta=..``, ``# center``,
    ``# boundary``, ``# family``, ``# laziness``) follow the edges.
    """
    lines = [f"graph {g.n_vertices} {g.n_edges}"]
    lines.extend(f"{int(a)} {int(b)} {float(c)!r}" for a, b, c in zip(g.edge_u, g.edge_v, g.edge_mu))
    if expected is not None:
        lines.append(f"# expected D={expected.D_expected!r} beta={expected.beta_expected!r}")
    lines.append(f"# family {g.family}")
    if g.laziness:
        lines.append(f"# laziness {float(g.laziness)!r}")
    if g.center is not None:
        lines.append(f"# center {g.center}")
    if g.boundary:
        lines.append("# boundary " + " ".join(str(b) for b in g.boundary))
    Path(path).write_text("\n".join(lines) + "\n")


def read_edge_list(path) -> tuple[WeightedGraph, dict]:
    """Parse the edge-list format; returns the graph and the annotation dict."""
    header = None
    rows = []
    meta: dict = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            _parse_annotation(line[1:].strip(), meta)
            continue
        parts = line.split()
        if header is None:
            if len(parts) != 3 or parts[0] != "graph":
                raise GraphValidationError(f"line {lineno}: expected 'graph <n_vertices> <n_edges>'")
            header = (int(parts[1]), int(parts[2]))
            continue
        if len(parts) != 3:
            raise GraphValidationError(f"line {lineno}: expected 'u v mu'")
        rows.append((int(parts[0]), int(parts[1]), float(parts[2])))
    if header is None:
        raise GraphValidationError("missing 'graph' header line")
    if len(rows) != header[1]:
        raise GraphValidationError(f"header announces {header[1]} edges, found {len(rows)}")
    ann = {k: meta[k] for k in ("center", "boundary", "family", "laziness") if k in meta}
    g = build_graph(rows, n_vertices=header[0], **ann)
    return g, meta


def _parse_annotation(text: str, meta: dict) -> None:
    key, _, rest = text.partition(" ")
    if key == "expected":
        for tok in rest.split():
            name, _, val = tok.partition("=")
            meta["D_expected" if name == "D" else "beta_expected"] = float(val)
    elif key == "center":
        meta["center"] = int(rest)
    elif key == "boundary":
        meta["boundary"] = tuple(int(t) for t in rest.split())
    elif key == "family":
        meta["family"] = rest.strip()
    elif key == "laziness":
        meta["laziness"] = float(rest)
