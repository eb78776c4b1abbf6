"""Deterministic generators: Vicsek iterates, Sierpinski gasket iterates, grid boxes.

All generators glue copies by identifying vertices that land on the same
integer coordinate, then number vertices in lexicographic coordinate order,
so the same parameters always give a bit-identical edge list.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import CapExceededError
from .graph import WeightedGraph, build_graph

__all__ = [
    "GeneratorSpec",
    "ExpectedExponents",
    "DEFAULT_CAP",
    "generate",
    "vicsek_level",
    "sierpinski_level",
    "lattice_box",
    "vicsek_counts",
    "sierpinski_counts",
]

DEFAULT_CAP = 2_000_000
FAMILIES = ("vicsek", "sierpinski", "lattice_box")


@dataclass(frozen=True)
class GeneratorSpec:
    family: str
    level: int
    dimension: int = 2
    weight: float = 1.0
    cap: int = DEFAULT_CAP

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.level < 0:
            raise ValueError("level must be nonnegative")
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        if not self.weight > 0:
            raise ValueError("weight must be positive")

    def n_vertices(self) -> int:
        if self.family == "vicsek":
            return vicsek_counts(self.level, self.dimension)[0]
        if self.family == "sierpinski":
            return sierpinski_counts(self.level)[0]
        return self.level**self.dimension


@dataclass(frozen=True)
class ExpectedExponents:
    """Volume-growth exponent ``D`` and escape-time exponent ``beta``."""

    D_expected: float
    beta_expected: float

    def __post_init__(self):
        # Barlow's admissible range for (D, beta).
        if not 2.0 - 1e-12 <= self.beta_expected <= self.D_expected + 1.0 + 1e-12:
            raise ValueError(
                f"beta={self.beta_expected} outside [2, D+1] for D={self.D_expected}"
            )


def expected_exponents(family: str, dimension: int = 2) -> ExpectedExponents:
    if family == "vicsek":
        D = math.log(2**dimension + 1) / math.log(3)
        return ExpectedExponents(D, D + 1.0)
    if family == "sierpinski":
        return ExpectedExponents(math.log2(3), math.log2(5))
    if family == "lattice_box":
        return ExpectedExponents(float(dimension), 2.0)
    raise ValueError(f"unknown family {family!r}")


def generate(spec: GeneratorSpec) -> tuple[WeightedGraph, ExpectedExponents]:
    """Build the graph described by ``spec`` together with its exponents."""
    n = spec.n_vertices()
    if n > spec.cap:
        raise CapExceededError(f"{spec.family} level {spec.level} has {n} vertices > cap {spec.cap}")
    if spec.family == "vicsek":
        g = vicsek_level(spec.level, spec.dimension, weight=spec.weight, cap=spec.cap)
    elif spec.family == "sierpinski":
        g = sierpinski_level(spec.level, weight=spec.weight, cap=spec.cap)
    else:
        g = lattice_box(spec.dimension, spec.level, weight=spec.weight, cap=spec.cap)
    return g, expected_exponents(spec.family, spec.dimension)


# -- Vicsek -------------------------------------------------------------------------


def vicsek_counts(level: int, dim: int = 2) -> tuple[int, int]:
    """(vertices, edges) of the level-``level`` Vicsek iterate."""
    if level == 0:
        return 1, 0
    k = 2**dim + 1
    v = 2**dim + 1
    for _ in range(level - 1):
        v = k * v - 2**dim
    return v, v - 1


def vicsek_level(level: int, dim: int = 2, weight: float = 1.0, cap: int = DEFAULT_CAP) -> WeightedGraph:
    """Diagonal-cross Vicsek iterate.

    Level 1 is the star joining the origin to the ``2**dim`` diagonal
    neighbours ``(+-1, ..., +-1)``.  Level ``n + 1`` places a copy of level
    ``n`` at the origin and one copy at each diagonal offset ``2 R_n s``,
    ``s in {-1, 1}**dim``, where ``R_n = 3**(n - 1)`` is the corner
    coordinate; each outer corner of the central copy is thereby identified
    with the nearest corner of one arm copy.
    """
    if level < 0 or dim < 1:
        raise ValueError("level must be >= 0 and dim >= 1")
    n, _ = vicsek_counts(level, dim)
    if n > cap:
        raise CapExceededError(f"vicsek level {level} dim {dim} has {n} vertices > cap {cap}")
    signs = np.array(np.meshgrid(*[[-1, 1]] * dim, indexing="ij")).reshape(dim, -1).T
    if level == 0:
        coords = np.zeros((1, dim), dtype=np.int64)
        return _assemble(coords, np.zeros((0, 2), dtype=np.int64), weight, "vicsek", center=0, boundary=(0,))

    coords = np.vstack([np.zeros((1, dim), dtype=np.int64), signs])
    edges = np.column_stack([np.zeros(len(signs), dtype=np.int64), np.arange(1, len(signs) + 1)])
    radius = 1
    for _ in range(level - 1):
        offsets = np.vstack([np.zeros((1, dim), dtype=np.int64), 2 * radius * signs])
        coords, edges = _glue(coords, edges, offsets)
        radius *= 3
    corners = [tuple(radius * s) for s in signs]
    return _assemble(coords, edges, weight, "vicsek", center_coord=(0,) * dim, boundary_coords=corners)


# -- Sierpinski --------------------------------------------------------------------


def sierpinski_counts(level: int) -> tuple[int, int]:
    v = 3
    for _ in range(level):
        v = 3 * v - 3
    return v, 3 ** (level + 1)


def sierpinski_level(level: int, weight: float = 1.0, cap: int = DEFAULT_CAP) -> WeightedGraph:
    """Graphical Sierpinski gasket in triangular lattice coordinates ``(a, b)``.

    Level 0 is the triangle ``(0,0), (1,0), (0,1)``; level ``n + 1`` glues
    copies of level ``n`` shifted by ``(0,0), (2**n, 0), (0, 2**n)``, which
    identifies their corners pairwise.
    """
    if level < 0:
        raise ValueError("level must be >= 0")
    n, _ = sierpinski_counts(level)
    if n > cap:
        raise CapExceededError(f"sierpinski level {level} has {n} vertices > cap {cap}")
    coords = np.array([[0, 0], [1, 0], [0, 1]], dtype=np.int64)
    edges = np.array([[0, 1], [0, 2], [1, 2]], dtype=np.int64)
    side = 1
    for _ in range(level):
        offsets = np.array([[0, 0], [side, 0], [0, side]], dtype=np.int64)
        coords, edges = _glue(coords, edges, offsets)
        side *= 2
    corners = [(0, 0), (side, 0), (0, side)]
    # The three corners all lie at distance `side` from each other; the most
    # interior vertex is the one farthest from all of them.
    return _assemble(coords, edges, weight, "sierpinski", center_coord=None, boundary_coords=corners)


# -- grid boxes ---------------------------------------------------------------------


def lattice_box(dim: int, side: int, weight: float = 1.0, cap: int = DEFAULT_CAP) -> WeightedGraph:
    """Nearest-neighbour grid on ``{0, ..., side - 1}**dim``."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if side < 2:
        raise ValueError("side must be >= 2")
    n = side**dim
    if n > cap:
        raise CapExceededError(f"lattice box {side}^{dim} has {n} vertices > cap {cap}")
    shape = (side,) * dim
    ids = np.arange(n).reshape(shape)
    blocks = []
    for axis in range(dim):
        lo = [slice(None)] * dim
        hi = [slice(None)] * dim
        lo[axis] = slice(0, side - 1)
        hi[axis] = slice(1, side)
        blocks.append(np.column_stack([ids[tuple(lo)].ravel(), ids[tuple(hi)].ravel()]))
    edges = np.vstack(blocks)
    coords = np.array(np.unravel_index(np.arange(n), shape)).T
    on_face = np.any((coords == 0) | (coords == side - 1), axis=1)
    center = int(np.ravel_multi_index(tuple([side // 2] * dim), shape))
    return _finish(coords, edges, weight, "lattice_box", center, tuple(int(i) for i in np.flatnonzero(on_face)))


# -- helpers ------------------------------------------------------------------------


def _glue(coords: np.ndarray, edges: np.ndarray, offsets: np.ndarray):
    k = len(offsets)
    n = len(coords)
    allc = np.concatenate([coords + off for off in offsets])
    alle = np.concatenate([edges + i * n for i in range(k)])
    uniq, inverse = np.unique(allc, axis=0, return_inverse=True)
    inverse = inverse.ravel()
    e = inverse[alle]
    e = np.sort(e, axis=1)
    e = np.unique(e, axis=0)
    return uniq, e


def _assemble(coords, edges, weight, family, center=None, boundary=None, center_coord=None, boundary_coords=None):
    # Canonical numbering: lexicographic coordinate order.
    order = np.lexsort(coords.T[::-1])
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    coords = coords[order]
    edges = np.sort(rank[edges], axis=1) if len(edges) else edges
    lookup = {tuple(c): i for i, c in enumerate(coords.tolist())}
    if boundary_coords is not None:
        boundary = tuple(lookup[tuple(c)] for c in boundary_coords)
    if center_coord is not None:
        center = lookup[tuple(center_coord)]
    return _finish(coords, edges, weight, family, center, boundary or ())


def _finish(coords, edges, weight, family, center, boundary):
    n = len(coords)
    if len(edges):
        edges = edges[np.lexsort((edges[:, 1], edges[:, 0]))]
    mu = np.full(len(edges), float(weight))
    rows = np.column_stack([edges, mu]) if len(edges) else np.zeros((0, 3))
    g = build_graph(rows, n_vertices=n, coords=coords, center=center, boundary=tuple(boundary), family=family)
    if g.center is None and g.n_edges:
        # Most interior vertex: maximise the distance to the boundary set.
        dist = np.min(np.stack([g.distances_from(b) for b in g.boundary]), axis=0)
        g = replace(g, center=int(np.argmax(dist)))
    return g
