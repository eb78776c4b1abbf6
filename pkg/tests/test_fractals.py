import math
from itertools import product

import numpy as np
import pytest

from fracriesz.errors import CapExceededError
from fracriesz.fractals import (
    GeneratorSpec,
    expected_exponents,
    generate,
    lattice_box,
    sierpinski_counts,
    sierpinski_level,
    vicsek_counts,
    vicsek_level,
)
from fracriesz.graph import build_graph


def vicsek_oracle(level):
    # Keep the 3^(n-1) x 3^(n-1) cells whose base-3 digit pairs all lie in the
    # X pattern; each kept cell is a star from its center to its 4 corners.
    side = 3 ** (level - 1)
    pattern = {(0, 0), (0, 2), (2, 0), (2, 2), (1, 1)}
    edges = set()
    for i, j in product(range(side), repeat=2):
        a, b, ok = i, j, True
        for _ in range(level - 1):
            if (a % 3, b % 3) not in pattern:
                ok = False
                break
            a, b = a // 3, b // 3
        if not ok:
            continue
        c = (2 * i + 1, 2 * j + 1)
        for dx, dy in product((0, 2), repeat=2):
            edges.add((c, (2 * i + dx, 2 * j + dy)))
    return _relabel(edges)


def sierpinski_oracle(level):
    # Up-triangles of side 1 at (i, j) survive iff i & j == 0 (Pascal mod 2).
    s = 2**level
    edges = set()
    for i in range(s):
        for j in range(s - i):
            if i & j:
                continue
            a, b, c = (i, j), (i + 1, j), (i, j + 1)
            edges |= {tuple(sorted(e)) for e in ((a, b), (b, c), (a, c))}
    return _relabel(edges)


def _relabel(edges):
    pts = sorted({p for e in edges for p in e})
    idx = {p: k for k, p in enumerate(pts)}
    return build_graph([(idx[a], idx[b], 1.0) for a, b in edges])


def _invariants(g):
    deg = np.asarray(g.adjacency.sum(axis=1)).ravel()
    return g.n_vertices, g.n_edges, tuple(np.bincount(deg.astype(int))), g.diameter


@pytest.mark.parametrize("level", [1, 2, 3, 4])
def test_vicsek_matches_oracle(level):
    assert _invariants(vicsek_level(level)) == _invariants(vicsek_oracle(level))


@pytest.mark.parametrize("level", [0, 1, 2, 3, 4])
def test_sierpinski_matches_oracle(level):
    assert _invariants(sierpinski_level(level)) == _invariants(sierpinski_oracle(level))


def test_vicsek_small_levels():
    g0 = vicsek_level(0)
    assert g0.n_vertices == 1 and g0.n_edges == 0
    g1 = vicsek_level(1)
    assert g1.n_vertices == 5 and g1.n_edges == 4
    deg = np.asarray(g1.adjacency.sum(axis=1)).ravel()
    assert sorted(deg) == [1, 1, 1, 1, 4]


@pytest.mark.parametrize("level", range(1, 6))
def test_vicsek_is_tree_with_counts(level):
    g = vicsek_level(level)
    assert g.n_edges == g.n_vertices - 1
    assert (g.n_vertices, g.n_edges) == vicsek_counts(level)


def test_vicsek_diameter_triples_per_level():
    diams = [vicsek_level(n).diameter for n in range(1, 6)]
    assert diams == [2 * 3 ** (n - 1) for n in range(1, 6)]
    assert all(math.log(b / a, 3) == pytest.approx(1.0) for a, b in zip(diams, diams[1:]))


def test_sierpinski_small_levels():
    g0 = sierpinski_level(0)
    assert (g0.n_vertices, g0.n_edges) == (3, 3)
    g1 = sierpinski_level(1)
    assert (g1.n_vertices, g1.n_edges) == (6, 9)


def test_sierpinski_recursion_and_degree():
    v = [sierpinski_level(n).n_vertices for n in range(0, 6)]
    assert all(b == 3 * a - 3 for a, b in zip(v, v[1:]))
    for n in range(1, 5):
        g = sierpinski_level(n)
        assert g.adjacency.sum(axis=1).max() <= 4
        assert g.M <= 5
        assert (g.n_vertices, g.n_edges) == sierpinski_counts(n)


def test_lattice_box_counts():
    g = lattice_box(1, 3)
    assert g.n_vertices == 3 and g.n_edges == 2 and g.diameter == 2
    g = lattice_box(2, 3)
    assert (g.n_vertices, g.n_edges) == (9, 12)
    for s in (2, 5, 11):
        assert lattice_box(2, s).n_edges == 2 * s * (s - 1)
    assert lattice_box(3, 4).n_edges == 3 * 16 * 3


def test_expected_exponents():
    v = expected_exponents("vicsek")
    assert v.D_expected == pytest.approx(1.46497, abs=1e-5)
    assert v.beta_expected == pytest.approx(2.46497, abs=1e-5)
    s = expected_exponents("sierpinski")
    assert s.D_expected == pytest.approx(1.58496, abs=1e-5)
    assert s.beta_expected == pytest.approx(2.32193, abs=1e-5)
    lat = expected_exponents("lattice_box", 3)
    assert (lat.D_expected, lat.beta_expected) == (3.0, 2.0)


def test_generate_deterministic_and_capped():
    a, _ = generate(GeneratorSpec("sierpinski", 4))
    b, _ = generate(GeneratorSpec("sierpinski", 4))
    assert a.fingerprint == b.fingerprint
    assert np.array_equal(a.edge_u, b.edge_u) and np.array_equal(a.edge_mu, b.edge_mu)
    with pytest.raises(CapExceededError):
        generate(GeneratorSpec("vicsek", 8, cap=10_000))


def test_generate_weight_and_annotations():
    g, _ = generate(GeneratorSpec("vicsek", 3, weight=2.5))
    assert np.all(g.edge_mu == 2.5)
    assert g.center is not None and len(g.boundary) > 0
    assert g.family == "vicsek"


def test_generators_connected():
    for g in (vicsek_level(4), sierpinski_level(5), lattice_box(3, 5)):
        assert np.all(g.distances_from(0) >= 0)
