import functools

import numpy as np
import pytest

from fracriesz.fractals import lattice_box, sierpinski_level, vicsek_level
from fracriesz.graph import build_graph, lazify


@functools.lru_cache(maxsize=None)
def vicsek(level, lazy=0.5):
    g = vicsek_level(level)
    return lazify(g, lazy) if lazy else g


@functools.lru_cache(maxsize=None)
def sierpinski(level, lazy=0.5):
    g = sierpinski_level(level)
    return lazify(g, lazy) if lazy else g


@functools.lru_cache(maxsize=None)
def lattice(dim, side, lazy=0.5):
    g = lattice_box(dim, side)
    return lazify(g, lazy) if lazy else g


def triangle():
    return build_graph([(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)])


def single_edge():
    return build_graph([(0, 1, 1.0)])


def dense_P(g):
    return g.P.toarray()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance criterion -> list of (ok, detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, list[tuple[bool, str]]] = {}


def record(n: int, ok: bool, detail: str) -> None:
    ACCEPTANCE.setdefault(n, []).append((bool(ok), detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[n]
        status = "PASS" if all(ok for ok, _ in parts) else "FAIL"
        detail = "; ".join(("" if ok else "[FAIL] ") + d for ok, d in parts)
        terminalreporter.write_line(f"criterion {n:2d}: {status}  {detail}")
