"""Witness functions, Riesz ratios, Poincare checks and the (1/p, gamma) phase diagram.

Two inequalities are probed on families of witnesses ``f_s`` indexed by a
scale ``s``:

* ``R``   ``||grad f||_p <= C ||Delta^gamma f||_p``
* ``RR``  ``||Delta^gamma f||_p <= C ||grad f||_p``

A family certifies failure of one of them when the corresponding ratio
grows like a positive power of ``s``.  Both directions come from the same
pair of norms.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import DegenerateRatioError, FitError, WitnessError
from .fracpow import PowerBackend, make_backend
from .graph import BallIndex, WeightedGraph, ball, certify_nondegeneracy
from .operators import as_vertex_function, gradient_length, heat_columns_at, lp_functional, lp_norm, mean_zero
from .scaling import ScalingFit, fit_power_law

__all__ = [
    "WITNESS_KINDS",
    "WitnessFamily",
    "WitnessSet",
    "HeatCutoffWitness",
    "PhaseThresholds",
    "PhaseRow",
    "PhaseDiagram",
    "PoincareCheck",
    "boundary_distance",
    "tent_witness",
    "heat_cutoff_witness",
    "heat_cutoff_ratios",
    "eigenmode_witness",
    "random_witness",
    "default_scales",
    "ratio_norms",
    "riesz_ratio",
    "failure_slope",
    "check_poincare",
    "fit_poincare_exponent",
    "check_p_inf_1",
    "check_ball_inequality",
    "ball_inequality_sweep",
    "theorem_prediction",
    "phase_diagram",
    "contradictions",
]

WITNESS_KINDS = ("tent", "heat_cutoff", "random_mean_zero", "eigenmode_band")
DEGENERATE_FLOOR = 1e-12
# log-ratio spreads below this are round-off; such fits are reported as exactly flat
FLAT_TOL = 1e-10


# -- witnesses -------------------------------------------------------------------------------------


def boundary_distance(g: WeightedGraph, x: int) -> int:
    """Hop distance from ``x`` to the nearest marked boundary vertex."""
    if not g.boundary:
        return g.eccentricity(x)
    d = g.distances_from(int(x))
    return int(min(d[b] for b in g.boundary))


def _check_interior(g: WeightedGraph, x: int, support_radius: float, scale: float) -> None:
    room = boundary_distance(g, x)
    if support_radius + scale / 2.0 > room:
        raise WitnessError(
            f"support radius {support_radius} plus margin {scale / 2.0:g} exceeds the "
            f"distance {room} from vertex {x} to the boundary"
        )


def tent_witness(g: WeightedGraph, x0: int, r: int, check: bool = True) -> np.ndarray:
    """``f_r(x) = max(0, r - d(x0, x))``."""
    if r < 1:
        raise ValueError("tent radius must be >= 1")
    if check:
        _check_interior(g, x0, r - 1, r)
    d = g.distances_from(int(x0), limit=int(r))
    return np.where(d >= 0, r - d, 0).astype(float)


@dataclass(frozen=True)
class HeatCutoffWitness:
    values: np.ndarray
    step: int
    threshold: float
    support_radius: int
    volume: float         # V(y, k^{1/beta})


def heat_cutoff_witness(g: WeightedGraph, y: int, k: int, beta: float, column: np.ndarray | None = None,
                        check: bool = True) -> HeatCutoffWitness:
    """``f_k(x) = max(0, p_k(x, y) - 1 / (k V(y, k^{1/beta})))``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if column is None:
        column = heat_columns_at(g, y, [k])[0].values
    d = g.distances_from(int(y))
    R = int(math.floor(k ** (1.0 / beta)))
    V = float(g.m[d <= R].sum())
    thr = 1.0 / (k * V)
    f = np.maximum(column - thr, 0.0)
    supp = np.flatnonzero(f > 0)
    rk = int(d[supp].max()) if supp.size else 0
    if check:
        _check_interior(g, y, rk, k ** (1.0 / beta))
    return HeatCutoffWitness(f, int(k), thr, rk, V)


def heat_cutoff_ratios(g: WeightedGraph, y: int, ks, beta: float) -> dict[str, np.ndarray]:
    """The three scale-free quantities that should stay bounded in ``k``.

    ``support``   ``r_k / (k^{1/beta} log(k)^{(beta-1)/beta})``
    ``mass``      ``||f_k||_2^2 V(y, k^{1/beta})``
    ``gradient``  ``k ||grad f_k||_2^2 / ||f_k||_2^2``
    """
    ks = sorted({int(k) for k in ks})
    cols = heat_columns_at(g, y, ks)
    out = {"k": np.array(ks, dtype=float), "support": [], "mass": [], "gradient": []}
    for c in cols:
        w = heat_cutoff_witness(g, y, c.step, beta, column=c.values, check=False)
        k = c.step
        n2 = float(lp_norm(g, w.values, 2)) ** 2
        if n2 == 0:
            raise WitnessError(f"heat cutoff at k={k} vanishes identically")
        out["support"].append(w.support_radius / (k ** (1.0 / beta) * math.log(k) ** ((beta - 1.0) / beta)))
        out["mass"].append(n2 * w.volume)
        out["gradient"].append(k * float(lp_norm(g, gradient_length(g, w.values), 2)) ** 2 / n2)
    return {key: np.asarray(v, dtype=float) for key, v in out.items()}


def eigenmode_witness(g: WeightedGraph, x0: int, r: int, band: int = 0, check: bool = True) -> np.ndarray:
    """Dirichlet eigenfunction number ``band`` of ``Delta`` on ``B(x0, r)``.

    Zero outside the ball; the ground state (``band = 0``) is taken positive.
    Its eigenvalue sits at the bottom of the spectrum at scale ``r``.
    """
    if check:
        _check_interior(g, x0, r, r)
    d = g.distances_from(int(x0), limit=int(r))
    B = np.flatnonzero(d >= 0)
    if band >= B.size:
        raise WitnessError(f"ball of {B.size} vertices has no Dirichlet mode {band}")
    s = 1.0 / np.sqrt(g.m[B])
    W = g.weights[B][:, B]
    L = sp.identity(B.size) - sp.diags(s) @ W @ sp.diags(s)
    if B.size <= 200:
        lam, U = np.linalg.eigh(L.toarray())
        u = U[:, band]
    else:
        lam, U = spla.eigsh(L.tocsc(), k=band + 1, sigma=-1e-6, which="LM")
        u = U[:, np.argsort(lam)[band]]
    v = u * s
    i = int(np.argmax(np.abs(v)))
    v = v * np.sign(v[i]) / abs(v[i])
    f = np.zeros(g.n_vertices)
    f[B] = v
    return f


def random_witness(g: WeightedGraph, x0: int, r: int, seed: int = 0, check: bool = True) -> np.ndarray:
    """Gaussian noise on ``B(x0, r)`` with its ``m``-weighted mean removed inside the ball."""
    if check:
        _check_interior(g, x0, r, r)
    d = g.distances_from(int(x0), limit=int(r))
    B = np.flatnonzero(d >= 0)
    rng = np.random.default_rng([int(seed), int(x0), int(r)])
    v = rng.standard_normal(B.size)
    v -= np.sum(v * g.m[B]) / g.m[B].sum()
    f = np.zeros(g.n_vertices)
    f[B] = v
    return f


@dataclass(frozen=True)
class WitnessSet:
    """Realised witnesses: columns of ``F`` ordered by increasing ``fit_scale``."""

    kind: str
    scales: tuple[int, ...]
    fit_scale: np.ndarray
    F: np.ndarray


@dataclass(frozen=True)
class WitnessFamily:
    """A witness kind anchored at a vertex, with a list of integer scales.

    Scales are radii except for ``heat_cutoff`` where they are times ``k``;
    slopes are always fitted against a radius-type scale (``k^{1/beta}``
    for heat cutoffs) so that families are comparable.
    """

    kind: str
    anchor: int
    scales: tuple[int, ...]
    beta: float = 2.0
    band: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in WITNESS_KINDS:
            raise ValueError(f"unknown witness kind {self.kind!r}; expected one of {WITNESS_KINDS}")
        s = tuple(int(v) for v in self.scales)
        if any(b <= a for a, b in zip(s, s[1:])) or (s and s[0] < 1):
            raise ValueError("scales must be positive and strictly increasing")
        object.__setattr__(self, "scales", s)

    def realize(self, g: WeightedGraph) -> WitnessSet:
        x = self.anchor
        if self.kind == "tent":
            cols = [tent_witness(g, x, r) for r in self.scales]
            fs = np.array(self.scales, dtype=float)
        elif self.kind == "eigenmode_band":
            cols = [eigenmode_witness(g, x, r, self.band) for r in self.scales]
            fs = np.array(self.scales, dtype=float)
        elif self.kind == "random_mean_zero":
            cols = [random_witness(g, x, r, self.seed) for r in self.scales]
            fs = np.array(self.scales, dtype=float)
        else:
            heat = heat_columns_at(g, x, self.scales)
            cols = [heat_cutoff_witness(g, x, c.step, self.beta, column=c.values).values for c in heat]
            fs = np.array(self.scales, dtype=float) ** (1.0 / self.beta)
        return WitnessSet(self.kind, self.scales, fs, np.column_stack(cols))


def default_scales(g: WeightedGraph, kind: str, anchor: int, beta: float, n: int = 8) -> tuple[int, ...]:
    """Geometric scales up to the largest one that keeps the witness interior.

    Radius families use ``r`` in ``[3, 2 room / 3]`` (``room`` = distance to
    the boundary; the lower end drops to 1 on very small graphs).  Heat
    cutoffs use ``k`` from 8 (1 on small graphs) up to the largest time in a
    geometric candidate list whose realised witness is still interior.
    """
    room = boundary_distance(g, anchor)
    if kind == "heat_cutoff":
        # support radius is a few times k^{1/beta}, so (room/2)^beta is ample
        k_hi = max(int((room / 2.0) ** beta), 16)
        cand = np.unique(np.round(np.geomspace(1, k_hi, 48)).astype(int))
        cols = heat_columns_at(g, anchor, cand)
        best = None
        for c in cols:
            try:
                heat_cutoff_witness(g, anchor, c.step, beta, column=c.values)
            except WitnessError:
                break
            best = c.step
        if best is None:
            raise WitnessError("no heat-cutoff witness fits inside the graph")
        k_lo = 8 if best >= 64 else 1
        ks = np.unique(np.round(np.geomspace(k_lo, best, n)).astype(int))
        return tuple(int(k) for k in ks)
    hi = (2 * room) // 3
    if hi < 4:
        raise WitnessError(f"anchor {anchor} is too close to the boundary for {kind} witnesses")
    lo = min(3, max(1, hi // 4))
    r = np.unique(np.round(np.geomspace(lo, hi, n)).astype(int))
    return tuple(int(v) for v in r)


# -- ratios ----------------------------------------------------------------------------------------------


def _norms(g: WeightedGraph, F: np.ndarray, p: float) -> np.ndarray:
    return np.atleast_1d(lp_norm(g, F, p))


def ratio_norms(g: WeightedGraph, F: np.ndarray, ps, gammas, backend: PowerBackend):
    """``(num, den)``: ``num[i, j, s] = ||Delta^{gamma_i} f0_s||_{p_j}``, ``den[j, s] = ||grad f_s||_{p_j}``.

    ``f0`` is the mean-zero projection of the witness.
    """
    F = np.atleast_2d(np.asarray(F, dtype=float).T).T
    F0 = mean_zero(g, F)
    G = gradient_length(g, F0)
    powers = backend.apply(list(gammas), F0)
    num = np.array([[_norms(g, powers[float(gm)], p) for p in ps] for gm in gammas])
    den = np.array([_norms(g, G, p) for p in ps])
    return num, den


def riesz_ratio(g: WeightedGraph, f, p: float, gamma: float, method: str = "spectral",
                backend: PowerBackend | None = None, tol: float = 1e-10, K: int = 2000,
                floor: float = DEGENERATE_FLOOR) -> float:
    """``||grad f||_p / ||Delta^gamma f0||_p`` (the R-direction ratio).

    ``method = "lp_functional"`` replaces ``||Delta^gamma f0||_p`` by the
    norm of the discrete square function truncated at ``K``; the two are
    comparable up to constants only.

    Raises
    ------
    DegenerateRatioError
        If the denominator is below ``floor * ||f0||_p``.
    """
    f = as_vertex_function(g, f)
    f0 = mean_zero(g, f)
    scale = float(lp_norm(g, f0, p))
    if method == "lp_functional":
        den = float(lp_norm(g, lp_functional(g, gamma, f0, K).values, p))
    else:
        backend = backend or make_backend(g, method, tol=tol)
        den = float(lp_norm(g, backend.apply([gamma], f0)[float(gamma)], p))
    if not den > floor * scale or scale == 0.0:
        raise DegenerateRatioError(f"||Delta^{gamma} f||_{p} = {den:.3e} below the degeneracy floor")
    return float(lp_norm(g, gradient_length(g, f0), p)) / den


def failure_slope(g: WeightedGraph, family: WitnessFamily, p: float, gamma: float,
                  backend: PowerBackend | None = None, method: str = "auto", tol: float = 1e-10,
                  floor: float = DEGENERATE_FLOOR) -> ScalingFit:
    """Power-law fit of ``||Delta^gamma f||_p / ||grad f||_p`` against scale.

    A positive exponent witnesses unboundedness of the reverse inequality
    along this family.
    """
    ws = family.realize(g)
    backend = backend or make_backend(g, method, tol=tol)
    num, den = ratio_norms(g, ws.F, [p], [gamma], backend)
    num, den = num[0, 0], den[0]
    scale = _norms(g, mean_zero(g, ws.F), p)
    if np.any(num <= floor * scale) or np.any(den <= floor * scale):
        bad = [s for s, a, b, c in zip(ws.scales, num, den, scale) if a <= floor * c or b <= floor * c]
        raise DegenerateRatioError(f"degenerate ratio at scales {bad} for {family.kind}")
    return fit_power_law(ws.fit_scale, num / den)


# -- Poincare and ball inequalities ------------------------------------------------------------------------


@dataclass(frozen=True)
class PoincareCheck:
    lhs: float
    rhs: float
    ratio: float


def _support_in(f: np.ndarray, B: BallIndex) -> None:
    outside = np.ones(f.size, dtype=bool)
    outside[B.members] = False
    if np.any(f[outside] != 0):
        raise ValueError(f"function is not supported in the ball B({B.center}, {B.radius})")


def check_poincare(g: WeightedGraph, B: BallIndex, f, p: float, alpha: float) -> PoincareCheck:
    """``||f||_{L^p(B)}``, ``r^alpha ||grad f||_{L^p(B)}`` and their ratio.

    ``alpha`` is the raw exponent of ``r``; no normalisation is implied.
    """
    f = as_vertex_function(g, f)
    _support_in(f, B)
    mB = np.zeros(g.n_vertices, dtype=bool)
    mB[B.members] = True
    lhs = float(lp_norm(g, np.where(mB, f, 0.0), p))
    grad = gradient_length(g, f)
    rhs = float(max(B.radius, 1) ** alpha * lp_norm(g, np.where(mB, grad, 0.0), p))
    return PoincareCheck(lhs, rhs, lhs / rhs if rhs > 0 else math.inf)


def fit_poincare_exponent(g: WeightedGraph, anchor: int, radii, p: float = 2.0, kind: str = "eigenmode_band") -> ScalingFit:
    """Slope of ``log(||f_r||_p / ||grad f_r||_p)`` against ``log r``.

    This is the smallest raw ``alpha`` for which ``check_poincare`` stays
    bounded along the family.  With the Dirichlet ground state and
    ``p = 2`` twice the slope is the Faber-Krahn exponent, i.e. the walk
    dimension.
    """
    vals = []
    radii = sorted({int(r) for r in radii})
    for r in radii:
        if kind == "tent":
            f = tent_witness(g, anchor, r)
        elif kind == "eigenmode_band":
            f = eigenmode_witness(g, anchor, r)
        else:
            raise ValueError("Poincare sweep supports tent and eigenmode_band witnesses")
        c = check_poincare(g, ball(g, anchor, r), f, p, 0.0)
        vals.append(c.ratio)
    return fit_power_law(radii, vals)


def check_p_inf_1(g: WeightedGraph, f, r: int, eps: float | None = None) -> tuple[float, float]:
    """``(||f||_inf, 2 r (2/eps)^{1/2} ||grad f||_inf)``; the first must not exceed the second."""
    f = as_vertex_function(g, f)
    eps = certify_nondegeneracy(g) if eps is None else eps
    lhs = float(np.max(np.abs(f)))
    rhs = float(2.0 * r * math.sqrt(2.0 / eps) * np.max(gradient_length(g, f)))
    return lhs, rhs


def check_ball_inequality(g: WeightedGraph, B: BallIndex, f, p: float, alpha: float, beta: float,
                          backend: PowerBackend | None = None, floor: float = DEGENERATE_FLOOR) -> float:
    """``||f||_p / (r^{alpha beta} ||Delta^alpha f||_p)`` for ``f`` supported in ``B``."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    f = as_vertex_function(g, f)
    _support_in(f, B)
    if alpha == 0.0:
        return 1.0
    backend = backend or make_backend(g)
    h = backend.apply([alpha], f)[float(alpha)]
    fn = float(lp_norm(g, f, p))
    den = float(lp_norm(g, h, p))
    if not den > floor * fn:
        raise DegenerateRatioError("ball inequality denominator below the degeneracy floor")
    return fn / (max(B.radius, 1) ** (alpha * beta) * den)


def ball_inequality_sweep(g: WeightedGraph, anchor: int, radii, p: float, alpha: float, beta: float,
                          kind: str = "eigenmode_band", backend: PowerBackend | None = None) -> ScalingFit:
    """Fit of the ball-inequality ratio across radii; bounded means slope <= 0 up to noise."""
    backend = backend or make_backend(g)
    vals = []
    radii = sorted({int(r) for r in radii})
    for r in radii:
        f = tent_witness(g, anchor, r) if kind == "tent" else eigenmode_witness(g, anchor, r)
        vals.append(check_ball_inequality(g, ball(g, anchor, r), f, p, alpha, beta, backend))
    return fit_power_law(radii, vals)


# -- predictions --------------------------------------------------------------------------------------------


def theorem_prediction(p: float, gamma: float, beta: float) -> dict[str, str]:
    """Predicted status (``holds``, ``fails`` or ``unknown``) of R and RR.

    For a graph with escape exponent ``beta`` (and the usual doubling and
    sub-Gaussian hypotheses):

    * R holds for ``gamma <= min(1/2, 1/p)``; it fails for
      ``gamma > max(min(1/p, 1 - 1/beta), 1/beta + (1/p)(1 - 2/beta))``.
    * RR holds for ``gamma >= max(1/2, 1/p)``; it fails for
      ``gamma < min(max(1/p, 1/beta), 1/beta + (1/p)(1 - 2/beta))``.
    """
    q = 1.0 / p
    mid = 1.0 / beta + q * (1.0 - 2.0 / beta)
    eps = 1e-12
    if gamma <= min(0.5, q) + eps:
        r = "holds"
    elif gamma > max(min(q, 1.0 - 1.0 / beta), mid) + eps:
        r = "fails"
    else:
        r = "unknown"
    if gamma >= max(0.5, q) - eps:
        rr = "holds"
    elif gamma < min(max(q, 1.0 / beta), mid) - eps:
        rr = "fails"
    else:
        rr = "unknown"
    return {"R": r, "RR": rr}


# -- phase diagram ------------------------------------------------------------------------------------------


@dataclass(frozen=True)
class PhaseThresholds:
    slope_min: float = 0.1
    slope_eps: float = 0.05
    residual_max: float = 0.25
    min_scales: int = 4


@dataclass(frozen=True)
class PhaseRow:
    p: float
    gamma: float
    direction: str          # "R" or "RR"
    family: str             # witness kind, or "all" for the cell verdict
    slope: float
    residual: float
    classification: str     # bounded | growing | inconclusive


@dataclass
class PhaseDiagram:
    rows: list[PhaseRow]
    families: tuple[str, ...]
    backend: str
    thresholds: PhaseThresholds = field(default_factory=PhaseThresholds)

    def cell(self, p: float, gamma: float, direction: str, family: str = "all") -> PhaseRow:
        for r in self.rows:
            if (math.isclose(r.p, p) and math.isclose(r.gamma, gamma)
                    and r.direction == direction and r.family == family):
                return r
        raise KeyError((p, gamma, direction, family))

    def verdicts(self) -> list[PhaseRow]:
        return [r for r in self.rows if r.family == "all"]

    def to_csv(self, path=None) -> str:
        lines = ["p,gamma,direction,family,slope,residual,classification"]
        for r in self.rows:
            lines.append(
                f"{_fmt(r.p)},{_fmt(r.gamma)},{r.direction},{r.family},"
                f"{_fmt(r.slope)},{_fmt(r.residual)},{r.classification}"
            )
        text = "\n".join(lines) + "\n"
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text


def _fmt(x: float) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "nan"
    return f"{x:.12g}"


def _classify(slope: float, residual: float, th: PhaseThresholds) -> str:
    if math.isnan(slope):
        return "inconclusive"
    if slope >= th.slope_min and residual <= th.residual_max:
        return "growing"
    if abs(slope) <= th.slope_eps:
        return "bounded"
    return "inconclusive"


def _family_slopes(g, family: WitnessFamily, ps, gammas, backend, floor):
    """RR-direction slopes and residuals, arrays of shape (len(gammas), len(ps))."""
    ws = family.realize(g)
    num, den = ratio_norms(g, ws.F, ps, gammas, backend)
    slopes = np.full((len(gammas), len(ps)), np.nan)
    resid = np.full_like(slopes, np.nan)
    lx = np.log(ws.fit_scale)
    for j, p in enumerate(ps):
        scale = _norms(g, mean_zero(g, ws.F), p)
        for i in range(len(gammas)):
            a, b = num[i, j], den[j]
            if np.any(a <= floor * scale) or np.any(b <= floor * scale):
                continue
            ly = np.log(a / b)
            if np.ptp(ly) <= FLAT_TOL:
                slopes[i, j] = resid[i, j] = 0.0
                continue
            c1, c0 = np.polyfit(lx, ly, 1)
            slopes[i, j] = c1
            resid[i, j] = float(np.max(np.abs(ly - (c0 + c1 * lx))))
    return slopes, resid


def phase_diagram(g: WeightedGraph, p_grid, gamma_grid, families, backend: PowerBackend | None = None,
                  thresholds: PhaseThresholds | None = None, threads: int = 1,
                  floor: float = DEGENERATE_FLOOR) -> PhaseDiagram:
    """Classify every ``(p, gamma)`` cell in both directions.

    ``families`` is a list of :class:`WitnessFamily`.  Per family and
    direction a cell is ``growing`` when the slope is at least
    ``slope_min`` with fit residual at most ``residual_max``, ``bounded``
    when ``|slope| <= slope_eps`` and ``inconclusive`` otherwise (including
    degenerate ratios).  The cell verdict (family ``all``) is growing if any
    family grows, bounded if every family is bounded, else inconclusive; its
    slope is the largest family slope.
    """
    th = thresholds or PhaseThresholds()
    ps = [float(p) for p in p_grid]
    gammas = [float(x) for x in gamma_grid]
    for fam in families:
        if len(fam.scales) < th.min_scales:
            raise FitError(f"{fam.kind} family has {len(fam.scales)} scales; need {th.min_scales}")
    backend = backend or make_backend(g)

    def work(fam):
        return _family_slopes(g, fam, ps, gammas, backend, floor)

    if threads > 1 and len(families) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(work, families))
        # map preserves submission order, so the output is thread-count independent
    else:
        results = [work(f) for f in families]

    rows: list[PhaseRow] = []
    for j, p in enumerate(ps):
        for i, gm in enumerate(gammas):
            for direction, sign in (("R", -1.0), ("RR", 1.0)):
                fam_rows = []
                for fam, (sl, rs) in zip(families, results):
                    s = sign * sl[i, j]
                    fam_rows.append(PhaseRow(p, gm, direction, fam.kind, float(s), float(rs[i, j]),
                                             _classify(float(s), float(rs[i, j]), th)))
                classes = [r.classification for r in fam_rows]
                if "growing" in classes:
                    verdict = "growing"
                elif all(c == "bounded" for c in classes):
                    verdict = "bounded"
                else:
                    verdict = "inconclusive"
                finite = [r for r in fam_rows if not math.isnan(r.slope)]
                worst = max(finite, key=lambda r: r.slope) if finite else None
                rows.extend(fam_rows)
                rows.append(PhaseRow(p, gm, direction, "all",
                                     worst.slope if worst else math.nan,
                                     worst.residual if worst else math.nan, verdict))
    return PhaseDiagram(rows, tuple(f.kind for f in families), backend.name, th)


def contradictions(pd: PhaseDiagram, beta: float) -> list[tuple[PhaseRow, str]]:
    """Cells whose verdict contradicts :func:`theorem_prediction`.

    A contradiction is a predicted-holds cell classified growing, or a
    predicted-fails cell classified bounded.
    """
    bad = []
    for r in pd.verdicts():
        pred = theorem_prediction(r.p, r.gamma, beta)[r.direction]
        if (pred == "holds" and r.classification == "growing") or (pred == "fails" and r.classification == "bounded"):
            bad.append((r, pred))
    return bad
