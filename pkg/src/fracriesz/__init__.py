"""Fractal graphs, fractional Laplacians and Riesz-transform experiments."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .graph import (  # noqa: F401
    BallIndex,
    WeightedGraph,
    ball,
    ball_volumes,
    build_graph,
    certify_analyticity,
    certify_nondegeneracy,
    lazify,
    read_edge_list,
    write_edge_list,
)
from .fractals import GeneratorSpec, ExpectedExponents, generate, lattice_box, sierpinski_level, vicsek_level  # noqa: F401
from .operators import apply_markov, gradient_length, heat_column, laplacian_apply, lp_norm  # noqa: F401
from .fracpow import (  # noqa: F401
    frac_power,
    frac_power_binomial,
    frac_power_chebyshev,
    frac_power_spectral,
    make_backend,
    quotient_decompose,
    spectral_decompose,
)
from .scaling import ScalingFit, escape_time, fit_escape_exponent, fit_volume_growth, verify_ue_shape  # noqa: F401
from .riesz import PhaseDiagram, WitnessFamily, failure_slope, phase_diagram, riesz_ratio, theorem_prediction  # noqa: F401
