"""Figures for scaling fits and phase diagrams, plus a gnuplot script emitter."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .riesz import PhaseDiagram  # noqa: E402
from .scaling import ScalingFit  # noqa: E402

__all__ = ["theory_boundaries", "plot_phase_diagram", "plot_scaling_fits", "gnuplot_script"]

_COLORS = {"growing": "tab:red", "bounded": "tab:green", "inconclusive": "tab:gray"}
_METADATA = {"Software": None}  # keep PNG bytes independent of the matplotlib version string


def theory_boundaries(beta: float, n: int = 201) -> dict[str, tuple[np.ndarray, np.ndarray]]:
    """Region boundaries in the ``(1/p, gamma)`` plane for escape exponent ``beta``."""
    q = np.linspace(0.0, 1.0, n)
    mid = 1.0 / beta + q * (1.0 - 2.0 / beta)
    return {
        "R holds below": (q, np.minimum(0.5, q)),
        "R fails above": (q, np.maximum(np.minimum(q, 1.0 - 1.0 / beta), mid)),
        "RR holds above": (q, np.maximum(0.5, q)),
        "RR fails below": (q, np.minimum(np.maximum(q, 1.0 / beta), mid)),
    }


def plot_phase_diagram(pd: PhaseDiagram, beta: float, path) -> None:
    """Two panels (R, RR): cell verdicts over the theoretical boundaries."""
    bounds = theory_boundaries(beta)
    fig, axes = plt.subplots(1, 2, figsize=(10, 4.5), sharey=True)
    for ax, direction in zip(axes, ("R", "RR")):
        for label, (q, y) in bounds.items():
            if label.startswith(direction + " "):
                ax.plot(q, y, "-" if "holds" in label else "--", color="k", lw=1, label=label)
        rows = [r for r in pd.verdicts() if r.direction == direction]
        for cls, color in _COLORS.items():
            sel = [r for r in rows if r.classification == cls]
            if sel:
                ax.scatter([1.0 / r.p for r in sel], [r.gamma for r in sel], c=color, s=40, label=cls,
                           edgecolors="k", linewidths=0.3)
        ax.set_xlim(0, 1)
        ax.set_ylim(0, 1)
        ax.set_xlabel("1/p")
        ax.set_title(f"{direction} (beta = {beta:.3f})")
        ax.legend(fontsize=7, loc="lower right")
    axes[0].set_ylabel("gamma")
    fig.tight_layout()
    fig.savefig(path, format="png", dpi=100, metadata=_METADATA)
    plt.close(fig)


def plot_scaling_fits(fits: dict[str, ScalingFit], path, expected: dict[str, float] | None = None) -> None:
    """One log-log panel per fit with the fitted line and, if given, the expected slope."""
    expected = expected or {}
    names = list(fits)
    if not names:
        return
    fig, axes = plt.subplots(1, len(names), figsize=(4 * len(names), 3.6), squeeze=False)
    for ax, name in zip(axes[0], names):
        f = fits[name]
        x = np.array([s for s, _ in f.sample])
        y = np.array([v for _, v in f.sample])
        ax.loglog(x, y, "o", ms=4, label="data")
        ax.loglog(x, f.predict(x), "-", label=f"slope {f.exponent:.3f}")
        if name in expected:
            ref = np.exp(np.mean(np.log(y) - expected[name] * np.log(x))) * x ** expected[name]
            ax.loglog(x, ref, ":", color="k", label=f"expected {expected[name]:.3f}")
        ax.set_title(name)
        ax.set_xlabel("scale")
        ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, format="png", dpi=100, metadata=_METADATA)
    plt.close(fig)


def gnuplot_script(pd: PhaseDiagram, beta: float, data_path: str, direction: str = "RR") -> str:
    """Plain-text gnuplot script drawing the ``(1/p, gamma)`` diagram from the phase CSV."""
    b = f"{beta:.12g}"
    cls_index = {"bounded": 0, "growing": 1, "inconclusive": 2}
    return f"""# (1/p, gamma) diagram, direction {direction}; data: {data_path}
set datafile separator ','
set xrange [0:1]
set yrange [0:1]
set xlabel '1/p'
set ylabel 'gamma'
set key outside right
beta = {b}
mid(q) = 1.0/beta + q*(1.0 - 2.0/beta)
min(a,b) = (a < b) ? a : b
max(a,b) = (a > b) ? a : b
cls(s) = (s eq 'bounded') ? {cls_index['bounded']} : ((s eq 'growing') ? {cls_index['growing']} : {cls_index['inconclusive']})
set palette defined (0 'forest-green', 1 'red', 2 'gray')
set cbrange [0:2]
unset colorbox
sel(d, f) = (strcol(3) eq d && strcol(4) eq f) ? 1 : NaN
plot '{data_path}' every ::1 using (1.0/$1):($2*sel('{direction}','all')):(cls(strcol(7))) with points pt 7 ps 1.5 palette title 'cells', \\
     {'min(0.5, x)' if direction == 'R' else 'max(0.5, x)'} with lines lc 'black' title '{direction} holds boundary', \\
     {'max(min(x, 1.0 - 1.0/beta), mid(x))' if direction == 'R' else 'min(max(x, 1.0/beta), mid(x))'} with lines dt 2 lc 'black' title '{direction} fails boundary'
"""
