"""Command-line entry point ``fracriesz``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .config import expand_grid, parse_config
from .errors import FracRieszError
from .fractals import GeneratorSpec, generate
from .fracpow import make_backend, spectral_decompose
from .graph import certify_analyticity, certify_nondegeneracy, doubling_witness, lazify, read_edge_list, write_edge_list
from .pipeline import FITS_HEADER, fits_csv_rows, run_pipeline, write_csv
from .plotting import gnuplot_script, plot_phase_diagram, plot_scaling_fits
from .riesz import (
    WITNESS_KINDS,
    PhaseThresholds,
    WitnessFamily,
    default_scales,
    fit_poincare_exponent,
    phase_diagram,
    check_p_inf_1,
    tent_witness,
)
from .scaling import (
    default_radii,
    fit_escape_exponent,
    fit_volume_growth,
    verify_dkue,
    verify_ue_shape,
)

__all__ = ["main", "build_parser"]


def _anchor(g, value):
    if value is not None:
        return int(value)
    return g.center if g.center is not None else 0


def _beta(meta, value):
    if value is not None:
        return float(value)
    if "beta_expected" in meta:
        return float(meta["beta_expected"])
    raise SystemExit("no beta given and the graph file carries no '# expected' annotation; pass --beta")


def cmd_generate(a):
    spec = GeneratorSpec(a.family, a.level, a.dim, a.weight)
    g, exps = generate(spec)
    if a.lazy:
        g = lazify(g, a.lazy)
    write_edge_list(g, a.out, expected=exps)
    print(f"wrote {a.out}: {g.n_vertices} vertices, {g.n_edges} edges, "
          f"D={exps.D_expected:.6g} beta={exps.beta_expected:.6g}")


def cmd_certify(a):
    g, _ = read_edge_list(a.graph)
    eps = certify_nondegeneracy(g)
    report = {"n_vertices": g.n_vertices, "n_edges": g.n_edges, "M": g.M, "epsilon": eps,
              "laziness": g.laziness, "diameter": g.diameter}
    try:
        cert = certify_analyticity(g, a.ell_max)
        report.update(analyticity_ell=cert.ell, analyticity_eps=cert.eps)
    except FracRieszError as exc:
        report["analyticity"] = f"failed: {exc}"
    x = _anchor(g, None)
    radii = [r for r in (1, 2, 4, 8, 16, 32) if 2 * r <= g.eccentricity(x)]
    if radii:
        report["doubling_ratio"] = doubling_witness(g, [x], radii)
    text = json.dumps(report, indent=2, sort_keys=True)
    if a.out:
        Path(a.out).write_text(text + "\n")
    print(text)


def cmd_verify_scaling(a):
    g, meta = read_edge_list(a.graph)
    x = _anchor(g, a.center)
    radii = [int(r) for r in a.radii.split(",")] if a.radii else default_radii(g)
    rows, fits = [], {}
    if a.what == "volume":
        f = fit_volume_growth(g, [x], radii)
        fits["volume"] = f
        rows = fits_csv_rows("volume", f)
        print(f"volume exponent {f.exponent:.6g} (residual {f.residual:.3g})")
    elif a.what == "escape":
        f = fit_escape_exponent(g, x, radii)
        fits["escape"] = f
        rows = fits_csv_rows("escape", f)
        print(f"escape exponent {f.exponent:.6g} (residual {f.residual:.3g})")
    else:
        beta = _beta(meta, a.beta)
        ks = [int(k) for k in a.ks.split(",")] if a.ks else [16, 32, 64, 128, 256, 512, 1024]
        shape = (verify_ue_shape if a.what == "ue" else verify_dkue)(g, x, ks, beta)
        rows = [[a.what, f"{k:.12g}", f"{v:.12g}", f"{shape.c:.12g}", f"{shape.violation:.12g}"]
                for k, v in shape.per_step]
        print(f"{a.what}: C={shape.C:.6g} c={shape.c:.6g} violation={shape.violation:.4g} (beta={beta:.6g})")
    write_csv(a.out, FITS_HEADER, rows)
    if fits and not a.no_figure:
        png = Path(a.out).with_suffix(".png")
        plot_scaling_fits(fits, png)
        print(f"figure {png}")


def cmd_spectrum(a):
    g, _ = read_edge_list(a.graph)
    dec = spectral_decompose(g)
    rows = [[str(i), f"{lam:.12g}"] for i, lam in enumerate(dec.eigenvalues)]
    write_csv(a.out, "index,eigenvalue", rows)
    print(f"wrote {len(rows)} eigenvalues to {a.out} (max residual {dec.max_residual:.2e})")


def cmd_riesz_scan(a):
    g, meta = read_edge_list(a.graph)
    beta = _beta(meta, a.beta)
    x = _anchor(g, a.anchor)
    kinds = [k.strip() for k in a.families.split(",") if k.strip()]
    for k in kinds:
        if k not in WITNESS_KINDS:
            raise SystemExit(f"unknown family {k!r}; expected one of {', '.join(WITNESS_KINDS)}")
    fams = [WitnessFamily(k, x, default_scales(g, k, x, beta), beta=beta, seed=a.seed) for k in kinds]
    backend = make_backend(g, a.method, tol=a.tol)
    th = PhaseThresholds(a.slope_min, a.slope_eps, a.residual_max)
    pd = phase_diagram(g, expand_grid(a.p), expand_grid(a.gamma), fams, backend=backend, thresholds=th,
                       threads=a.threads)
    pd.to_csv(a.out)
    print(f"wrote {a.out} ({len(pd.verdicts())} cell verdicts, backend {pd.backend})")
    if not a.no_figure:
        png = Path(a.out).with_suffix(".png")
        plot_phase_diagram(pd, beta, png)
        print(f"figure {png}")
    if a.plot_script:
        Path(a.plot_script).write_text(gnuplot_script(pd, beta, str(a.out)))
        print(f"plot script {a.plot_script}")


def cmd_poincare(a):
    g, _ = read_edge_list(a.graph)
    x = _anchor(g, a.anchor)
    radii = [int(r) for r in a.radii.split(",")] if a.radii else list(default_scales(g, a.kind, x, 2.0))
    fit = fit_poincare_exponent(g, x, radii, p=a.p, kind=a.kind)
    eps = certify_nondegeneracy(g)
    worst = 0.0
    for r in radii:
        lhs, rhs = check_p_inf_1(g, tent_witness(g, x, r), r, eps)
        worst = max(worst, lhs / rhs)
    rows = fits_csv_rows(f"poincare_{a.kind}", fit)
    write_csv(a.out, FITS_HEADER, rows)
    print(f"minimal alpha {fit.exponent:.6g} (squared normalisation {2 * fit.exponent:.6g}); "
          f"P(inf,1) worst ratio {worst:.4g} (must be <= 1)")


def cmd_run(a):
    cfg = parse_config(a.config)
    res = run_pipeline(cfg, output_dir=a.out_dir, threads=a.threads, figures=not a.no_figure)
    for name, p in sorted(res.files.items()):
        print(f"{name}: {p}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fracriesz", description=__doc__)
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("--threads", type=int, default=1, help="parallel workers (results do not depend on it)")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("generate", help="write a generated graph as an edge list")
    p.add_argument("--family", required=True, choices=["vicsek", "sierpinski", "lattice_box"])
    p.add_argument("--level", type=int, required=True, help="level, or side length for lattice_box")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--weight", type=float, default=1.0)
    p.add_argument("--lazy", type=float, default=0.0, help="laziness alpha in (0,1); 0 keeps the raw walk")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_generate)

    p = sub.add_parser("certify", help="finiteness, non-degeneracy and analyticity certificates")
    p.add_argument("--graph", required=True)
    p.add_argument("--ell-max", type=int, default=4)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_certify)

    p = sub.add_parser("verify-scaling", help="volume, escape-time or heat-kernel shape fits")
    p.add_argument("--graph", required=True)
    p.add_argument("--what", required=True, choices=["volume", "escape", "ue", "dkue"])
    p.add_argument("--center", type=int)
    p.add_argument("--radii", help="comma-separated radii (default: geometric in the safe range)")
    p.add_argument("--ks", help="comma-separated times for ue/dkue")
    p.add_argument("--beta", type=float)
    p.add_argument("--out", required=True)
    p.add_argument("--no-figure", action="store_true")
    p.set_defaults(fn=cmd_verify_scaling)

    p = sub.add_parser("spectrum", help="dense eigenvalues of the Laplacian")
    p.add_argument("--graph", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_spectrum)

    p = sub.add_parser("riesz-scan", help="phase diagram over (p, gamma)")
    p.add_argument("--graph", required=True)
    p.add_argument("--p", default="1.5,2,3,4")
    p.add_argument("--gamma", default="0.1:0.9:0.1")
    p.add_argument("--families", default="tent,heat_cutoff,eigenmode_band")
    p.add_argument("--anchor", type=int)
    p.add_argument("--beta", type=float)
    p.add_argument("--method", default="auto", choices=["auto", "spectral", "binomial", "chebyshev", "quotient"])
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--slope-min", type=float, default=0.1)
    p.add_argument("--slope-eps", type=float, default=0.05)
    p.add_argument("--residual-max", type=float, default=0.25)
    p.add_argument("--out", required=True)
    p.add_argument("--plot-script", help="also write a gnuplot script for the diagram")
    p.add_argument("--no-figure", action="store_true")
    p.set_defaults(fn=cmd_riesz_scan)

    p = sub.add_parser("poincare", help="minimal Poincare exponent and the P(inf,1) check")
    p.add_argument("--graph", required=True)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--kind", default="eigenmode_band", choices=["tent", "eigenmode_band"])
    p.add_argument("--anchor", type=int)
    p.add_argument("--radii")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_poincare)

    p = sub.add_parser("run", help="full pipeline from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", help="overrides the config and the FRACRIESZ_OUTPUT_DIR variable")
    p.add_argument("--no-figure", action="store_true")
    p.set_defaults(fn=cmd_run)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return 2
    try:
        args.fn(args)
    except FracRieszError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
