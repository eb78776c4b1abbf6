"""Regenerate the golden outputs with the quotient (reduced radial) backend.

The quotient route diagonalizes the equitable-partition quotient around the
center instead of the full Laplacian, so it is an independent computation of
the same radial fractional powers.  Run from the package root::

    python3 tests/golden/make_golden.py
"""

import shutil
import tempfile
from pathlib import Path

from fracriesz.config import parse_config, with_overrides
from fracriesz.pipeline import run_pipeline

HERE = Path(__file__).parent


def main():
    cfg = with_overrides(parse_config(HERE / "vicsek5.cfg"), method="quotient")
    with tempfile.TemporaryDirectory() as tmp:
        res = run_pipeline(cfg, output_dir=tmp, figures=False)
        for name in ("fits.csv", "phase.csv"):
            shutil.copy(res.files[name], HERE / f"vicsek5_{name}")
        print(res.manifest["riesz"]["backend"], res.manifest["wall_times_s"])


if __name__ == "__main__":
    main()
