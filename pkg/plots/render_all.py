"""Render every figure from a root artifact directory laid out as
<root>/fig0 ... <root>/fig5 (the layout scripts/make_golden_artifacts.py
produces)."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import fig0
import fig1
import fig2
import fig3
import fig4
import fig5

FIGURES = {
    "fig0": fig0,
    "fig1": fig1,
    "fig2": fig2,
    "fig3": fig3,
    "fig4": fig4,
    "fig5": fig5,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="render all six figures")
    parser.add_argument("--artifacts", required=True,
                        help="root directory with per-figure subdirectories")
    parser.add_argument("--out", required=True, help="output image directory")
    args = parser.parse_args(argv)
    root = Path(args.artifacts)
    out = Path(args.out)
    status = 0
    for name, module in FIGURES.items():
        rc = module.main(["--artifacts", str(root / name), "--out", str(out / f"{name}.png")])
        if rc != 0:
            print(f"{name}: render failed", file=sys.stderr)
            status = rc
    return status


if __name__ == "__main__":
    sys.exit(main())
