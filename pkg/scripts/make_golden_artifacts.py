#!/usr/bin/env python3
"""Produce the committed desk-scale artifact set under artifacts/golden/.

One subdirectory per figure, written by the CLI with fixed seeds; the plots
package renders from these files. Re-running regenerates byte-identical
output (apart from resolved_config.ini echoing the target path).
"""

from __future__ import annotations

import sys
import time
from pathlib import Path

from cohgen import cli

ROOT = Path(__file__).resolve().parent.parent / "artifacts" / "golden"

FAST = ["--gradient", "exact", "--grad-tol", "1e-10", "--workers", "2"]

JOBS = [
    ("fig0", ["grape", "--j", "4", "--beta0", "0.2",
              "--grape-time", "16000", "--grape-steps", "1000",
              "--target-fidelity", "0.9995", "--grape-max-iter", "1500",
              "--seed", "11"]),
    ("fig1", ["sweep", "--kind", "fig1", "--j-list", "1,2,3",
              "--beta0-grid", "0.05:20:8:log", "--runs", "3", "--seed", "0"] + FAST),
    ("fig2", ["canonical", "--j", "1", "--beta0", "3", "--betaf", "0.3",
              "--lambda", "0.3", "--runs", "200", "--seed", "0"] + FAST),
    ("fig3", ["canonical", "--j", "1", "--beta0", "3", "--betaf", "0.3",
              "--lambdas", "0.03,0.1,0.3,1,3", "--runs", "200", "--seed", "0"] + FAST),
    ("fig4", ["sweep", "--kind", "fig4", "--j", "3", "--alpha", "0.04",
              "--beta0-grid", "0.05:20:6:log", "--betaF-grid", "0.05:20:6:log",
              "--runs", "20", "--seed", "0"] + FAST),
    ("fig5", ["sweep", "--kind", "fig5", "--j", "3", "--alpha", "40",
              "--beta0-grid", "0.05:20:6:log", "--betaF-grid", "0.05:20:6:log",
              "--runs", "20", "--seed", "0"] + FAST),
]


def main() -> int:
    for name, args in JOBS:
        out = ROOT / name
        t0 = time.time()
        rc = cli.main(args + ["--out", str(out)])
        print(f"[golden] {name}: exit={rc} ({time.time() - t0:.0f}s)")
        if rc != 0:
            return rc
    return 0


if __name__ == "__main__":
    sys.exit(main())
