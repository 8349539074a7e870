"""Unsorted per-run coherence and target overlap for the energy-constrained
multistart batch."""

from __future__ import annotations

import sys

import matplotlib.pyplot as plt
import numpy as np

from common import FigureSpec, read_table, run_script, save

INPUTS = {"fig2": "fig2.csv"}


def render(spec: FigureSpec) -> None:
    data = read_table(spec.inputs["fig2"], ["run_id", "C", "overlap"])
    idx = np.arange(len(data["C"]))
    fig, (top, bottom) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    top.plot(idx, data["C"], ".", ms=3)
    top.set_ylabel("coherence C")
    bottom.plot(idx, data["overlap"], ".", ms=3, color="tab:orange")
    bottom.set_ylabel("overlap with target")
    bottom.set_xlabel("run index")
    fig.tight_layout()
    save(fig, spec.output)


def main(argv=None) -> int:
    return run_script(render, argv, "fig2", INPUTS)


if __name__ == "__main__":
    sys.exit(main())
