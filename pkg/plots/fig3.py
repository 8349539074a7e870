"""Sorted-overlap families per Lagrange multiplier with the mean energy-error
inset."""

from __future__ import annotations

import sys

import matplotlib.pyplot as plt
import numpy as np

from common import FigureSpec, read_table, run_script, save

INPUTS = {"fig3": "fig3.csv"}


def render(spec: FigureSpec) -> None:
    data = read_table(spec.inputs["fig3"], ["lambda", "sorted_rank", "overlap", "mean_sigma"])
    fig, ax = plt.subplots(figsize=(7, 5))
    inset = ax.inset_axes([0.14, 0.6, 0.34, 0.34])
    lams = np.unique(data["lambda"])
    mean_sigma = []
    for lam in lams:
        sel = data["lambda"] == lam
        rank = data["sorted_rank"][sel]
        order = np.argsort(rank)
        ax.plot(rank[order], data["overlap"][sel][order], lw=1.2,
                label=rf"$\lambda$={lam:g}")
        mean_sigma.append(data["mean_sigma"][sel][0])
    ax.set_xlabel("sorted run rank")
    ax.set_ylabel("overlap with target")
    ax.legend(loc="lower right", fontsize=8)
    inset.semilogx(lams, mean_sigma, "o-", ms=3)
    inset.set_xlabel(r"$\lambda$", fontsize=8)
    inset.set_ylabel(r"mean $|\sigma|$", fontsize=8)
    inset.tick_params(labelsize=7)
    fig.tight_layout()
    save(fig, spec.output)


def main(argv=None) -> int:
    return run_script(render, argv, "fig3", INPUTS)


if __name__ == "__main__":
    sys.exit(main())
