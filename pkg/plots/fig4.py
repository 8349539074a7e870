"""Contour map of the best generalized-coherence expectation over the
(initial temperature, target effective temperature) grid."""

from __future__ import annotations

import sys

import matplotlib.pyplot as plt
import numpy as np

from common import FigureSpec, read_table, run_script, save

INPUTS = {"fig4": "fig4.csv"}
GRID_COLUMNS = ["beta0", "betaF", "O_best", "mu_best", "mu2_offdiag_best"]


def grid_panel(ax, data, column, title):
    beta0 = np.unique(data["beta0"])
    betaF = np.unique(data["betaF"])
    z = np.full((len(betaF), len(beta0)), np.nan)
    for b0, bf, v in zip(data["beta0"], data["betaF"], data[column]):
        z[np.searchsorted(betaF, bf), np.searchsorted(beta0, b0)] = v
    im = ax.contourf(beta0, betaF, z, levels=14, cmap="inferno")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel(r"$\beta_0$")
    ax.set_ylabel(r"$\beta_F$")
    ax.set_title(title)
    return im


def render(spec: FigureSpec) -> None:
    data = read_table(spec.inputs["fig4"], GRID_COLUMNS)
    fig, ax = plt.subplots(figsize=(6.5, 5))
    im = grid_panel(ax, data, "O_best", "best <O>")
    fig.colorbar(im, ax=ax)
    fig.tight_layout()
    save(fig, spec.output)


def main(argv=None) -> int:
    return run_script(render, argv, "fig4", INPUTS)


if __name__ == "__main__":
    sys.exit(main())
