"""Maximal coherence versus initial inverse temperature, one curve per system
size, with a log-log inset."""

from __future__ import annotations

import sys

import matplotlib.pyplot as plt
import numpy as np

from common import FigureSpec, read_table, run_script, save

INPUTS = {"fig1": "fig1.csv"}


def render(spec: FigureSpec) -> None:
    data = read_table(spec.inputs["fig1"], ["j", "beta0", "C_max"])
    fig, ax = plt.subplots(figsize=(7, 5))
    inset = ax.inset_axes([0.58, 0.12, 0.38, 0.38])
    for j in np.unique(data["j"]):
        sel = data["j"] == j
        beta = data["beta0"][sel]
        c = data["C_max"][sel]
        order = np.argsort(beta)
        label = f"j={j:g}"
        ax.semilogx(beta[order], c[order], "o-", ms=4, label=label)
        inset.loglog(beta[order], np.clip(c[order], 1e-300, None), "o-", ms=2)
    ax.set_xlabel(r"initial inverse temperature $\beta_0$")
    ax.set_ylabel("maximal coherence C")
    ax.legend()
    inset.set_title("log-log", fontsize=8)
    fig.tight_layout()
    save(fig, spec.output)


def main(argv=None) -> int:
    return run_script(render, argv, "fig1", INPUTS)


if __name__ == "__main__":
    sys.exit(main())
