"""Three-panel grid maps: best <O>, <mu> at the best transformation, and the
off-diagonal <mu^2> measure at the best transformation."""

from __future__ import annotations

import sys

import matplotlib.pyplot as plt

from common import FigureSpec, read_table, run_script, save
from fig4 import GRID_COLUMNS, grid_panel

INPUTS = {"fig5": "fig5.csv"}


def render(spec: FigureSpec) -> None:
    data = read_table(spec.inputs["fig5"], GRID_COLUMNS)
    fig, axes = plt.subplots(1, 3, figsize=(15, 4.4))
    for ax, (column, title) in zip(axes, [
            ("O_best", "best <O>"),
            ("mu_best", "<mu> at best"),
            ("mu2_offdiag_best", "off-diagonal <mu^2> at best")]):
        im = grid_panel(ax, data, column, title)
        fig.colorbar(im, ax=ax)
    fig.tight_layout()
    save(fig, spec.output)


def main(argv=None) -> int:
    return run_script(render, argv, "fig5", INPUTS)


if __name__ == "__main__":
    sys.exit(main())
