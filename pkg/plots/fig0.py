"""Control demonstration: initial/final density-matrix magnitudes, the
realized unitary, and the synthesized field."""

from __future__ import annotations

import sys

import matplotlib.pyplot as plt

from common import FigureSpec, read_field, read_matrix, run_script, save

INPUTS = {
    "rho_initial": "rho_initial_abs.csv",
    "rho_final": "rho_final_abs.csv",
    "unitary": "unitary_abs.csv",
    "field": "field.csv",
}


def render(spec: FigureSpec) -> None:
    rho_i = read_matrix(spec.inputs["rho_initial"])
    rho_f = read_matrix(spec.inputs["rho_final"])
    u_abs = read_matrix(spec.inputs["unitary"])
    t, eps = read_field(spec.inputs["field"])

    fig, axes = plt.subplots(2, 2, figsize=(9, 8))
    for ax, (m, title) in zip(
            axes.flat[:3],
            [(rho_i, "initial state, |rho| (energy basis)"),
             (u_abs, "realized unitary, |U|"),
             (rho_f, "final state, |rho|")]):
        im = ax.imshow(m, cmap="viridis", interpolation="nearest")
        ax.set_title(title)
        ax.set_xlabel("energy index")
        ax.set_ylabel("energy index")
        fig.colorbar(im, ax=ax, fraction=0.046)
    ax = axes.flat[3]
    ax.plot(t, eps, lw=0.8, color="tab:red")
    ax.set_title("control field")
    ax.set_xlabel("time")
    ax.set_ylabel("amplitude")
    fig.tight_layout()
    save(fig, spec.output)


def main(argv=None) -> int:
    return run_script(render, argv, "fig0", INPUTS)


if __name__ == "__main__":
    sys.exit(main())
