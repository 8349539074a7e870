"""Shared plumbing for the figure scripts: schema-checked CSV readers and
deterministic rendering.

The scripts consume only the documented artifact schemas (headered figure
CSVs, headerless matrix/field CSVs); they never import the library that
produced them.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

PNG_METADATA = {"Software": "cohgen-plots"}


class SchemaError(Exception):
    """Input artifact does not match its documented schema."""


@dataclass(frozen=True)
class FigureSpec:
    figure_id: str
    inputs: dict[str, Path]
    output: Path


def read_table(path: Path, columns: list[str]) -> dict[str, np.ndarray]:
    """Headered CSV with exactly the given columns, all numeric except run_id."""
    if not path.exists():
        raise SchemaError(f"{path}: missing input file")
    lines = path.read_text().splitlines()
    if not lines:
        raise SchemaError(f"{path}: empty file")
    header = lines[0].split(",")
    for col in columns:
        if col not in header:
            raise SchemaError(f"{path}: missing column {col!r}")
    for col in header:
        if col not in columns:
            raise SchemaError(f"{path}: unexpected column {col!r}")
    if len(lines) < 2:
        raise SchemaError(f"{path}: no data rows")
    out: dict[str, list] = {c: [] for c in header}
    for i, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != len(header):
            raise SchemaError(f"{path}: row {i} has {len(cells)} cells, want {len(header)}")
        for col, cell in zip(header, cells):
            if col == "run_id":
                out[col].append(cell)
                continue
            try:
                out[col].append(float(cell))
            except ValueError as exc:
                raise SchemaError(f"{path}: column {col!r}, row {i}: "
                                  f"not a number: {cell!r}") from exc
    return {c: (np.array(v) if c != "run_id" else np.array(v, dtype=object))
            for c, v in out.items()}


def read_matrix(path: Path) -> np.ndarray:
    """Headerless numeric CSV, square."""
    if not path.exists():
        raise SchemaError(f"{path}: missing input file")
    try:
        m = np.loadtxt(path, delimiter=",", ndmin=2)
    except ValueError as exc:
        raise SchemaError(f"{path}: not a numeric matrix ({exc})") from exc
    if m.size == 0:
        raise SchemaError(f"{path}: empty matrix")
    if m.shape[0] != m.shape[1]:
        raise SchemaError(f"{path}: expected a square matrix, got {m.shape}")
    return m


def read_field(path: Path) -> tuple[np.ndarray, np.ndarray]:
    """Headerless two-column (time, amplitude) CSV."""
    if not path.exists():
        raise SchemaError(f"{path}: missing input file")
    try:
        data = np.loadtxt(path, delimiter=",", ndmin=2)
    except ValueError as exc:
        raise SchemaError(f"{path}: not numeric ({exc})") from exc
    if data.size == 0:
        raise SchemaError(f"{path}: empty field file")
    if data.shape[1] != 2:
        raise SchemaError(f"{path}: expected columns (time, amplitude), got {data.shape[1]}")
    return data[:, 0], data[:, 1]


def save(fig, output: Path) -> None:
    """Deterministic PNG: fixed dpi, fixed metadata, no timestamps."""
    output.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(output, dpi=150, metadata=PNG_METADATA)
    plt.close(fig)


def run_script(render, argv, figure_id: str, default_inputs) -> int:
    """Common argv handling: --artifacts DIR --out PNG."""
    import argparse

    parser = argparse.ArgumentParser(description=f"render {figure_id}")
    parser.add_argument("--artifacts", required=True,
                        help="directory holding this figure's input artifacts")
    parser.add_argument("--out", required=True, help="output image path")
    args = parser.parse_args(argv)
    root = Path(args.artifacts)
    spec = FigureSpec(figure_id=figure_id,
                      inputs={name: root / fname for name, fname in default_inputs.items()},
                      output=Path(args.out))
    try:
        render(spec)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 1
    return 0
