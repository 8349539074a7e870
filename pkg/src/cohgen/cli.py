"""Command-line driver: seeded, config-driven experiments with persisted artifacts.

Subcommands: microcanonical | canonical | grape | sweep | report.

Every command is a pure function of (config, seed): artifacts are
byte-identical across repeated invocations. Config files are INI-style
(key = value under [run] / [optimizer] / [grape] / [sweep]); any key can be
overridden by a command-line flag, and flags win.

Exit codes: 0 success (including flagged non-convergence), 2 usage/config
error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import configparser
import dataclasses
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import grape, harness, uopt
from .spinsys import ModelSetup, is_half_integer
from .states import energy_populations, thermal_state


class ConfigError(Exception):
    pass


@dataclass
class GrapeConfig:
    total_time: float = 10.0
    steps: int = 400
    target_fidelity: float = 0.999
    max_iter: int = 2000
    init_amp: float = 0.01


@dataclass
class SweepConfig:
    kind: str = "fig1"
    j_list: list[float] = field(default_factory=lambda: [1.0, 2.0, 3.0])
    beta0_grid: str = "0.05:20:8:log"
    betaF_grid: str = "0.05:20:6:log"
    grid_lambda: float = harness.DEFAULT_GRID_LAMBDA


@dataclass
class RunConfig:
    experiment: str = ""
    j: float = 1.0
    beta0: float = 0.2
    betaf: float | None = None
    e_f: float | None = None
    lam: float = 0.3
    lambdas: list[float] | None = None
    alpha: float | None = None
    coupling: str = "mu"
    runs: int | None = None
    seed: int = 0
    workers: int | None = None
    out: str | None = None
    coupling_u: float = 1.0
    coupling_delta: float = 1.0
    optimizer: uopt.OptimizerOptions = field(default_factory=uopt.OptimizerOptions)
    grape: GrapeConfig = field(default_factory=GrapeConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)

    def validate(self) -> None:
        if not is_half_integer(self.j) or self.j < 0.5:
            raise ConfigError(f"j must be a half-integer >= 1/2, got {self.j}")
        if self.beta0 < 0:
            raise ConfigError("beta0 must be >= 0")
        if self.betaf is not None and self.betaf < 0:
            raise ConfigError("betaf must be >= 0")
        if self.lam < 0:
            raise ConfigError("lambda must be >= 0")
        if self.lambdas is not None and any(l < 0 for l in self.lambdas):
            raise ConfigError("all lambda values must be >= 0")
        if self.runs is not None and self.runs < 1:
            raise ConfigError("runs must be >= 1")
        if self.workers is not None and self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.coupling not in ("mu", "mu2"):
            raise ConfigError(f"coupling must be 'mu' or 'mu2', got {self.coupling!r}")
        if self.optimizer.gradient not in ("fd", "exact"):
            raise ConfigError("optimizer gradient must be 'fd' or 'exact'")
        if self.sweep.kind not in ("fig1", "fig4", "fig5"):
            raise ConfigError(f"sweep kind must be fig1|fig4|fig5, got {self.sweep.kind!r}")
        if self.grape.steps < 1 or self.grape.total_time <= 0:
            raise ConfigError("grape needs steps >= 1 and total_time > 0")

    def n_workers(self) -> int:
        return self.workers if self.workers is not None else harness.default_workers()


def parse_grid(spec: str) -> list[float]:
    """'lo:hi:n:log' / 'lo:hi:n:lin' grids, or an explicit comma list."""
    spec = spec.strip()
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 4 or parts[3] not in ("log", "lin"):
            raise ConfigError(f"bad grid spec {spec!r}; want lo:hi:n:log|lin")
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
        if n < 1:
            raise ConfigError("grid needs n >= 1")
        if parts[3] == "log":
            if lo <= 0 or hi <= 0:
                raise ConfigError("log grid needs positive endpoints")
            return [float(x) for x in np.geomspace(lo, hi, n)]
        return [float(x) for x in np.linspace(lo, hi, n)]
    return [float(x) for x in spec.split(",") if x.strip()]


def _parse_float_list(s: str) -> list[float]:
    return [float(x) for x in s.split(",") if x.strip()]


_SECTION_KEYS = {
    "run": {
        "experiment": str, "j": float, "beta0": float, "betaf": float, "e_f": float,
        "lam": float, "lambda": float, "lambdas": _parse_float_list, "alpha": float,
        "coupling": str, "runs": int, "seed": int, "workers": int, "out": str,
        "coupling_u": float, "coupling_delta": float,
    },
    "optimizer": {
        "max_iter": int, "grad_tol": float, "fd_step": float,
        "init_scale": float, "gradient": str,
    },
    "grape": {
        "total_time": float, "steps": int, "target_fidelity": float,
        "max_iter": int, "init_amp": float,
    },
    "sweep": {
        "kind": str, "j_list": _parse_float_list, "beta0_grid": str,
        "betaF_grid": str, "grid_lambda": float,
    },
}


def load_config_file(path: str) -> dict:
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"config file {path!r} not found or unreadable")
    values: dict = {}
    for section in parser.sections():
        if section not in _SECTION_KEYS:
            raise ConfigError(f"unknown config section [{section}]")
        for key, raw in parser.items(section):
            if key not in _SECTION_KEYS[section]:
                raise ConfigError(f"unknown key {key!r} in [{section}]")
            conv = _SECTION_KEYS[section][key]
            try:
                values[(section, key)] = conv(raw)
            except ValueError as exc:
                raise ConfigError(f"bad value for [{section}] {key}: {raw!r} ({exc})") from exc
    return values


def build_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(experiment=args.experiment)
    file_values = load_config_file(args.config) if args.config else {}

    def apply(section: str, key: str, setter) -> None:
        if (section, key) in file_values:
            setter(file_values[(section, key)])

    apply("run", "j", lambda v: setattr(cfg, "j", v))
    apply("run", "beta0", lambda v: setattr(cfg, "beta0", v))
    apply("run", "betaf", lambda v: setattr(cfg, "betaf", v))
    apply("run", "e_f", lambda v: setattr(cfg, "e_f", v))
    apply("run", "lam", lambda v: setattr(cfg, "lam", v))
    apply("run", "lambda", lambda v: setattr(cfg, "lam", v))
    apply("run", "lambdas", lambda v: setattr(cfg, "lambdas", v))
    apply("run", "alpha", lambda v: setattr(cfg, "alpha", v))
    apply("run", "coupling", lambda v: setattr(cfg, "coupling", v))
    apply("run", "runs", lambda v: setattr(cfg, "runs", v))
    apply("run", "seed", lambda v: setattr(cfg, "seed", v))
    apply("run", "workers", lambda v: setattr(cfg, "workers", v))
    apply("run", "out", lambda v: setattr(cfg, "out", v))
    apply("run", "coupling_u", lambda v: setattr(cfg, "coupling_u", v))
    apply("run", "coupling_delta", lambda v: setattr(cfg, "coupling_delta", v))
    for key in ("max_iter", "grad_tol", "fd_step", "init_scale", "gradient"):
        apply("optimizer", key, lambda v, k=key: setattr(cfg.optimizer, k, v))
    for key in ("total_time", "steps", "target_fidelity", "max_iter", "init_amp"):
        apply("grape", key, lambda v, k=key: setattr(cfg.grape, k, v))
    for key in ("kind", "j_list", "beta0_grid", "betaF_grid", "grid_lambda"):
        apply("sweep", key, lambda v, k=key: setattr(cfg.sweep, k, v))

    # flags win over config-file values
    flag_map = [
        ("j", ("j",)), ("beta0", ("beta0",)), ("betaf", ("betaf",)), ("ef", ("e_f",)),
        ("lam", ("lam",)), ("alpha", ("alpha",)), ("coupling", ("coupling",)),
        ("runs", ("runs",)), ("seed", ("seed",)), ("workers", ("workers",)),
        ("out", ("out",)),
        ("max_iter", ("optimizer", "max_iter")), ("grad_tol", ("optimizer", "grad_tol")),
        ("fd_step", ("optimizer", "fd_step")), ("init_scale", ("optimizer", "init_scale")),
        ("gradient", ("optimizer", "gradient")),
        ("grape_time", ("grape", "total_time")), ("grape_steps", ("grape", "steps")),
        ("target_fidelity", ("grape", "target_fidelity")),
        ("grape_max_iter", ("grape", "max_iter")), ("init_amp", ("grape", "init_amp")),
        ("kind", ("sweep", "kind")), ("beta0_grid", ("sweep", "beta0_grid")),
        ("betaF_grid", ("sweep", "betaF_grid")), ("grid_lambda", ("sweep", "grid_lambda")),
    ]
    for flag, path in flag_map:
        value = getattr(args, flag, None)
        if value is None:
            continue
        if len(path) == 1:
            setattr(cfg, path[0], value)
        else:
            setattr(getattr(cfg, path[0]), path[1], value)
    if getattr(args, "lambdas", None) is not None:
        cfg.lambdas = _parse_float_list(args.lambdas)
    if getattr(args, "j_list", None) is not None:
        cfg.sweep.j_list = _parse_float_list(args.j_list)

    cfg.validate()
    return cfg


def resolved_config_text(cfg: RunConfig) -> str:
    """INI echo of the fully resolved configuration, defaults included."""
    parser = configparser.ConfigParser()
    run_items = {k: v for k, v in dataclasses.asdict(cfg).items()
                 if k not in ("optimizer", "grape", "sweep")}
    parser["run"] = {k: _ini_value(v) for k, v in sorted(run_items.items())}
    parser["optimizer"] = {k: _ini_value(v) for k, v in
                           sorted(dataclasses.asdict(cfg.optimizer).items())}
    parser["grape"] = {k: _ini_value(v) for k, v in sorted(dataclasses.asdict(cfg.grape).items())}
    parser["sweep"] = {k: _ini_value(v) for k, v in sorted(dataclasses.asdict(cfg.sweep).items())}
    out = []
    for section in ("run", "optimizer", "grape", "sweep"):
        out.append(f"[{section}]")
        for key, value in parser.items(section):
            out.append(f"{key} = {value}")
        out.append("")
    return "\n".join(out)


def _ini_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (list, tuple)):
        return ",".join(str(x) for x in v)
    return str(v)


def config_dict(cfg: RunConfig) -> dict:
    """Config as embedded in summary/runs artifacts.

    Drops out/workers: artifacts must be byte-identical regardless of where
    they are written or how many workers computed them. The full echo
    (including both) lives in resolved_config.ini.
    """
    d = dataclasses.asdict(cfg)
    d.pop("out", None)
    d.pop("workers", None)
    return d


def _prepare_out_dir(cfg: RunConfig) -> Path:
    if cfg.out:
        out = Path(cfg.out)
    else:
        stamp = time.strftime("%Y%m%d-%H%M%S")
        out = Path(f"{cfg.experiment}-{stamp}")
    out.mkdir(parents=True, exist_ok=True)
    (out / "resolved_config.ini").write_text(resolved_config_text(cfg))
    return out


def _write_matrix_csv(path: Path, m: np.ndarray) -> None:
    with open(path, "w") as fh:
        for row in m:
            fh.write(",".join(f"{x:.17g}" for x in row) + "\n")


def _effective_runs(cfg: RunConfig, default: int) -> int:
    return cfg.runs if cfg.runs is not None else default


def cmd_microcanonical(cfg: RunConfig) -> int:
    out = _prepare_out_dir(cfg)
    n_runs = _effective_runs(cfg, 50)
    spec = harness.ProblemSpec(kind="unconstrained", j=cfg.j, beta0=cfg.beta0,
                               coupling_u=cfg.coupling_u, coupling_delta=cfg.coupling_delta)
    records = harness.multistart(spec, n_runs, cfg.seed, cfg.optimizer, cfg.n_workers())
    harness.write_json(out / "runs.json", harness.batch_document(
        "microcanonical", config_dict(cfg), records))
    n_traps, table = harness.trap_census(records)
    best = max((r for r in records if r.converged), key=lambda r: r.objective_value)
    summary = {
        "experiment": "microcanonical",
        "n_runs": n_runs,
        "n_converged": sum(r.converged for r in records),
        "best_objective": best.objective_value,
        "best_entropy": best.entropy,
        "best_divergence": best.divergence,
        "best_coherence": best.coherence,
        "coherence_normalized": best.coherence_normalized,
        "best_populations": best.populations,
        "ln_N": float(np.log(len(best.populations))),
        "trap_count": n_traps,
        "trap_table": table,
        "config": config_dict(cfg),
    }
    harness.write_json(out / "summary.json", summary)
    print(f"microcanonical: {n_runs} runs, best S_E={best.entropy:.12g} "
          f"(ln N={np.log(len(best.populations)):.12g}), traps={n_traps} -> {out}")
    return 0


def cmd_canonical(cfg: RunConfig) -> int:
    if cfg.betaf is None and cfg.e_f is None:
        raise ConfigError("canonical needs --betaf or --ef")
    out = _prepare_out_dir(cfg)
    n_runs = _effective_runs(cfg, harness.DEFAULT_MULTISTART_RUNS)

    if cfg.lambdas:
        if cfg.betaf is None:
            raise ConfigError("lambda sweep needs --betaf")
        sweep = harness.lambda_sweep(cfg.j, cfg.beta0, cfg.betaf, cfg.lambdas,
                                     n_runs, cfg.seed, cfg.optimizer, cfg.n_workers())
        harness.write_json(out / "sweep.json", harness.sweep_document(
            "canonical-lambda-sweep", config_dict(cfg), sweep))
        harness.write_fig3_csv(out / "fig3.csv", sweep)
        lam0 = harness.detect_lambda0(sweep)
        summary = {
            "experiment": "canonical-lambda-sweep",
            "lambda0": lam0,
            "cells": [{"lambda": s.coords["lambda"],
                       "mean_abs_sigma": s.aggregates["mean_abs_sigma"],
                       "trap_count": s.trap_count,
                       "best_overlap": s.aggregates["best_overlap"]} for s in sweep],
            "config": config_dict(cfg),
        }
        harness.write_json(out / "summary.json", summary)
        print(f"canonical lambda sweep: lambda0={lam0} -> {out}")
        return 0

    spec = harness.ProblemSpec(kind="energy_constrained", j=cfg.j, beta0=cfg.beta0,
                               beta_f=cfg.betaf, E_f=cfg.e_f, lam=cfg.lam,
                               coupling_u=cfg.coupling_u, coupling_delta=cfg.coupling_delta)
    records = harness.multistart(spec, n_runs, cfg.seed, cfg.optimizer, cfg.n_workers())
    harness.write_json(out / "runs.json", harness.batch_document(
        "canonical", config_dict(cfg), records))
    harness.write_fig2_csv(out / "fig2.csv", records)
    n_traps, table = harness.trap_census(records)
    conv = [r for r in records if r.converged]
    best = max(conv, key=lambda r: r.overlap if r.overlap is not None else -1)
    summary = {
        "experiment": "canonical",
        "n_runs": n_runs,
        "n_converged": len(conv),
        "best_overlap": best.overlap,
        "best_objective": max(r.objective_value for r in conv),
        "mean_abs_sigma": float(np.mean([abs(r.sigma) for r in conv if r.sigma is not None])),
        "trap_count": n_traps,
        "trap_table": table,
        "config": config_dict(cfg),
    }
    harness.write_json(out / "summary.json", summary)
    print(f"canonical: {n_runs} runs, best overlap={best.overlap:.6f}, traps={n_traps} -> {out}")
    return 0


def cmd_grape(cfg: RunConfig) -> int:
    out = _prepare_out_dir(cfg)
    setup = ModelSetup.make(cfg.j, cfg.coupling_u, cfg.coupling_delta)
    n = setup.system.N
    u_target = setup.basis.from_energy(uopt.dft_unitary(n))
    rng = np.random.default_rng(cfg.seed)
    field0 = grape.ControlField(
        dt=cfg.grape.total_time / cfg.grape.steps,
        amplitudes=cfg.grape.init_amp * rng.normal(0.0, 1.0, cfg.grape.steps))
    opts = grape.GrapeOptions(target_fidelity=cfg.grape.target_fidelity,
                              max_iter=cfg.grape.max_iter)
    best, res = grape.grape_optimize(setup.Hn, np.asarray(setup.system.Jz),
                                     u_target, field0, opts)

    rho0 = thermal_state(setup.basis, cfg.beta0)
    rho_f = uopt.conjugate_state(rho0, res.U_final)
    populations = energy_populations(rho_f, setup.basis)

    best.export_csv(out / "field.csv")
    harness.write_csv(out / "fidelity_trace.csv", ["iteration", "fidelity"],
                      [[i, float(f)] for i, f in enumerate(res.fidelity_trace)])
    _write_matrix_csv(out / "rho_initial_abs.csv", np.abs(setup.basis.to_energy(rho0)))
    _write_matrix_csv(out / "rho_final_abs.csv", np.abs(setup.basis.to_energy(rho_f)))
    _write_matrix_csv(out / "unitary_abs.csv", np.abs(setup.basis.to_energy(res.U_final)))
    summary = {
        "experiment": "grape",
        "fidelity": res.fidelity,
        "converged": res.converged,
        "stagnated": res.stagnated,
        "reason": res.reason,
        "iterations": res.iterations,
        "final_populations": [float(p) for p in populations],
        "uniform_deviation": float(np.max(np.abs(populations - 1.0 / n))),
        "target_fidelity": cfg.grape.target_fidelity,
        "config": config_dict(cfg),
    }
    harness.write_json(out / "summary.json", summary)
    print(f"grape: F={res.fidelity:.6f} ({res.reason}, {res.iterations} iters), "
          f"max|p-1/N|={summary['uniform_deviation']:.2e} -> {out}")
    return 0


def cmd_sweep(cfg: RunConfig) -> int:
    out = _prepare_out_dir(cfg)
    kind = cfg.sweep.kind
    beta0_grid = parse_grid(cfg.sweep.beta0_grid)
    if kind == "fig1":
        n_runs = _effective_runs(cfg, 3)
        sweep = harness.beta_sweep_maxC(cfg.sweep.j_list, beta0_grid, n_runs,
                                        cfg.seed, cfg.optimizer, cfg.n_workers())
        harness.write_json(out / "sweep.json", harness.sweep_document(
            "beta-sweep-maxC", config_dict(cfg), sweep))
        harness.write_fig1_csv(out / "fig1.csv", sweep)
        harness.write_json(out / "summary.json", {
            "experiment": "beta-sweep-maxC",
            "cells": [{"j": s.coords["j"], "beta0": s.coords["beta0"],
                       "C_max": s.aggregates["C_max"]} for s in sweep],
            "config": config_dict(cfg),
        })
        print(f"sweep fig1: {len(sweep)} cells -> {out}")
        return 0

    alpha = cfg.alpha if cfg.alpha is not None else (0.04 if kind == "fig4" else 40.0)
    betaF_grid = parse_grid(cfg.sweep.betaF_grid)
    n_runs = _effective_runs(cfg, harness.DEFAULT_GRID_RUNS)
    sweep = harness.grid_sweep_O(cfg.j, alpha, cfg.coupling, beta0_grid, betaF_grid,
                                 n_runs, cfg.seed, cfg.optimizer, cfg.n_workers(),
                                 lam=cfg.sweep.grid_lambda)
    harness.write_json(out / "sweep.json", harness.sweep_document(
        f"grid-sweep-O-{kind}", config_dict(cfg), sweep))
    harness.write_grid_csv(out / f"{kind}.csv", sweep)
    best = max(sweep, key=lambda s: s.aggregates["O_best"])
    summary = {
        "experiment": f"grid-sweep-O-{kind}",
        "alpha": alpha,
        "coupling": cfg.coupling,
        "argmax_O": best.coords,
        "inverted_extremum": harness.inverted_extremum_report(sweep),
        "config": config_dict(cfg),
    }
    harness.write_json(out / "summary.json", summary)
    print(f"sweep {kind}: {len(sweep)} cells, max O at beta0={best.coords['beta0']:.3g} "
          f"betaF={best.coords['betaF']:.3g} -> {out}")
    return 0


def cmd_report(cfg: RunConfig) -> int:
    if not cfg.out:
        raise ConfigError("report needs --out pointing at an artifact directory")
    src = Path(cfg.out)
    summary_path = src / "summary.json"
    if not summary_path.exists():
        raise ConfigError(f"no summary.json in {src}")
    summary = harness.load_json(summary_path)
    lines = [f"artifact directory: {src}", f"experiment: {summary.get('experiment')}"]
    for key in ("n_runs", "n_converged", "best_objective", "best_overlap", "best_entropy",
                "mean_abs_sigma", "trap_count", "lambda0", "fidelity", "converged",
                "uniform_deviation", "iterations", "alpha", "coupling"):
        if key in summary:
            lines.append(f"{key}: {summary[key]}")
    for key in ("argmax_O", "inverted_extremum"):
        if key in summary:
            lines.append(f"{key}: {json.dumps(summary[key], sort_keys=True)}")
    if "cells" in summary:
        lines.append("cells:")
        for cell in summary["cells"]:
            lines.append("  " + json.dumps(cell, sort_keys=True))
    sweep_path = src / "sweep.json"
    if sweep_path.exists():
        doc = harness.load_json(sweep_path)
        lines.append(f"sweep cells: {len(doc.get('cells', []))}")
    text = "\n".join(lines) + "\n"
    (src / "report.txt").write_text(text)
    print(text, end="")
    return 0


COMMANDS = {
    "microcanonical": cmd_microcanonical,
    "canonical": cmd_canonical,
    "grape": cmd_grape,
    "sweep": cmd_sweep,
    "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cohgen",
        description="Coherence generation from thermal states by unitary control.")
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name, help_text in [
        ("microcanonical", "unconstrained entropy maximization (multistart)"),
        ("canonical", "energy-constrained optimization; single lambda or a sweep"),
        ("grape", "synthesize the control field for the uniform-population target"),
        ("sweep", "fig1 temperature sweep or fig4/fig5 (beta0, betaF) grid"),
        ("report", "re-print summary tables from an artifact directory"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", default=None, help="INI config file")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--workers", type=int, default=None)
        p.add_argument("--out", default=None, help="artifact directory")
        p.add_argument("--j", type=float, default=None)
        p.add_argument("--beta0", type=float, default=None)
        p.add_argument("--betaf", type=float, default=None)
        p.add_argument("--ef", type=float, default=None, help="target energy (alternative to --betaf)")
        p.add_argument("--lambda", dest="lam", type=float, default=None)
        p.add_argument("--lambdas", default=None, help="comma list; canonical runs a sweep")
        p.add_argument("--alpha", type=float, default=None)
        p.add_argument("--coupling", choices=["mu", "mu2"], default=None)
        p.add_argument("--runs", type=int, default=None)
        p.add_argument("--max-iter", dest="max_iter", type=int, default=None)
        p.add_argument("--grad-tol", dest="grad_tol", type=float, default=None)
        p.add_argument("--fd-step", dest="fd_step", type=float, default=None)
        p.add_argument("--init-scale", dest="init_scale", type=float, default=None)
        p.add_argument("--gradient", choices=["fd", "exact"], default=None)
        p.add_argument("--grape-time", dest="grape_time", type=float, default=None)
        p.add_argument("--grape-steps", dest="grape_steps", type=int, default=None)
        p.add_argument("--grape-max-iter", dest="grape_max_iter", type=int, default=None)
        p.add_argument("--target-fidelity", dest="target_fidelity", type=float, default=None)
        p.add_argument("--init-amp", dest="init_amp", type=float, default=None)
        p.add_argument("--kind", choices=["fig1", "fig4", "fig5"], default=None)
        p.add_argument("--j-list", dest="j_list", default=None, help="comma list for fig1")
        p.add_argument("--beta0-grid", dest="beta0_grid", default=None)
        p.add_argument("--betaF-grid", dest="betaF_grid", default=None)
        p.add_argument("--grid-lambda", dest="grid_lambda", type=float, default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        return COMMANDS[cfg.experiment](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (np.linalg.LinAlgError, FloatingPointError, ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
