import json

import numpy as np
import pytest

from cohgen import cli
from cohgen.states import thermal_populations
from cohgen.spinsys import ModelSetup

FAST_FLAGS = ["--gradient", "exact", "--grad-tol", "1e-10", "--workers", "1"]


def read(path):
    return json.loads(path.read_text())


def artifact_bytes(outdir):
    """summary.json and CSV/JSON payloads; resolved_config.ini echoes the
    output path itself so it is excluded from the byte comparison."""
    return {p.name: p.read_bytes() for p in sorted(outdir.iterdir())
            if p.name != "resolved_config.ini"}


def test_missing_subcommand_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main([])
    assert exc.value.code == 2


def test_unknown_flag_usage_error():
    with pytest.raises(SystemExit) as exc:
        cli.main(["microcanonical", "--frobnicate"])
    assert exc.value.code == 2


def test_invalid_j_config_error(tmp_path, capsys):
    rc = cli.main(["microcanonical", "--j", "0.4", "--out", str(tmp_path / "x")])
    assert rc == 2
    assert "half-integer" in capsys.readouterr().err


def test_canonical_requires_target(tmp_path):
    rc = cli.main(["canonical", "--j", "1", "--beta0", "3", "--runs", "2",
                   "--out", str(tmp_path / "x")] + FAST_FLAGS)
    assert rc == 2


def test_microcanonical_artifacts(tmp_path):
    out = tmp_path / "mc"
    rc = cli.main(["microcanonical", "--j", "1", "--beta0", "0.2", "--runs", "4",
                   "--seed", "3", "--out", str(out)] + FAST_FLAGS)
    assert rc == 0
    summary = read(out / "summary.json")
    assert summary["trap_count"] == 1
    assert np.allclose(summary["best_populations"], 1 / 3, atol=1e-6)
    assert summary["best_entropy"] == pytest.approx(np.log(3), abs=1e-6)
    runs = read(out / "runs.json")
    assert len(runs["records"]) == 4
    assert (out / "resolved_config.ini").exists()


def test_determinism_byte_identical(tmp_path):
    args = ["microcanonical", "--j", "1", "--beta0", "0.2", "--runs", "3",
            "--seed", "11"] + FAST_FLAGS
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert cli.main(args + ["--out", str(out_a)]) == 0
    assert cli.main(args + ["--out", str(out_b)]) == 0
    assert artifact_bytes(out_a) == artifact_bytes(out_b)


def test_canonical_fig2_and_summary(tmp_path):
    out = tmp_path / "can"
    rc = cli.main(["canonical", "--j", "1", "--beta0", "3", "--betaf", "0.3",
                   "--lambda", "0.3", "--runs", "6", "--seed", "0",
                   "--out", str(out)] + FAST_FLAGS)
    assert rc == 0
    lines = (out / "fig2.csv").read_text().splitlines()
    assert lines[0] == "run_id,C,overlap"
    assert len(lines) == 7
    summary = read(out / "summary.json")
    assert summary["best_overlap"] > 0.999


def test_canonical_ef_equals_betaf_route(tmp_path):
    setup = ModelSetup.make(1.0)
    q = thermal_populations(setup.basis.eigenvalues, 0.3)
    e_f = float(q @ setup.basis.eigenvalues)
    common = ["canonical", "--j", "1", "--beta0", "3", "--lambda", "0.3",
              "--runs", "4", "--seed", "5"] + FAST_FLAGS
    out_beta, out_ef = tmp_path / "b", tmp_path / "e"
    assert cli.main(common + ["--betaf", "0.3", "--out", str(out_beta)]) == 0
    assert cli.main(common + ["--ef", f"{e_f:.17g}", "--out", str(out_ef)]) == 0
    rb = read(out_beta / "runs.json")["records"]
    re_ = read(out_ef / "runs.json")["records"]
    for a, b in zip(rb, re_):
        assert a["objective_value"] == pytest.approx(b["objective_value"], abs=1e-12)
        assert a["v_params"] == b["v_params"]


def test_lambda_sweep_fig3(tmp_path):
    out = tmp_path / "lam"
    rc = cli.main(["canonical", "--j", "1", "--beta0", "3", "--betaf", "0.3",
                   "--lambdas", "0.03,0.3", "--runs", "5", "--seed", "0",
                   "--out", str(out)] + FAST_FLAGS)
    assert rc == 0
    assert read(out / "summary.json")["lambda0"] == 0.3
    header = (out / "fig3.csv").read_text().splitlines()[0]
    assert header == "lambda,sorted_rank,overlap,mean_sigma"


def test_grape_artifacts_and_field_round_trip(tmp_path):
    out = tmp_path / "gr"
    rc = cli.main(["grape", "--j", "0.5", "--beta0", "0.2", "--grape-time", "30",
                   "--grape-steps", "60", "--seed", "7", "--out", str(out)])
    assert rc == 0
    summary = read(out / "summary.json")
    assert summary["fidelity"] >= 0.999
    assert summary["converged"]
    from cohgen import grape
    field = grape.ControlField.import_csv(out / "field.csv")
    assert field.steps == 60
    trace = (out / "fidelity_trace.csv").read_text().splitlines()
    assert trace[0] == "iteration,fidelity"
    rho0 = np.loadtxt(out / "rho_initial_abs.csv", delimiter=",")
    assert rho0.shape == (2, 2)


def test_grape_unreachable_target_flagged(tmp_path):
    out = tmp_path / "gr2"
    rc = cli.main(["grape", "--j", "0.5", "--beta0", "0.2", "--grape-time", "30",
                   "--grape-steps", "60", "--seed", "7", "--target-fidelity", "1.0",
                   "--grape-max-iter", "40", "--out", str(out)])
    assert rc == 0  # best effort is a valid scientific result
    summary = read(out / "summary.json")
    assert not summary["converged"] or summary["fidelity"] >= 1.0 - 1e-12


def test_sweep_fig1(tmp_path):
    out = tmp_path / "sw"
    rc = cli.main(["sweep", "--kind", "fig1", "--j-list", "1", "--beta0-grid",
                   "0.1:3:3:log", "--runs", "2", "--seed", "0", "--out", str(out)]
                  + FAST_FLAGS)
    assert rc == 0
    lines = (out / "fig1.csv").read_text().splitlines()
    assert lines[0] == "j,beta0,C_max"
    cs = [float(line.split(",")[2]) for line in lines[1:]]
    assert cs == sorted(cs)


def test_sweep_fig4_tiny(tmp_path):
    out = tmp_path / "sw4"
    rc = cli.main(["sweep", "--kind", "fig4", "--j", "1.5", "--beta0-grid", "0.3,5",
                   "--betaF-grid", "0.3,5", "--runs", "3", "--seed", "0",
                   "--out", str(out)] + FAST_FLAGS)
    assert rc == 0
    lines = (out / "fig4.csv").read_text().splitlines()
    assert lines[0] == "beta0,betaF,O_best,mu_best,mu2_offdiag_best"
    assert len(lines) == 5


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text("""
[run]
j = 1.0
beta0 = 0.2
runs = 3
seed = 9
[optimizer]
gradient = exact
grad_tol = 1e-10
""")
    out = tmp_path / "out"
    rc = cli.main(["microcanonical", "--config", str(cfg), "--runs", "2",
                   "--workers", "1", "--out", str(out)])
    assert rc == 0
    assert len(read(out / "runs.json")["records"]) == 2  # flag beat config
    resolved = (out / "resolved_config.ini").read_text()
    assert "seed = 9" in resolved
    assert "gradient = exact" in resolved


def test_unknown_config_key_rejected(tmp_path):
    cfg = tmp_path / "bad.ini"
    cfg.write_text("[run]\nnonsense = 1\n")
    rc = cli.main(["microcanonical", "--config", str(cfg), "--out", str(tmp_path / "x")])
    assert rc == 2


def test_report_round_trip(tmp_path, capsys):
    out = tmp_path / "mc"
    cli.main(["microcanonical", "--j", "1", "--beta0", "0.2", "--runs", "3",
              "--seed", "0", "--out", str(out)] + FAST_FLAGS)
    rc = cli.main(["report", "--out", str(out)])
    assert rc == 0
    text = capsys.readouterr().out
    assert "experiment: microcanonical" in text
    assert (out / "report.txt").exists()


def test_report_missing_dir(tmp_path):
    rc = cli.main(["report", "--out", str(tmp_path / "nope")])
    assert rc == 2


def test_parse_grid():
    assert cli.parse_grid("1,2,3") == [1.0, 2.0, 3.0]
    grid = cli.parse_grid("0.1:10:3:log")
    assert grid[0] == pytest.approx(0.1)
    assert grid[-1] == pytest.approx(10.0)
    lin = cli.parse_grid("0:1:3:lin")
    assert lin == [0.0, 0.5, 1.0]
    with pytest.raises(cli.ConfigError):
        cli.parse_grid("0.1:10:3:bogus")
