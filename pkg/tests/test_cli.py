"""Command-line front end: exit codes, artifacts, reproducibility."""

import csv
import json
import shutil
import subprocess
import sys
import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np
import pytest

from impedfit import cli, estimator
from impedfit.impedance import (
    EquilibriumSchedule,
    ImpedanceParameters,
    ImpedanceProfile,
    load_params,
    save_params,
)

ROOT = Path(__file__).resolve().parent.parent
ANKLE = str(ROOT / "data" / "ankle_gait.csv")


def run_main(*argv) -> int:
    return cli.main(list(argv))


# ---------------------------------------------------------------- estimate

def test_estimate_set_b_writes_artifacts(tmp_path):
    code = run_main("estimate", "--input", ANKLE, "--set", "B",
                    "--starts", "2", "--seed", "0", "--out", str(tmp_path))
    assert code == 0
    for name in ("params.json", "trace.csv", "result.json", "report.txt"):
        assert (tmp_path / name).exists()
    params = load_params(tmp_path / "params.json")
    assert params.schedule.n_sections == 3
    assert params.schedule.label == "B"
    report = (tmp_path / "report.txt").read_text()
    assert "converged       : True" in report
    result = estimator.load_result_json(tmp_path / "result.json")
    assert result.converged and result.feasible


def test_estimate_console_script(tmp_path):
    exe = shutil.which("impedfit")
    cmd = [exe] if exe else [sys.executable, "-m", "impedfit.cli"]
    proc = subprocess.run(
        cmd + ["estimate", "--input", ANKLE, "--set", "D", "--starts", "1",
               "--seed", "0", "--out", str(tmp_path)],
        capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert "wrote" in proc.stdout
    assert (tmp_path / "params.json").exists()


def test_estimate_missing_file_names_path(tmp_path, capsys):
    missing = str(tmp_path / "nope.csv")
    code = run_main("estimate", "--input", missing, "--set", "B",
                    "--out", str(tmp_path))
    assert code == 1
    assert missing in capsys.readouterr().err


def test_estimate_requires_sectioning(tmp_path, capsys):
    code = run_main("estimate", "--input", ANKLE, "--out", str(tmp_path))
    assert code == 1
    assert "--set or --boundaries" in capsys.readouterr().err


def test_estimate_bad_boundaries(tmp_path, capsys):
    code = run_main("estimate", "--input", ANKLE,
                    "--boundaries", "0,abc,1", "--out", str(tmp_path))
    assert code == 1
    assert "boundary" in capsys.readouterr().err


def test_estimate_custom_boundaries_and_window(tmp_path):
    code = run_main("estimate", "--input", ANKLE,
                    "--boundaries", "0,0.5,1", "--starts", "1",
                    "--fit-window", "0:0.63", "--out", str(tmp_path))
    assert code == 0
    params = load_params(tmp_path / "params.json")
    np.testing.assert_array_equal(params.schedule.boundaries, [0.0, 0.5, 1.0])


def test_estimate_exit_two_when_not_converged(tmp_path, monkeypatch):
    real = estimator.multi_start

    def capped(prob, n_starts=8, seed=0, **kw):
        return real(prob, n_starts=1, seed=seed, max_iters=1)

    monkeypatch.setattr(cli.estimator, "multi_start", capped)
    code = run_main("estimate", "--input", ANKLE, "--set", "D",
                    "--out", str(tmp_path))
    assert code == 2
    # artifacts are still written for inspection
    assert (tmp_path / "params.json").exists()
    assert (tmp_path / "report.txt").exists()


def test_estimate_deterministic_bytes(tmp_path):
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    for out in (out1, out2):
        assert run_main("estimate", "--input", ANKLE, "--set", "C",
                        "--starts", "2", "--seed", "3", "--out", str(out)) == 0
    assert (out1 / "params.json").read_bytes() == (out2 / "params.json").read_bytes()
    assert (out1 / "trace.csv").read_bytes() == (out2 / "trace.csv").read_bytes()


# ---------------------------------------------------------------- evaluate

def test_evaluate_reference_set_curves(tmp_path):
    code = run_main("evaluate", "--input", ANKLE, "--set", "A",
                    "--svg", "--out", str(tmp_path))
    assert code == 0
    with open(tmp_path / "curves.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["phase", "K", "D", "theta_eq", "tau_model",
                       "tau_data", "power"]
    first = rows[1]
    assert float(first[0]) == 0.0
    assert float(first[1]) == 2.21
    with open(tmp_path / "metrics.json") as fh:
        metrics = json.load(fh)
    assert set(metrics) >= {"rmse", "peak_power", "pushoff_phase"}

    ns = {"svg": "http://www.w3.org/2000/svg"}
    for name, n_series in (("stiffness.svg", 1), ("damping.svg", 1),
                           ("torque.svg", 2)):
        tree = ET.parse(tmp_path / name)            # well-formed XML
        polylines = tree.getroot().findall(".//svg:polyline", ns)
        assert len(polylines) == n_series


def test_evaluate_zero_impedance(tmp_path):
    zero = ImpedanceParameters(
        stiffness=ImpedanceProfile(coeffs=[0.0]),
        damping=ImpedanceProfile(coeffs=[0.0]),
        schedule=EquilibriumSchedule(boundaries=[0.0, 1.0], angles=[0.0]),
    )
    pfile = tmp_path / "zero.json"
    save_params(zero, pfile)
    code = run_main("evaluate", "--input", ANKLE, "--params", str(pfile),
                    "--out", str(tmp_path))
    assert code == 0
    with open(tmp_path / "curves.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    tau_model = [float(r[4]) for r in rows[1:]]
    assert tau_model == [0.0] * len(tau_model)


def test_evaluate_needs_parameter_source(tmp_path, capsys):
    code = run_main("evaluate", "--input", ANKLE, "--out", str(tmp_path))
    assert code == 1
    assert "--params" in capsys.readouterr().err


# ---------------------------------------------------------------- tune

def test_tune_set_c_published_factors(tmp_path):
    code = run_main("tune", "--set", "C", "--alpha", "0.5", "--beta", "0.166",
                    "--gamma", "20", "--out", str(tmp_path))
    assert code == 0
    tuned = load_params(tmp_path / "params.json")
    assert tuned.stiffness.coeffs[0] == pytest.approx(0.5 * 0.75 + 20.0,
                                                      rel=1e-15)
    assert tuned.damping.coeffs[0] == pytest.approx(0.166 * 0.18, rel=1e-15)


def test_tune_replacement_angles(tmp_path):
    code = run_main("tune", "--set", "B", "--angles=-0.1745,-0.2617,0",
                    "--out", str(tmp_path))
    assert code == 0
    tuned = load_params(tmp_path / "params.json")
    np.testing.assert_array_equal(tuned.schedule.angles,
                                  [-0.1745, -0.2617, 0.0])


# ---------------------------------------------------------------- synth

def test_synth_requires_kinematics_carrier(tmp_path, capsys):
    code = run_main("synth", "--set", "A", "--out", str(tmp_path))
    assert code == 1
    assert "--input" in capsys.readouterr().err


def test_synth_byte_identical_under_seed(tmp_path):
    out1, out2, out3 = (tmp_path / f"s{i}" for i in range(3))
    for out in (out1, out2):
        assert run_main("synth", "--input", ANKLE, "--set", "A",
                        "--noise-std", "0.2", "--seed", "7",
                        "--out", str(out)) == 0
    assert run_main("synth", "--input", ANKLE, "--set", "A",
                    "--noise-std", "0.2", "--seed", "8",
                    "--out", str(out3)) == 0
    b1 = (out1 / "synthetic.csv").read_bytes()
    assert b1 == (out2 / "synthetic.csv").read_bytes()
    assert b1 != (out3 / "synthetic.csv").read_bytes()


def test_synth_output_reloads(tmp_path):
    assert run_main("synth", "--input", ANKLE, "--set", "B",
                    "--out", str(tmp_path)) == 0
    from impedfit.gait_data import load_gait_csv
    d = load_gait_csv(tmp_path / "synthetic.csv")
    assert d.n_samples > 0
    assert d.phase[0] == 0.0 and d.phase[-1] == 1.0


# ---------------------------------------------------------------- report

def test_report_over_result_files(tmp_path):
    dirs = []
    for label in ("C", "D"):
        out = tmp_path / label
        assert run_main("estimate", "--input", ANKLE, "--set", label,
                        "--starts", "1", "--seed", "0",
                        "--out", str(out)) == 0
        dirs.append(out / "result.json")
    code = run_main("report", "--results", *map(str, dirs),
                    "--out", str(tmp_path))
    assert code == 0
    text = (tmp_path / "comparison.txt").read_text()
    lines = text.splitlines()
    assert len(lines) == 4                        # header, rule, two rows
    assert lines[2].startswith("C") and lines[3].startswith("D")
    assert (tmp_path / "comparison.csv").exists()
    with open(tmp_path / "comparison.json") as fh:
        assert len(json.load(fh)) == 2


def test_report_needs_results(tmp_path, capsys):
    code = run_main("report", "--out", str(tmp_path))
    assert code == 1
    assert "result" in capsys.readouterr().err


# ---------------------------------------------------------------- config

def test_config_file_supplies_options(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "input": ANKLE, "set": "B", "starts": 1, "seed": 0,
        "out": str(tmp_path / "from_config"),
    }))
    assert run_main("estimate", "--config", str(cfg)) == 0
    params = load_params(tmp_path / "from_config" / "params.json")
    assert params.schedule.label == "B"


def test_flags_override_config(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"input": ANKLE, "set": "B", "starts": 1}))
    out = tmp_path / "out"
    assert run_main("estimate", "--config", str(cfg), "--set", "D",
                    "--out", str(out)) == 0
    params = load_params(out / "params.json")
    assert params.schedule.label == "D"
    assert params.schedule.n_sections == 1


def test_unknown_config_key_rejected(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"input": ANKLE, "set": "B", "bogus": 1}))
    code = run_main("estimate", "--config", str(cfg), "--out", str(tmp_path))
    assert code == 1
    assert "bogus" in capsys.readouterr().err
