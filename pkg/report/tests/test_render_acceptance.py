"""End-to-end acceptance: render real converge and boundary runs produced
through the simulator CLI, checking slope text matches report.json verbatim.

Requires the swarmsim package; skipped when it is not installed (the
renderer itself only consumes files)."""

import json
import shutil
import subprocess
import sys

import pytest

from swarmreport import render

swarmsim_cli = shutil.which("swarmsim")
pytestmark = pytest.mark.skipif(swarmsim_cli is None,
                                reason="swarmsim CLI not installed")


def run_cli(tmp_path, raw, name):
    cfg = tmp_path / f"{name}.json"
    cfg.write_text(json.dumps(raw))
    out = tmp_path / name
    proc = subprocess.run(
        [swarmsim_cli, "--config", str(cfg), "--out", str(out), "--threads", "2"],
        capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return next(out.iterdir())


def base_sim(**over):
    sim = {
        "N": 64, "d": 2, "T": 0.2, "dt": 1e-3,
        "domain": {"kind": "ball", "radius": 1.0},
        "kernel": {"kind": "cucker_smale", "lambda": 1.0, "beta": 0.5,
                   "v_clip": 10.0},
        "noise": {"sigma": 0.25, "sigma_bar": 0.25, "master_seed": 2024},
        "init": {"spatial": {"kind": "uniform_ball", "radius": 0.5},
                 "velocity": {"kind": "gaussian", "std": 1.0}},
    }
    sim.update(over)
    return sim


def test_converge_run_renders_with_verbatim_slope(tmp_path):
    raw = {"experiment": "converge", "sim": base_sim(T=0.1),
           "N_list": [16, 32, 64], "replicas": 16, "output_dir": "unused"}
    run_dir = run_cli(tmp_path, raw, "converge")
    written = render(run_dir)
    assert set(written) >= {"scaling", "summary"}
    report = json.loads((run_dir / "report.json").read_text())
    summary = (run_dir / "summary.md").read_text()
    assert json.dumps(report["results"]["slope"]) in summary
    for crit in report["criteria"]:
        assert crit["name"] in summary


def test_boundary_run_renders_all_figures(tmp_path):
    raw = {"experiment": "boundary", "sim": base_sim(N=256, T=0.5),
           "delta_ladder": [0.08, 0.04], "output_dir": "unused"}
    run_dir = run_cli(tmp_path, raw, "boundary")
    written = render(run_dir)
    # boundary runs carry a decimated snapshot view, so every figure renders
    for name in ("boundary", "trajectory", "velocity", "summary"):
        assert name in written and written[name].exists()
    report = json.loads((run_dir / "report.json").read_text())
    summary = (run_dir / "summary.md").read_text()
    for sym in report["results"]["symmetry"]:
        assert json.dumps(sym["flux"]) in summary
