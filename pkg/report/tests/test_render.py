import json

import numpy as np
import pytest

from swarmreport import MissingArtifact, SchemaMismatch, load_run, render
from swarmreport.render import main


def write_report(run_dir, experiment, results, criteria=None, schema=1):
    run_dir.mkdir(parents=True, exist_ok=True)
    report = {"schema_version": schema, "experiment": experiment,
              "config": {"sim": {"domain": {"kind": "ball", "radius": 1.0}}},
              "results": results, "criteria": criteria or []}
    (run_dir / "report.json").write_text(json.dumps(report, indent=2))
    return report


def make_converge_run(tmp_path, slope=-0.9371823412):
    run_dir = tmp_path / "converge-x"
    report = write_report(
        run_dir, "converge",
        {"scaling": {"n_values": [64, 128, 256], "means": [4e-5, 2.2e-5, 1e-5],
                     "ses": [4e-6, 2e-6, 1e-6], "slope": slope,
                     "intercept": -2.7, "replicas": 16},
         "slope": slope},
        criteria=[{"name": "scaling_slope_in_band", "passed": True,
                   "value": slope, "threshold": [-1.3, -0.7]}])
    (run_dir / "points.csv").write_text(
        "N,mean,se\n64,4e-05,4e-06\n128,2.2e-05,2e-06\n256,1e-05,1e-06\n")
    return run_dir, report


def make_boundary_run(tmp_path, n_deltas=3):
    run_dir = tmp_path / "boundary-x"
    deltas = [0.08, 0.04, 0.02][:n_deltas]
    obs = [{"name": f"phi{k}", "jump_sum": -0.5 - 0.1 * k, "deltas": deltas,
            "fluxes": [-0.5 - 0.1 * k + 0.02 * (j + 1) for j in range(len(deltas))],
            "rel_errors": [0.04 * (j + 1) for j in range(len(deltas))]}
           for k in range(4)]
    sym = [{"name": f"sym[g{k}]", "jump_sum": 1e-15, "flux": 0.001 * k,
            "se": 0.01, "z": 0.1 * k} for k in range(4)]
    report = write_report(run_dir, "boundary",
                          {"observables": obs, "symmetry": sym,
                           "ladder_gaps": [0.02, 0.01]})
    with open(run_dir / "events.jsonl", "w") as fh:
        fh.write(json.dumps({"t_hit": 0.5, "particle": 0, "x": [1.0, 0.0],
                             "n": [1.0, 0.0], "v_pre": [1.0, 0.0],
                             "v_post": [-1.0, 0.0]}) + "\n")
    return run_dir, report


def make_simulate_run(tmp_path, with_events=True, n=4, steps=5):
    run_dir = tmp_path / "simulate-x"
    write_report(run_dir, "simulate",
                 {"n_events": 1 if with_events else 0, "final_time": 0.05,
                  "moment_sup": 2.0, "moment_final": 1.9, "gronwall_bound": 100.0})
    rng = np.random.default_rng(0)
    lines = ["t,particle,x0,x1,v0,v1"]
    for k in range(steps):
        t = 0.01 * k
        for i in range(n):
            x = 0.4 * rng.uniform(-1, 1, 2)
            v = rng.normal(size=2)
            lines.append(f"{t!r},{i}," + ",".join(repr(float(a)) for a in (*x, *v)))
    (run_dir / "snapshots.csv").write_text("\n".join(lines) + "\n")
    with open(run_dir / "events.jsonl", "w") as fh:
        if with_events:
            fh.write(json.dumps({"t_hit": 0.02, "particle": 1, "x": [0.9, 0.1],
                                 "n": [0.99, 0.11], "v_pre": [1.0, 0.0],
                                 "v_post": [-1.0, 0.0]}) + "\n")
    return run_dir


class TestLoadRun:
    def test_missing_report_raises(self, tmp_path):
        (tmp_path / "empty").mkdir()
        with pytest.raises(MissingArtifact):
            load_run(tmp_path / "empty")

    def test_schema_mismatch_raises(self, tmp_path):
        run_dir = tmp_path / "bad"
        write_report(run_dir, "simulate", {}, schema=999)
        with pytest.raises(SchemaMismatch):
            load_run(run_dir)

    def test_points_parsed(self, tmp_path):
        run_dir, _ = make_converge_run(tmp_path)
        art = load_run(run_dir)
        assert art.points.shape == (3, 3)
        assert art.experiment == "converge"


class TestRenderConverge:
    def test_scaling_figure_and_slope_text(self, tmp_path):
        run_dir, report = make_converge_run(tmp_path)
        written = render(run_dir)
        assert (run_dir / "scaling.png").exists()
        summary = (run_dir / "summary.md").read_text()
        # slope rendered with exactly the digits report.json carries
        assert json.dumps(report["results"]["slope"]) in summary
        assert "scaling_slope_in_band" in summary

    def test_summary_deterministic(self, tmp_path):
        run_dir, _ = make_converge_run(tmp_path)
        render(run_dir, tmp_path / "o1")
        render(run_dir, tmp_path / "o2")
        assert (tmp_path / "o1" / "summary.md").read_bytes() == \
            (tmp_path / "o2" / "summary.md").read_bytes()


class TestRenderBoundary:
    def test_boundary_figure_with_full_ladder(self, tmp_path):
        run_dir, report = make_boundary_run(tmp_path, n_deltas=3)
        written = render(run_dir)
        assert (run_dir / "boundary.png").exists()
        summary = (run_dir / "summary.md").read_text()
        for sym in report["results"]["symmetry"]:
            assert json.dumps(sym["flux"]) in summary

    def test_single_delta_ladder_renders(self, tmp_path):
        run_dir, _ = make_boundary_run(tmp_path, n_deltas=1)
        render(run_dir)
        assert (run_dir / "boundary.png").exists()


class TestRenderSimulate:
    def test_trajectory_and_velocity(self, tmp_path):
        run_dir = make_simulate_run(tmp_path)
        written = render(run_dir)
        assert (run_dir / "trajectory.png").exists()
        assert (run_dir / "velocity.png").exists()

    def test_zero_events_no_crash(self, tmp_path):
        run_dir = make_simulate_run(tmp_path, with_events=False)
        render(run_dir)
        assert (run_dir / "trajectory.png").exists()

    def test_out_dir_redirects(self, tmp_path):
        run_dir = make_simulate_run(tmp_path)
        out = tmp_path / "elsewhere"
        render(run_dir, out)
        assert (out / "trajectory.png").exists()
        assert not (run_dir / "trajectory.png").exists()


class TestCli:
    def test_render_subcommand(self, tmp_path, capsys):
        run_dir, _ = make_converge_run(tmp_path)
        assert main(["render", str(run_dir)]) == 0
        assert "summary" in capsys.readouterr().out

    def test_bad_run_dir_exit_2(self, tmp_path):
        (tmp_path / "nothing").mkdir()
        assert main(["render", str(tmp_path / "nothing")]) == 2
