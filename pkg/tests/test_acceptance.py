"""Acceptance suite: one test per criterion, each printing a pass/fail line
(run with -s to see them live). Heavy statistical experiments use process
workers; everything is deterministic for the seeds fixed here.

Expected wall time on two cores: roughly 15-25 minutes.
"""

import json
import math
import time
from dataclasses import replace

import numpy as np
import pytest

import swarmsim as s
from swarmsim import validator
from swarmsim.cli import disk_billiard_endpoint, run as cli_run
from swarmsim.noise import mix_seed
from swarmsim.validator import (coupling_experiment,
                                residual_discrepancy_experiment,
                                scaling_experiment, specular_symmetry_check,
                                trace_identity_check)

from helpers import WORKERS, standard_config

# deltas: the trace-identity ladder is fixed by the acceptance statement;
# the symmetry functional uses a thinner layer because its target value is
# zero, so the O(delta) layer remainder must sit below statistical noise
TRACE_DELTAS = (0.08, 0.04, 0.02)
SYMMETRY_DELTA = 0.005


def announce(num, name, passed, detail):
    print(f"[ACCEPTANCE] criterion {num} ({name}): "
          f"{'PASS' if passed else 'FAIL'} -- {detail}")
    assert passed, f"criterion {num} ({name}): {detail}"


@pytest.fixture(scope="module", autouse=True)
def warm_compiled_kernels():
    # exclude one-off JIT compilation from the timed criteria
    s.simulate(standard_config(n=8, t_final=0.002, dt=1e-3))


@pytest.fixture(scope="module")
def boundary_trajectory():
    """Shared N=2048, T=2 dense run for the boundary criteria."""
    cfg = standard_config(n=2048, t_final=2.0)
    return s.simulate(cfg)


def _random_cases(count=10, seed=0xACCE55):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        r = 0.7 * math.sqrt(rng.uniform())
        a = rng.uniform(0, 2 * math.pi)
        x0 = r * np.array([math.cos(a), math.sin(a)])
        th = rng.uniform(0, 2 * math.pi)
        v0 = rng.uniform(0.5, 2.0) * np.array([math.cos(th), math.sin(th)])
        yield x0, v0


def billiard_config(x0, v0):
    return standard_config(
        n=1, t_final=2.5, dt=0.025, kernel=s.Zero(),
        noise=s.NoiseConfig(0.0, 0.0, 7),
        init=s.InitialLaw(spatial=s.FixedPoints(points=np.asarray(x0)[None, :]),
                          velocity=s.FixedVectors(vectors=np.asarray(v0)[None, :])))


def test_c1_billiard_exactness():
    t0 = time.perf_counter()
    canonical = s.simulate(billiard_config([0.0, 0.0], [1.0, 0.0]))
    err_x = np.linalg.norm(canonical.xs[-1, 0] - [-0.5, 0.0])
    err_v = np.linalg.norm(canonical.vs[-1, 0] - [-1.0, 0.0])
    errs = [err_x]
    for x0, v0 in _random_cases():
        traj = s.simulate(billiard_config(x0, v0))
        ref_x, _ = disk_billiard_endpoint(x0, v0, 2.5, 1.0)
        errs.append(float(np.linalg.norm(traj.xs[-1, 0] - ref_x)))
    elapsed = time.perf_counter() - t0
    max_err = max(errs)
    announce(1, "billiard exactness",
             max_err <= 1e-9 and err_v <= 1e-9 and elapsed < 1.0,
             f"max position error {max_err:.2e}, runtime {elapsed:.2f}s")


def test_c2_reflection_invariants():
    t0 = time.perf_counter()
    traj = s.simulate(standard_config())
    assert len(traj.events) > 0
    speed_err = max(
        abs(np.linalg.norm(ev.v_post) - np.linalg.norm(ev.v_pre))
        / (1.0 + np.linalg.norm(ev.v_pre)) for ev in traj.events)
    pre_sign = min(float(ev.v_pre @ ev.n) for ev in traj.events)
    post_sign = max(float(ev.v_post @ ev.n) for ev in traj.events)
    min_ell = float(np.min(traj.config.domain.signed_distance(
        traj.xs.reshape(-1, 2))))
    elapsed = time.perf_counter() - t0
    ok = (speed_err <= 1e-12 and pre_sign >= -1e-12 and post_sign <= 1e-12
          and min_ell >= -1e-9 and elapsed < 60.0)
    announce(2, "reflection invariants", ok,
             f"{len(traj.events)} events, speed err {speed_err:.2e}, "
             f"min ell {min_ell:.2e}, runtime {elapsed:.1f}s")


def test_c3_weak_residual_martingale_identity():
    out = residual_discrepancy_experiment(
        standard_config(), dts=[1e-3, 5e-4], replicas=32, workers=WORKERS)
    coarse, fine = out[1e-3], out[5e-4]
    ratio = coarse / fine
    announce(3, "weak residual identity", 1.4 <= ratio <= 2.8,
             f"mean |F_def - F_mart|: {coarse:.3e} at dt=1e-3, "
             f"{fine:.3e} at dt=5e-4, shrink factor {ratio:.2f}")


def test_c4_one_over_n_scaling():
    rep = scaling_experiment(standard_config(), [64, 128, 256, 512],
                             replicas=64, workers=WORKERS)
    ok_cs = -1.3 <= rep.slope <= -0.7
    zero_cfg = standard_config(
        kernel=s.Zero(),
        noise=s.NoiseConfig(0.25, 0.0, mix_seed(standard_config().noise.master_seed, 4)))
    rep_zero = scaling_experiment(zero_cfg, [64, 128, 256, 512],
                                  replicas=64, workers=WORKERS)
    ok_zero = -1.15 <= rep_zero.slope <= -0.85
    announce(4, "1/N scaling", ok_cs and ok_zero,
             f"CS slope {rep.slope:.3f} (band [-1.3, -0.7]), "
             f"zero-kernel slope {rep_zero.slope:.3f} (band [-1.15, -0.85])")


def test_c5_trace_identity(boundary_trajectory):
    results = trace_identity_check(boundary_trajectory, deltas=TRACE_DELTAS)
    worst = max(o.rel_errors[-1] for o in results)
    gaps = [float(np.mean([abs(o.fluxes[j] - o.fluxes[j + 1]) for o in results]))
            for j in range(len(TRACE_DELTAS) - 1)]
    monotone = all(g1 >= g2 for g1, g2 in zip(gaps, gaps[1:]))
    detail = ", ".join(f"{o.name}: {100 * o.rel_errors[-1]:.2f}%" for o in results)
    announce(5, "trace identity", worst <= 0.15 and monotone,
             f"rel errors at delta=0.02: {detail}; ladder gaps {gaps}")


def test_c6_specular_symmetry(boundary_trajectory):
    results = specular_symmetry_check(boundary_trajectory, delta=SYMMETRY_DELTA)
    jumps_ok = all(abs(r.jump_sum) <= 1e-12 for r in results)
    flux_ok = all(abs(r.flux) <= 3.0 * r.se for r in results)
    detail = ", ".join(f"{r.name}: z={r.z:+.2f}" for r in results)
    announce(6, "specular symmetry", jumps_ok and flux_ok,
             f"max |jump| {max(abs(r.jump_sum) for r in results):.1e}; {detail}")


def _moment_sup_task(seed):
    cfg = standard_config()
    cfg = replace(cfg, noise=replace(cfg.noise, master_seed=seed),
                  record_every=5)
    return s.moment_monitor(s.simulate(cfg)).sup


def test_c7_moment_bound():
    cfg = standard_config()
    bound = s.gronwall_bound(cfg)
    seeds = [mix_seed(cfg.noise.master_seed, 7, r) for r in range(32)]
    sups = validator._map_tasks(_moment_sup_task, seeds, workers=WORKERS)
    mean_sup = float(np.mean(sups))
    announce(7, "moment bound", mean_sup <= bound,
             f"mean sup over 32 seeds {mean_sup:.3f} <= bound {bound:.3e}")


def test_c8_coupling_decay():
    rep = coupling_experiment(standard_config(), [64, 256, 1024],
                              replicas=16, workers=WORKERS)
    decreasing = all(a > b for a, b in zip(rep.means, rep.means[1:]))
    announce(8, "coupling decay", decreasing and rep.slope <= -0.3,
             f"means {['%.4f' % m for m in rep.means]}, slope {rep.slope:.3f}")


def test_c9_determinism(tmp_path):
    raw = {
        "experiment": "converge",
        "sim": {"N": 16, "d": 2, "T": 0.05, "dt": 1e-3,
                "domain": {"kind": "ball", "radius": 1.0},
                "kernel": {"kind": "cucker_smale", "lambda": 1.0, "beta": 0.5,
                           "v_clip": 10.0},
                "noise": {"sigma": 0.25, "sigma_bar": 0.25, "master_seed": 99},
                "init": {"spatial": {"kind": "uniform_ball", "radius": 0.5},
                         "velocity": {"kind": "gaussian", "std": 1.0}}},
        "N_list": [8, 16, 32], "replicas": 16, "output_dir": "unused"}
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(raw))
    code_a, dir_a = cli_run(str(cfg_path), out_dir=str(tmp_path / "a"),
                            threads=WORKERS)
    code_b, dir_b = cli_run(str(cfg_path), out_dir=str(tmp_path / "b"),
                            threads=1)  # scheduling must not matter
    identical = (code_a == code_b == 0 and
                 (dir_a / "report.json").read_bytes()
                 == (dir_b / "report.json").read_bytes())
    announce(9, "determinism", identical,
             "byte-identical report.json across reruns and worker counts")
