"""Statistical validation of the mean-field claims on recorded trajectories.

Implements the checkable identities:

* the weak-form functional F_psi of the empirical measure, evaluated two
  ways: from its definition (time quadrature plus an Ito sum against the
  common path) and from its martingale representation (Ito sum against the
  per-particle noise); the two agree up to time-discretization error,
* the 1/N mean-square scaling of F_psi across system sizes,
* the boundary-layer flux versus reflection-jump-sum identity and its
  delta ladder,
* the specular trace symmetry via symmetrized boundary observables,
* the shared-common-noise coupling experiment (paired systems with the
  same common path but fresh idiosyncratic noise and initial data).

Both stochastic integrals use left-endpoint (Ito) sums; any other
evaluation point would introduce a spurious Stratonovich drift and break
the identity between the two forms of F_psi.

All estimators are pure functions of immutable trajectories; experiments
run replicas concurrently and aggregate in a fixed order.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (ConfigError, LayerExceedsBand, MissingCommonPath,
                     MissingIdiosyncraticPaths, MissingSnapshots, StepTooCoarse)
from .kernels import mean_field_drift_all
from .measure import BLDictionary, bl_distance
from .noise import NoiseStreams, mix_seed
from .simulator import (SimConfig, Trajectory, simulate, typical_velocity_scale)
from .testfns import TestFunction, default_family

__all__ = [
    "ResidualEntry", "ResidualReport", "ScalingReport", "BoundaryReport",
    "ObservableResult", "SymmetryResult", "CouplingReport",
    "weak_residual", "martingale_form", "residual_report",
    "residual_discrepancy_experiment", "scaling_experiment",
    "event_jump_sum", "layer_flux", "trace_identity_check",
    "specular_symmetry_check", "coupling_experiment",
    "default_flux_observables", "default_symmetry_observables",
    "fit_loglog_slope", "family_for_config",
]

_SCALING_SALT = 0x5CA1146
_COUPLING_SALT = 0xC0091E
_FORK_SALT = 0xF02C

SCHEMA_VERSION = 1


# -- weak-form residual ---------------------------------------------------------


def _require_dense(traj: Trajectory) -> None:
    if not traj.dense or traj.n_snapshots != traj.config.n_steps + 1:
        raise MissingSnapshots("estimator needs snapshots at every step (record_every=1)")
    if traj.common_path is None:
        raise MissingCommonPath("trajectory lacks the realized common path")


def _check_support_clear_of_events(traj: Trajectory, psis: Sequence[TestFunction]) -> None:
    """The Ito expansion of psi has no boundary terms only because psi
    vanishes near the wall; a reflection while a particle is inside
    supp(psi) within one step breaks the quadrature."""
    if not traj.events:
        return
    dt = traj.config.dt
    n_steps = traj.config.n_steps
    for ev in traj.events:
        k = min(n_steps - 1, max(0, int((ev.t_hit - 1e-12 * dt) / dt)))
        for psi in psis:
            for kk in (k, k + 1):
                if bool(psi.in_spatial_support(traj.xs[kk][ev.particle])):
                    raise StepTooCoarse(
                        f"particle {ev.particle} reflected at t={ev.t_hit:.6g} while "
                        f"inside supp({psi.label or 'psi'}); reduce dt or shrink r_x")


def _residual_sweep(traj: Trajectory, psis: Sequence[TestFunction],
                    want_martingale: bool) -> tuple[np.ndarray, Optional[np.ndarray]]:
    """One pass over the dense trajectory accumulating F_def (and F_mart)."""
    _require_dense(traj)
    _check_support_clear_of_events(traj, psis)
    cfg = traj.config
    if want_martingale and traj.idio_path is None:
        raise MissingIdiosyncraticPaths(
            "martingale form needs record_idiosyncratic_noise=True")
    n_steps, dt = cfg.n_steps, cfg.dt
    sig, sigb = cfg.noise.sigma, cfg.noise.sigma_bar
    time_acc = np.zeros(len(psis))
    common_acc = np.zeros(len(psis))
    mart_acc = np.zeros(len(psis)) if want_martingale else None
    for k in range(n_steps):
        x, v = traj.xs[k], traj.vs[k]
        drift = traj.drifts[k] if traj.drifts is not None \
            else mean_field_drift_all(cfg.kernel, x, v)
        dw = traj.common_path[k + 1] - traj.common_path[k]
        db = traj.idio_path[k + 1] - traj.idio_path[k] if want_martingale else None
        for j, psi in enumerate(psis):
            gx, gv, lap = psi.weak_derivatives(x, v)
            transport = float(np.mean(np.sum(gx * v, axis=1)))
            interaction = float(np.mean(np.sum(gv * drift, axis=1)))
            diffusion = (sig + sigb) * float(np.mean(lap))
            time_acc[j] += dt * (transport + interaction + diffusion)
            gbar = gv.mean(axis=0)
            common_acc[j] += float(gbar @ dw)
            if want_martingale:
                mart_acc[j] += float(np.sum(gv * db)) / cfg.n
    start = np.array([float(np.mean(p.value(traj.xs[0], traj.vs[0]))) for p in psis])
    end = np.array([float(np.mean(p.value(traj.xs[-1], traj.vs[-1]))) for p in psis])
    f_def = end - start - time_acc - math.sqrt(2.0 * sigb) * common_acc
    f_mart = math.sqrt(2.0 * sig) * mart_acc if want_martingale else None
    return f_def, f_mart


def weak_residual(trajectory: Trajectory, psi: TestFunction) -> float:
    """F_psi(f^N) evaluated from its definition.

    Time integrals by left-endpoint quadrature at step times; the common-
    noise integral as an Ito left-point sum against the recorded path; the
    convolution H * f^N as the exact (1/N) pair sum.
    """
    f_def, _ = _residual_sweep(trajectory, [psi], want_martingale=False)
    return float(f_def[0])


def martingale_form(trajectory: Trajectory, psi: TestFunction) -> float:
    """F_psi(f^N) via its martingale representation
    sqrt(2 sigma) * sum_k (1/N) sum_i grad_v psi . dB^i_k."""
    _, f_mart = _residual_sweep(trajectory, [psi], want_martingale=True)
    return float(f_mart[0])


@dataclass(frozen=True)
class ResidualEntry:
    label: str
    f_def: float
    f_mart: Optional[float]
    discrepancy: Optional[float]

    def to_dict(self):
        return {"psi": self.label, "f_def": self.f_def, "f_mart": self.f_mart,
                "discrepancy": self.discrepancy}


@dataclass(frozen=True)
class ResidualReport:
    dt: float
    entries: list

    def to_dict(self):
        return {"dt": self.dt, "entries": [e.to_dict() for e in self.entries]}


def residual_report(trajectory: Trajectory, psis: Sequence[TestFunction]
                    ) -> ResidualReport:
    """F_def and, when noise paths were recorded, F_mart per test function."""
    want_mart = trajectory.idio_path is not None
    f_def, f_mart = _residual_sweep(trajectory, psis, want_martingale=want_mart)
    entries = []
    for j, psi in enumerate(psis):
        fm = float(f_mart[j]) if f_mart is not None else None
        entries.append(ResidualEntry(
            label=psi.label or f"psi{j}", f_def=float(f_def[j]), f_mart=fm,
            discrepancy=abs(float(f_def[j]) - fm) if fm is not None else None))
    return ResidualReport(dt=trajectory.config.dt, entries=entries)


def family_for_config(config: SimConfig, count: int = 8,
                      amplitude: float = 1.0) -> list[TestFunction]:
    """Default test-function family sized to the configured dynamics."""
    return default_family(config.domain, typical_velocity_scale(config),
                          count=count, amplitude=amplitude)


# -- experiments over replicas --------------------------------------------------


def _seeded(config: SimConfig, seed: int, **overrides) -> SimConfig:
    noise = replace(config.noise, master_seed=seed)
    return replace(config, noise=noise, **overrides)


def _residual_task(args):
    config, psis = args
    traj = simulate(config)
    f_def, f_mart = _residual_sweep(traj, psis, want_martingale=config.record_idiosyncratic_noise)
    return f_def, f_mart


def _map_tasks(fn, tasks, workers: int):
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks, chunksize=1))


def fit_loglog_slope(n_values, means, ses) -> tuple[float, float]:
    """Weighted least squares of log(mean) on log(N).

    Points are weighted by the inverse squared standard error of the log
    (delta method: se_log = se / mean).
    """
    n_values = np.asarray(n_values, dtype=float)
    means = np.asarray(means, dtype=float)
    ses = np.asarray(ses, dtype=float)
    if np.any(means <= 0):
        raise ConfigError("log-log fit needs positive means")
    x = np.log(n_values)
    y = np.log(means)
    se_log = np.where(ses > 0, ses / means, np.nan)
    if np.any(~np.isfinite(se_log)):
        w = np.ones_like(x)
    else:
        w = 1.0 / se_log ** 2
    wx = np.sum(w * x)
    wy = np.sum(w * y)
    wxx = np.sum(w * x * x)
    wxy = np.sum(w * x * y)
    wsum = np.sum(w)
    denom = wsum * wxx - wx * wx
    slope = (wsum * wxy - wx * wy) / denom
    intercept = (wy - slope * wx) / wsum
    return float(slope), float(intercept)


@dataclass(frozen=True)
class ScalingReport:
    n_values: list
    means: list
    ses: list
    slope: float
    intercept: float
    replicas: int

    def to_dict(self):
        return {"n_values": self.n_values, "means": self.means, "ses": self.ses,
                "slope": self.slope, "intercept": self.intercept,
                "replicas": self.replicas}


def scaling_experiment(base_config: SimConfig, n_list: Sequence[int],
                       replicas: int, psis: Optional[Sequence[TestFunction]] = None,
                       workers: int = 1) -> ScalingReport:
    """Mean-square of F_psi across system sizes with a fitted log-log slope.

    Each (N, replica) pair runs with a fresh master seed derived from the
    base seed; |F_def|^2 is averaged over replicas and the psi family.
    """
    n_list = sorted({int(n) for n in n_list})
    if len(n_list) < 3:
        raise ConfigError("scaling wants at least three distinct system sizes")
    if replicas < 16:
        raise ConfigError("scaling wants at least 16 replicas per size")
    if base_config.noise.sigma <= 0:
        raise ConfigError("scaling needs sigma > 0 (the mean-square constant "
                          "carries the idiosyncratic strength)")
    psis = list(psis) if psis is not None else family_for_config(base_config)
    tasks = []
    for n in n_list:
        for r in range(replicas):
            seed = mix_seed(base_config.noise.master_seed, _SCALING_SALT, n, r)
            tasks.append((_seeded(base_config, seed, n=n, record_every=1,
                                  record_drift=True,
                                  record_idiosyncratic_noise=False), psis))
    results = _map_tasks(_residual_task, tasks, workers)
    means, ses = [], []
    idx = 0
    for n in n_list:
        per_rep = []
        for _ in range(replicas):
            f_def, _ = results[idx]
            per_rep.append(float(np.mean(np.abs(f_def) ** 2)))
            idx += 1
        per_rep = np.array(per_rep)
        means.append(float(per_rep.mean()))
        ses.append(float(per_rep.std(ddof=1) / math.sqrt(replicas)))
    slope, intercept = fit_loglog_slope(n_list, means, ses)
    return ScalingReport(n_values=list(n_list), means=means, ses=ses,
                         slope=slope, intercept=intercept, replicas=replicas)


def residual_discrepancy_experiment(base_config: SimConfig, dts: Sequence[float],
                                    replicas: int,
                                    psis: Optional[Sequence[TestFunction]] = None,
                                    workers: int = 1) -> dict:
    """Replica-averaged |F_def - F_mart| at each dt (halving dt should
    shrink it by a first-order factor)."""
    psis = list(psis) if psis is not None else family_for_config(base_config)
    tasks = []
    for dt in dts:
        for r in range(replicas):
            seed = mix_seed(base_config.noise.master_seed, 0xD7, r)
            tasks.append((_seeded(base_config, seed, dt=float(dt), record_every=1,
                                  record_drift=True,
                                  record_idiosyncratic_noise=True), psis))
    results = _map_tasks(_residual_task, tasks, workers)
    out = {}
    idx = 0
    for dt in dts:
        vals = []
        for _ in range(replicas):
            f_def, f_mart = results[idx]
            vals.append(float(np.mean(np.abs(f_def - f_mart))))
            idx += 1
        out[float(dt)] = float(np.mean(vals))
    return out


# -- boundary estimators ---------------------------------------------------------


class BoundaryObservable:
    """Bounded measurable observable on (time, boundary point, velocity).

    Called with batched arrays: (s, x (m,d), v (m,d), n (m,d)) -> (m,).
    Off the wall, n is the extension -grad ell.
    """

    name = "observable"

    def __call__(self, s, x, v, n):  # pragma: no cover - interface
        raise NotImplementedError


class TanhOutflux(BoundaryObservable):
    name = "tanh_outflux"

    def __call__(self, s, x, v, n):
        return np.tanh(np.sum(v * n, axis=1))


class GaussOutflux(BoundaryObservable):
    name = "gauss_outflux"

    def __call__(self, s, x, v, n):
        w = np.sum(v * n, axis=1)
        return w * np.exp(-0.25 * w * w)


class SpeedGatedOutflux(BoundaryObservable):
    name = "speedgate_outflux"

    def __call__(self, s, x, v, n):
        w = np.sum(v * n, axis=1)
        return np.tanh(w) * np.exp(-np.sum(v * v, axis=1) / 8.0)


class LateWindowOutflux(BoundaryObservable):
    """Outflux restricted to the second half of the horizon."""

    name = "late_outflux"

    def __init__(self, t_final: float):
        self.t_half = 0.5 * t_final

    def __call__(self, s, x, v, n):
        if s < self.t_half:
            return np.zeros(x.shape[0])
        return np.tanh(np.sum(v * n, axis=1))


class ShiftedGaussian(BoundaryObservable):
    name = "shifted_gaussian"

    def __call__(self, s, x, v, n):
        dv = v - n
        return np.exp(-0.5 * np.sum(dv * dv, axis=1))


class PositiveOutflux(BoundaryObservable):
    name = "positive_outflux"

    def __call__(self, s, x, v, n):
        return np.maximum(np.tanh(np.sum(v * n, axis=1)), 0.0)


class LogisticNormal(BoundaryObservable):
    name = "logistic_normal"

    def __call__(self, s, x, v, n):
        w = np.sum(v * n, axis=1)
        return 1.0 / (1.0 + np.exp(-2.0 * w))


class CosNormalSpeedGate(BoundaryObservable):
    name = "cos_speedgate"

    def __call__(self, s, x, v, n):
        w = np.sum(v * n, axis=1)
        return np.cos(w) * np.exp(-np.sum(v * v, axis=1) / 8.0)


def default_flux_observables(t_final: float) -> list[BoundaryObservable]:
    """Observables with odd normal-velocity dependence (nonzero jump sums)."""
    return [TanhOutflux(), GaussOutflux(), SpeedGatedOutflux(),
            LateWindowOutflux(t_final)]


def default_symmetry_observables(t_final: float) -> list[BoundaryObservable]:
    """Base observables phi_0 for the symmetrization check."""
    return [ShiftedGaussian(), PositiveOutflux(), LogisticNormal(),
            CosNormalSpeedGate()]


class SymmetrizedObservable(BoundaryObservable):
    """phi(s,x,v) = phi_0(s,x,v) + phi_0(s,x,v - 2(v.n)n).

    By specular algebra the jump sum of a symmetrized observable vanishes
    identically; its layer flux then tests the trace symmetry.
    """

    def __init__(self, base: BoundaryObservable):
        self.base = base
        self.name = f"sym[{base.name}]"

    def __call__(self, s, x, v, n):
        w = np.sum(v * n, axis=1, keepdims=True)
        v_ref = v - 2.0 * w * n
        return self.base(s, x, v, n) + self.base(s, x, v_ref, n)


def event_jump_sum(trajectory: Trajectory, phi: BoundaryObservable) -> float:
    """(1/N) sum over reflection events of phi(post) - phi(pre)."""
    total = 0.0
    for ev in trajectory.events:
        x = ev.x[None, :]
        n = ev.n[None, :]
        post = float(phi(ev.t_hit, x, ev.v_post[None, :], n)[0])
        pre = float(phi(ev.t_hit, x, ev.v_pre[None, :], n)[0])
        total += post - pre
    return total / trajectory.config.n


def _layer_flux_series(trajectory: Trajectory, delta: float,
                       phi: BoundaryObservable) -> np.ndarray:
    """Per-step contributions of the layer estimator (already normalized)."""
    _require_dense(trajectory)
    cfg = trajectory.config
    domain = cfg.domain
    if not 0.0 < delta < domain.band:
        raise LayerExceedsBand(
            f"layer width {delta} must lie in (0, band={domain.band:.3g})")
    dt = cfg.dt
    out = np.zeros(cfg.n_steps)
    for k in range(cfg.n_steps):
        x = trajectory.xs[k]
        ell = np.atleast_1d(domain.signed_distance(x))
        mask = (ell > 0.0) & (ell <= delta)
        if not np.any(mask):
            continue
        xm = x[mask]
        vm = trajectory.vs[k][mask]
        grad = domain.grad_signed_distance(xm)
        n_ext = -grad
        vals = phi(float(trajectory.times[k]), xm, vm, n_ext)
        out[k] = dt / (delta * cfg.n) * float(np.sum(np.sum(grad * vm, axis=1) * vals))
    return out


def layer_flux(trajectory: Trajectory, delta: float, phi: BoundaryObservable) -> float:
    """Thin-layer estimator of the boundary flux functional.

    (1/delta) int_0^T (1/N) sum_i grad ell(X_i) . V_i phi(s, X_i, V_i)
    1{0 < ell(X_i) <= delta} ds, by left-endpoint quadrature, with the
    normal extended off the wall as -grad ell. By the Ito layer argument
    this converges (delta -> 0) to the reflection jump sum; equivalently it
    estimates -int v.n gamma(f) phi over the boundary measure.
    """
    return float(np.sum(_layer_flux_series(trajectory, delta, phi)))


@dataclass(frozen=True)
class ObservableResult:
    name: str
    jump_sum: float
    deltas: list
    fluxes: list
    rel_errors: list

    def to_dict(self):
        return {"name": self.name, "jump_sum": self.jump_sum,
                "deltas": self.deltas, "fluxes": self.fluxes,
                "rel_errors": self.rel_errors}


@dataclass(frozen=True)
class SymmetryResult:
    name: str
    jump_sum: float
    flux: float
    se: float

    @property
    def z(self) -> float:
        return self.flux / self.se if self.se > 0 else math.inf

    def to_dict(self):
        return {"name": self.name, "jump_sum": self.jump_sum,
                "flux": self.flux, "se": self.se, "z": self.z}


@dataclass(frozen=True)
class BoundaryReport:
    observables: list
    symmetry: list
    ladder_gaps: list

    def to_dict(self):
        return {"observables": [o.to_dict() for o in self.observables],
                "symmetry": [s.to_dict() for s in self.symmetry],
                "ladder_gaps": self.ladder_gaps}


def trace_identity_check(trajectory: Trajectory,
                         phis: Optional[Sequence[BoundaryObservable]] = None,
                         deltas: Sequence[float] = (0.08, 0.04, 0.02)
                         ) -> list[ObservableResult]:
    """Jump sum versus layer flux per observable over the delta ladder."""
    deltas = [float(d) for d in deltas]
    if any(d2 >= d1 for d1, d2 in zip(deltas, deltas[1:])) or any(d <= 0 for d in deltas):
        raise ConfigError("delta ladder must be positive and strictly decreasing")
    if phis is None:
        phis = default_flux_observables(trajectory.config.t_final)
    results = []
    for phi in phis:
        jump = event_jump_sum(trajectory, phi)
        fluxes = [layer_flux(trajectory, d, phi) for d in deltas]
        rel = [abs(f - jump) / max(abs(jump), 1e-300) for f in fluxes]
        results.append(ObservableResult(
            name=phi.name, jump_sum=jump, deltas=deltas, fluxes=fluxes,
            rel_errors=rel))
    return results


def specular_symmetry_check(trajectory: Trajectory,
                            phi0s: Optional[Sequence[BoundaryObservable]] = None,
                            delta: float = 0.02, n_blocks: int = 16,
                            n_boot: int = 500, boot_seed: int = 0xB007
                            ) -> list[SymmetryResult]:
    """Symmetrized-observable check of the specular trace condition.

    The jump sum of a symmetrized observable cancels algebraically; the
    layer flux should vanish within noise. The standard error comes from a
    block bootstrap over contiguous time windows.
    """
    if phi0s is None:
        phi0s = default_symmetry_observables(trajectory.config.t_final)
    rng = np.random.default_rng(boot_seed)
    results = []
    for phi0 in phi0s:
        phi = SymmetrizedObservable(phi0)
        jump = event_jump_sum(trajectory, phi)
        series = _layer_flux_series(trajectory, delta, phi)
        flux = float(series.sum())
        blocks = np.array([b.sum() for b in np.array_split(series, n_blocks)])
        draws = rng.integers(0, n_blocks, size=(n_boot, n_blocks))
        boot = blocks[draws].sum(axis=1)
        se = float(boot.std(ddof=1))
        results.append(SymmetryResult(name=phi.name, jump_sum=jump,
                                      flux=flux, se=se))
    return results


def boundary_report(trajectory: Trajectory,
                    deltas: Sequence[float] = (0.08, 0.04, 0.02),
                    phis: Optional[Sequence[BoundaryObservable]] = None,
                    phi0s: Optional[Sequence[BoundaryObservable]] = None
                    ) -> BoundaryReport:
    """Full boundary validation: trace identity ladder plus symmetry check."""
    obs = trace_identity_check(trajectory, phis=phis, deltas=deltas)
    sym = specular_symmetry_check(trajectory, phi0s=phi0s, delta=min(deltas))
    # mean over observables of successive flux differences along the ladder
    gaps = []
    for j in range(len(deltas) - 1):
        gaps.append(float(np.mean([abs(o.fluxes[j] - o.fluxes[j + 1]) for o in obs])))
    return BoundaryReport(observables=obs, symmetry=sym, ladder_gaps=gaps)


# -- coupling experiment ----------------------------------------------------------


@dataclass(frozen=True)
class CouplingReport:
    n_values: list
    means: list
    ses: list
    slope: float
    intercept: float
    replicas: int

    def to_dict(self):
        return {"n_values": self.n_values, "means": self.means, "ses": self.ses,
                "slope": self.slope, "intercept": self.intercept,
                "replicas": self.replicas}


def _coupling_task(args):
    config, dictionary = args
    streams_a = NoiseStreams.from_config(config.noise)
    streams_b = streams_a.fork_idiosyncratic(
        mix_seed(config.noise.master_seed, _FORK_SALT))
    traj_a = simulate(config, streams=streams_a)
    traj_b = simulate(config, streams=streams_b)
    dists = [bl_distance(traj_a.snapshot(k), traj_b.snapshot(k), dictionary)
             for k in range(traj_a.n_snapshots)]
    return float(np.mean(dists))


def coupling_experiment(base_config: SimConfig, n_list: Sequence[int],
                        replicas: int, workers: int = 1,
                        dictionary: Optional[BLDictionary] = None,
                        snapshot_target: int = 50) -> CouplingReport:
    """Paired systems sharing the common noise: distance decay versus N.

    Each pair shares the common stream by construction (the fork re-keys
    only idiosyncratic and initial draws); the time-averaged dictionary
    BL distance between paired empirical measures is averaged over replicas
    and its log-log slope fitted against N.
    """
    n_list = sorted({int(n) for n in n_list})
    if len(n_list) < 3:
        raise ConfigError("coupling wants at least three distinct system sizes")
    if dictionary is None:
        dictionary = BLDictionary(
            base_config.d, bumps=family_for_config(base_config))
    stride = max(1, base_config.n_steps // snapshot_target)
    tasks = []
    for n in n_list:
        for r in range(replicas):
            seed = mix_seed(base_config.noise.master_seed, _COUPLING_SALT, n, r)
            tasks.append((_seeded(base_config, seed, n=n, record_every=stride,
                                  record_drift=False,
                                  record_idiosyncratic_noise=False), dictionary))
    results = _map_tasks(_coupling_task, tasks, workers)
    means, ses = [], []
    idx = 0
    for n in n_list:
        vals = np.array(results[idx:idx + replicas])
        idx += replicas
        means.append(float(vals.mean()))
        ses.append(float(vals.std(ddof=1) / math.sqrt(replicas)) if replicas > 1 else 0.0)
    if all(m > 0 for m in means):
        slope, intercept = fit_loglog_slope(n_list, means, ses)
    else:
        slope, intercept = math.nan, math.nan
    return CouplingReport(n_values=list(n_list), means=means, ses=ses,
                          slope=slope, intercept=intercept, replicas=replicas)
