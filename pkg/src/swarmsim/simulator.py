"""Time-stepping of the reflected second-order particle system.

One step is a splitting scheme: (a) the mean-field drift is evaluated for
all particles from the pre-step snapshot (Jacobi update, which preserves
exchangeability and parallelism); (b) an Euler-Maruyama velocity update adds
drift, idiosyncratic noise and common noise; (c) positions are transported
ballistically for the full step with exact in-step specular reflections,
mirroring the between-hit construction of the underlying process.

Velocities are never clipped here; boundedness enters only through the
kernel. The cumulative common-noise path is always recorded because the
weak-form validator integrates against it.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Optional, Union

import numpy as np

from .errors import ConfigError, MaxReflectionsExceeded, UnsatisfiableSupport
from .geometry import Domain, reflect
from .kernels import KernelSpec, Zero, mean_field_drift_all, sup_norm
from .measure import EmpiricalSnapshot
from .noise import NoiseConfig, NoiseStreams

__all__ = [
    "UniformBall", "FixedPoints", "IsotropicGaussian", "FixedVectors",
    "InitialLaw", "SystemState", "SimConfig", "ReflectionEvent", "Trajectory",
    "sample_initial", "advance_with_reflections", "step", "simulate",
    "gronwall_bound", "moment_monitor", "increment_diagnostic",
    "typical_velocity_scale",
]


# -- initial law ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class UniformBall:
    """Uniform law on a ball strictly inside the domain."""

    radius: float
    center: Optional[np.ndarray] = None

    def to_dict(self):
        out = {"kind": "uniform_ball", "radius": self.radius}
        if self.center is not None:
            out["center"] = list(np.asarray(self.center, dtype=float))
        return out


@dataclass(frozen=True, eq=False)
class FixedPoints:
    points: np.ndarray

    def to_dict(self):
        return {"kind": "fixed", "points": np.asarray(self.points, dtype=float).tolist()}


@dataclass(frozen=True, eq=False)
class IsotropicGaussian:
    std: float
    mean: Optional[np.ndarray] = None

    def to_dict(self):
        out = {"kind": "gaussian", "std": self.std}
        if self.mean is not None:
            out["mean"] = list(np.asarray(self.mean, dtype=float))
        return out


@dataclass(frozen=True, eq=False)
class FixedVectors:
    vectors: np.ndarray

    def to_dict(self):
        return {"kind": "fixed", "vectors": np.asarray(self.vectors, dtype=float).tolist()}


@dataclass(frozen=True, eq=False)
class InitialLaw:
    """Product law for (X_0, V_0); the spatial part must sit strictly inside D."""

    spatial: Union[UniformBall, FixedPoints]
    velocity: Union[IsotropicGaussian, FixedVectors]

    def second_moments(self, d: int) -> tuple[float, float]:
        """(E|X_0|^2, E|V_0|^2), exact for every supported law."""
        if isinstance(self.spatial, UniformBall):
            c = np.zeros(d) if self.spatial.center is None else np.asarray(self.spatial.center)
            ex = float(c @ c) + self.spatial.radius ** 2 * d / (d + 2.0)
        else:
            pts = np.atleast_2d(np.asarray(self.spatial.points, dtype=float))
            ex = float(np.mean(np.sum(pts * pts, axis=1)))
        if isinstance(self.velocity, IsotropicGaussian):
            m = np.zeros(d) if self.velocity.mean is None else np.asarray(self.velocity.mean)
            ev = float(m @ m) + d * self.velocity.std ** 2
        else:
            vecs = np.atleast_2d(np.asarray(self.velocity.vectors, dtype=float))
            ev = float(np.mean(np.sum(vecs * vecs, axis=1)))
        return ex, ev

    def to_dict(self):
        return {"spatial": self.spatial.to_dict(), "velocity": self.velocity.to_dict()}


# -- state / config ------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SystemState:
    """Positions and velocities of the N particles at time t."""

    t: float
    x: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float))
        if self.x.shape != self.v.shape or self.x.ndim != 2 or self.x.shape[0] < 1:
            raise ConfigError("state wants matching (N, d) arrays with N >= 1")
        if not (np.all(np.isfinite(self.x)) and np.all(np.isfinite(self.v))):
            raise ConfigError("state entries must be finite")

    @property
    def n(self) -> int:
        return self.x.shape[0]


@dataclass(frozen=True, eq=False)
class SimConfig:
    n: int
    d: int
    t_final: float
    dt: float
    domain: Domain
    kernel: KernelSpec
    noise: NoiseConfig
    init: InitialLaw
    max_reflections_per_step: int = 64
    record_every: int = 1
    record_idiosyncratic_noise: bool = False
    record_drift: bool = False

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError("need at least one particle")
        if self.dt <= 0:
            raise ConfigError("dt must be positive")
        if self.t_final < 0:
            raise ConfigError("horizon must be nonnegative")
        if self.d != self.domain.d:
            raise ConfigError(f"config d={self.d} but domain is {self.domain.d}-dimensional")
        if self.record_every < 1:
            raise ConfigError("record_every must be >= 1")
        steps = round(self.t_final / self.dt) if self.t_final > 0 else 0
        if abs(self.t_final - steps * self.dt) > 1e-9 * max(self.dt, self.t_final):
            raise ConfigError("horizon must be an integer number of steps")
        # advisory only: a step should not cross a sizable fraction of the domain
        drift_scale = sup_norm(self.kernel)
        ex, ev = self.init.second_moments(self.d)
        speed = math.sqrt(ev) + math.sqrt(
            2.0 * self.d * (self.noise.sigma + self.noise.sigma_bar) * max(self.t_final, self.dt))
        if self.dt * (drift_scale + speed) > 0.1 * self.domain.diameter:
            warnings.warn("dt is coarse relative to the domain: "
                          f"dt*(|H|+speed) ~ {self.dt * (drift_scale + speed):.3g} "
                          f"vs diameter {self.domain.diameter:.3g}", stacklevel=2)

    @property
    def n_steps(self) -> int:
        return round(self.t_final / self.dt) if self.t_final > 0 else 0

    def to_dict(self):
        return {
            "N": self.n, "d": self.d, "T": self.t_final, "dt": self.dt,
            "domain": self.domain.to_dict(), "kernel": self.kernel.to_dict(),
            "noise": self.noise.to_dict(), "init": self.init.to_dict(),
            "max_reflections_per_step": self.max_reflections_per_step,
            "record_every": self.record_every,
            "record_idiosyncratic_noise": self.record_idiosyncratic_noise,
            "record_drift": self.record_drift,
        }


@dataclass(frozen=True, eq=False)
class ReflectionEvent:
    """One specular bounce: v_post = reflect(v_pre, n), speed preserved."""

    t_hit: float
    particle: int
    x: np.ndarray
    n: np.ndarray
    v_pre: np.ndarray
    v_post: np.ndarray


@dataclass(eq=False)
class Trajectory:
    """Recorded run: snapshots, reflection events, and realized noise paths.

    ``common_path`` holds the cumulative common-noise path at every step
    time regardless of the snapshot stride. ``drifts``/``idio_path`` are
    populated on request. Immutable by convention once returned.
    """

    config: SimConfig
    times: np.ndarray            # (S,)
    xs: np.ndarray               # (S, N, d)
    vs: np.ndarray               # (S, N, d)
    events: list
    common_times: np.ndarray     # (n_steps + 1,)
    common_path: np.ndarray      # (n_steps + 1, d)
    idio_path: Optional[np.ndarray] = None    # (n_steps + 1, N, d)
    drifts: Optional[np.ndarray] = None       # (n_steps, N, d), pre-step states

    @property
    def n_snapshots(self) -> int:
        return len(self.times)

    def snapshot(self, k: int) -> EmpiricalSnapshot:
        return EmpiricalSnapshot(t=float(self.times[k]), x=self.xs[k], v=self.vs[k])

    @property
    def dense(self) -> bool:
        """True when snapshots were taken at every step."""
        return self.config.record_every == 1


# -- operations ----------------------------------------------------------------

def sample_initial(init: InitialLaw, n: int, streams: NoiseStreams,
                   domain: Domain) -> SystemState:
    """N i.i.d. draws from the initial law, all strictly inside the domain."""
    d = domain.d
    draws = streams.initial_draws(n, d)
    if isinstance(init.spatial, UniformBall):
        center = np.zeros(d) if init.spatial.center is None \
            else np.asarray(init.spatial.center, dtype=float)
        rho = float(init.spatial.radius)
        # ell is 1-Lipschitz: ell >= ell(center) - rho on the support
        if float(domain.signed_distance(center)) - rho <= 0:
            raise UnsatisfiableSupport(
                f"uniform ball of radius {rho} at {center} is not strictly "
                "inside the domain")
        z = draws["pos_normal"]
        norms = np.maximum(np.linalg.norm(z, axis=1, keepdims=True), 1e-300)
        radii = rho * draws["pos_uniform"] ** (1.0 / d)
        x = center + radii[:, None] * (z / norms)
    else:
        pts = np.asarray(init.spatial.points, dtype=float)
        if pts.ndim == 1:
            pts = np.tile(pts, (n, 1))
        if pts.shape != (n, d):
            raise ConfigError(f"fixed points must have shape ({n}, {d})")
        if np.any(domain.signed_distance(pts) <= 0):
            raise UnsatisfiableSupport("fixed initial points must be strictly interior")
        x = pts.copy()
    if isinstance(init.velocity, IsotropicGaussian):
        mean = np.zeros(d) if init.velocity.mean is None \
            else np.asarray(init.velocity.mean, dtype=float)
        v = mean + init.velocity.std * draws["vel_normal"]
    else:
        vecs = np.asarray(init.velocity.vectors, dtype=float)
        if vecs.ndim == 1:
            vecs = np.tile(vecs, (n, 1))
        if vecs.shape != (n, d):
            raise ConfigError(f"fixed vectors must have shape ({n}, {d})")
        v = vecs.copy()
    return SystemState(t=0.0, x=x, v=v)


def advance_with_reflections(x: np.ndarray, v: np.ndarray, dt: float,
                             domain: Domain, max_reflections: int = 64,
                             t0: float = 0.0, particle: int = 0
                             ) -> tuple[np.ndarray, np.ndarray, list]:
    """Ballistic flight of total duration dt with exact specular bounces.

    Returns the endpoint, the final velocity, and the ordered reflection
    events. If roundoff leaves the position outside after a bounce it is
    projected back to the containment tolerance, which prevents escape
    cascades. Raises MaxReflectionsExceeded on chattering (dt too large
    near tangency).
    """
    x = np.asarray(x, dtype=float).copy()
    v = np.asarray(v, dtype=float).copy()
    tol = domain.containment_tolerance
    ell = float(domain.signed_distance(x))
    if ell < 0.0:
        x = x + (tol - ell) * domain.grad_signed_distance(x)
    events: list[ReflectionEvent] = []
    remaining = dt
    t_off = 0.0
    while True:
        if remaining <= 0.0:
            return x, v, events
        hit = domain.first_hit(x, v, remaining)
        if hit is None:
            return x + remaining * v, v, events
        if len(events) >= max_reflections:
            raise MaxReflectionsExceeded(
                f"more than {max_reflections} reflections in one step "
                f"(particle {particle} at t~{t0 + t_off:.6g}); reduce dt")
        t_off += hit.tau
        remaining -= hit.tau
        v_pre = v
        v = reflect(v, hit.n)
        x = hit.x_hit
        events.append(ReflectionEvent(
            t_hit=t0 + t_off, particle=particle, x=x.copy(), n=hit.n.copy(),
            v_pre=v_pre, v_post=v.copy()))
        ell = float(domain.signed_distance(x))
        if ell < 0.0:
            x = x + (tol - ell) * domain.grad_signed_distance(x)


def _step_full(state: SystemState, config: SimConfig,
               increments: tuple[np.ndarray, np.ndarray]
               ) -> tuple[SystemState, list, np.ndarray]:
    """One splitting step; also returns the pre-step drift for recording."""
    db, dwbar = increments
    drift = mean_field_drift_all(config.kernel, state.x, state.v)
    v_kicked = (state.v + drift * config.dt
                + math.sqrt(2.0 * config.noise.sigma) * db
                + math.sqrt(2.0 * config.noise.sigma_bar) * dwbar[None, :])
    dt = config.dt
    domain = config.domain
    x_new = np.empty_like(state.x)
    v_new = v_kicked.copy()
    # only particles within flight range of the wall can reflect
    ell = np.atleast_1d(domain.signed_distance(state.x))
    speed = np.linalg.norm(v_kicked, axis=1)
    near = ell <= speed * dt + 2.0 * domain.containment_tolerance
    far = ~near
    x_new[far] = state.x[far] + dt * v_kicked[far]
    events: list[ReflectionEvent] = []
    for i in np.nonzero(near)[0]:
        xi, vi, evs = advance_with_reflections(
            state.x[i], v_kicked[i], dt, domain,
            max_reflections=config.max_reflections_per_step,
            t0=state.t, particle=int(i))
        x_new[i] = xi
        v_new[i] = vi
        events.extend(evs)
    events.sort(key=lambda ev: ev.t_hit)  # global time order across particles
    return SystemState(t=state.t + dt, x=x_new, v=v_new), events, drift


def step(state: SystemState, config: SimConfig,
         increments: tuple[np.ndarray, np.ndarray]) -> tuple[SystemState, list]:
    """Advance one step: drift from the pre-step snapshot, velocity kick,
    then ballistic transport with exact reflections."""
    new_state, events, _ = _step_full(state, config, increments)
    return new_state, events


def simulate(config: SimConfig, streams: Optional[NoiseStreams] = None) -> Trajectory:
    """Run the system over [0, T]; deterministic given the master seed.

    ``streams`` may be supplied to share or fork noise between runs (the
    coupling experiment passes a fork that keeps the common stream).
    """
    if streams is None:
        streams = NoiseStreams.from_config(config.noise)
    state = sample_initial(config.init, config.n, streams, config.domain)
    n_steps = config.n_steps
    d = config.d

    rec_idx = sorted({0, n_steps} | set(range(0, n_steps + 1, config.record_every)))
    rec_set = set(rec_idx)
    times, xs, vs = [], [], []
    events: list[ReflectionEvent] = []
    common = np.zeros((n_steps + 1, d))
    idio = (np.zeros((n_steps + 1, config.n, d))
            if config.record_idiosyncratic_noise else None)
    drifts = (np.zeros((n_steps, config.n, d)) if config.record_drift else None)

    def record(k, st):
        if k in rec_set:
            times.append(st.t)
            xs.append(st.x.copy())
            vs.append(st.v.copy())

    record(0, state)
    for k in range(n_steps):
        db, dwbar = streams.sample_increments(k, config.dt, config.n, d)
        common[k + 1] = common[k] + dwbar
        if idio is not None:
            idio[k + 1] = idio[k] + db
        state, evs, drift = _step_full(state, config, (db, dwbar))
        if drifts is not None:
            drifts[k] = drift
        events.extend(evs)
        record(k + 1, state)

    return Trajectory(
        config=config,
        times=np.array(times),
        xs=np.array(xs) if xs else np.zeros((0, config.n, d)),
        vs=np.array(vs) if vs else np.zeros((0, config.n, d)),
        events=events,
        common_times=config.dt * np.arange(n_steps + 1),
        common_path=common,
        idio_path=idio,
        drifts=drifts,
    )


def gronwall_bound(config: SimConfig) -> float:
    """A priori bound on E sup_t (|X_t|^2 + |V_t|^2):

        exp((2 + 16 sigma + 16 sigma_bar) T)
        * (E[|X_0|^2 + |V_0|^2] + (|H|_inf^2 + 2 d (sigma + sigma_bar)) T).
    """
    ex, ev = config.init.second_moments(config.d)
    s, sb = config.noise.sigma, config.noise.sigma_bar
    h = sup_norm(config.kernel)
    t = config.t_final
    return math.exp((2.0 + 16.0 * s + 16.0 * sb) * t) * (
        ex + ev + (h * h + 2.0 * config.d * (s + sb)) * t)


@dataclass(frozen=True)
class MomentSeries:
    times: np.ndarray
    mean_square: np.ndarray     # (1/N) sum_i (|X_i|^2 + |V_i|^2) per snapshot
    running_sup: np.ndarray

    @property
    def sup(self) -> float:
        return float(self.running_sup[-1])


def moment_monitor(trajectory: Trajectory) -> MomentSeries:
    """Second-moment time series and its running supremum."""
    if trajectory.n_snapshots == 0:
        raise ConfigError("trajectory has no snapshots")
    ms = (np.sum(trajectory.xs ** 2, axis=(1, 2))
          + np.sum(trajectory.vs ** 2, axis=(1, 2))) / trajectory.xs.shape[1]
    return MomentSeries(times=trajectory.times, mean_square=ms,
                        running_sup=np.maximum.accumulate(ms))


def increment_diagnostic(trajectory: Trajectory, delta: float) -> float:
    """Mean over particles and snapshot times of |V_(t+delta) - V_t|.

    A small-increment regularity diagnostic, not a tightness proof.
    """
    if trajectory.n_snapshots < 2:
        raise ConfigError("need at least two snapshots")
    spacing = float(trajectory.times[1] - trajectory.times[0])
    stride = round(delta / spacing)
    if stride < 1 or abs(stride * spacing - delta) > 1e-9 * max(delta, spacing):
        raise ConfigError("delta must be a multiple of the snapshot spacing")
    if stride >= trajectory.n_snapshots:
        raise ConfigError("delta exceeds the recorded horizon")
    diff = trajectory.vs[stride:] - trajectory.vs[:-stride]
    return float(np.mean(np.linalg.norm(diff, axis=2)))


def typical_velocity_scale(config: SimConfig) -> float:
    """Per-component velocity scale after diffusion over the horizon."""
    _, ev = config.init.second_moments(config.d)
    var0 = ev / config.d
    grown = var0 + 2.0 * (config.noise.sigma + config.noise.sigma_bar) * max(config.t_final, config.dt)
    return math.sqrt(grown)
