"""Shared test fixtures: configs and independent oracle implementations.

Oracles here deliberately re-derive quantities from scratch (plain loops,
finite differences, dense scans) so they cannot share a bug with the
library code they check.
"""

from __future__ import annotations

import math
import os

import numpy as np

import swarmsim as s

WORKERS = int(os.environ.get("SWARMSIM_TEST_WORKERS", str(min(2, os.cpu_count() or 1))))


def standard_config(**overrides) -> s.SimConfig:
    """The standard validation configuration (scaled by overrides)."""
    base = dict(
        n=256, d=2, t_final=1.0, dt=1e-3,
        domain=s.Ball(1.0, d=2),
        kernel=s.CuckerSmale(lam=1.0, beta=0.5, v_clip=10.0),
        noise=s.NoiseConfig(sigma=0.25, sigma_bar=0.25, master_seed=20240601),
        init=s.InitialLaw(spatial=s.UniformBall(radius=0.5),
                          velocity=s.IsotropicGaussian(std=1.0)),
    )
    base.update(overrides)
    return s.SimConfig(**base)


def small_config(**overrides) -> s.SimConfig:
    """Cheap variant for unit tests."""
    merged = dict(n=32, t_final=0.05, dt=1e-3)
    merged.update(overrides)
    return standard_config(**merged)


# -- independent oracles -------------------------------------------------------


def naive_pair_force(kernel, dx, dv):
    """Reference H(dx, dv) written out longhand."""
    dx = np.asarray(dx, dtype=float)
    dv = np.asarray(dv, dtype=float)
    if isinstance(kernel, s.Zero):
        return np.zeros_like(dx)
    if isinstance(kernel, s.CuckerSmale):
        comm = kernel.lam * (1.0 + float(dx @ dx)) ** (-kernel.beta)
        speed = math.sqrt(float(dv @ dv))
        if speed > kernel.v_clip:
            dv = dv * (kernel.v_clip / speed)
        return -comm * dv
    if isinstance(kernel, s.MorseGradient):
        r = math.sqrt(float(dx @ dx))
        if r == 0.0:
            return np.zeros_like(dx)
        up = (-kernel.c_r * math.exp(-r / kernel.l_r)
              + kernel.c_a * math.exp(-r / kernel.l_a))
        return -up / r * dx
    raise TypeError(kernel)


def naive_drift(kernel, x, v, i):
    """Plain double-loop mean-field drift."""
    n = x.shape[0]
    acc = np.zeros(x.shape[1])
    for j in range(n):
        acc += naive_pair_force(kernel, x[i] - x[j], v[i] - v[j])
    return acc / n


def scan_first_crossing(domain, x, v, dt, samples=200_000):
    """Brute-force first boundary crossing time along x + s v, or None."""
    ss = np.linspace(0.0, dt, samples)
    pts = x[None, :] + ss[:, None] * v[None, :]
    ell = domain.signed_distance(pts)
    below = np.nonzero(ell <= 0.0)[0]
    inside0 = ell[0] > 0.0
    if len(below) == 0 or (not inside0 and len(below) == 1):
        return None
    k = below[0] if inside0 else below[1]
    lo, hi = ss[k - 1], ss[k]
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if float(domain.signed_distance(x + mid * v)) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def tiny_step_billiard(x, v, dt, domain, n_sub=10_000):
    """Refined-step billiard integrator: march in substeps, bisect each
    crossing, reflect with the mirror formula written out longhand."""
    x = np.array(x, dtype=float)
    v = np.array(v, dtype=float)
    remaining = dt
    h = dt / n_sub
    while remaining > 1e-18:
        step = min(h, remaining)
        nxt = x + step * v
        if float(domain.signed_distance(nxt)) > 0.0:
            x = nxt
            remaining -= step
            continue
        lo, hi = 0.0, step
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if float(domain.signed_distance(x + mid * v)) > 0.0:
                lo = mid
            else:
                hi = mid
        tau = 0.5 * (lo + hi)
        x = x + tau * v
        g = domain.grad_signed_distance(x)
        n = -g / np.linalg.norm(g)
        v = v - 2.0 * float(v @ n) * n
        remaining -= tau
    return x, v
