"""Level-set domain geometry.

Domains are described by a signed distance function ``ell`` with the
convention ``ell > 0`` inside, ``ell = 0`` on the wall, ``ell < 0`` outside,
so ``grad ell`` is the inward unit normal near the wall and the outward
normal is ``n = -grad ell``.

Provides exact closed forms for balls and annuli (spherical shells) plus a
``Custom`` domain driven by user-supplied evaluators, specular reflection of
velocities, and first-hitting-time computation along straight-line flight.
All operations are pure functions of immutable inputs and safe to call
concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConfigError, QueryOutsideBand, RootNotBracketed

__all__ = [
    "Domain",
    "Ball",
    "Annulus",
    "Custom",
    "SurfaceHit",
    "reflect",
    "domain_from_dict",
]

# Hits with |v.n| below this fraction of |v| are grazing (the measure-zero
# set Sigma^0) and are discarded: the flight continues unreflected.
GRAZING_REL_TOL = 1e-12

_MIN_SPEED = 1e-14


@dataclass(frozen=True)
class SurfaceHit:
    """First boundary contact of a straight flight segment.

    ``x_hit = x + tau * v`` up to the containment tolerance and the motion is
    outgoing at the contact: ``v . n >= 0``.
    """

    tau: float
    x_hit: np.ndarray
    n: np.ndarray


def reflect(v: np.ndarray, n: np.ndarray) -> np.ndarray:
    """Specular reflection ``v - 2 (v.n) n`` for unit outward normal ``n``.

    Preserves speed and the tangential component; flips the sign of the
    normal component. Involutive up to roundoff.
    """
    return v - 2.0 * float(np.dot(v, n)) * n


class Domain:
    """Base class for level-set domains in R^d (d = 2, 3).

    Gradient and normal queries are contractual only within the validity
    band ``|ell(x)| <= band``; the wall regularity itself is not verified
    (it is a hypothesis of the underlying theory, not checkable here).
    """

    kind: str = "abstract"

    def __init__(self, d: int, diameter: float, band: float,
                 containment_tolerance: Optional[float] = None,
                 inradius: Optional[float] = None):
        if d < 1:
            raise ConfigError(f"dimension must be >= 1, got {d}")
        self.d = int(d)
        self.diameter = float(diameter)
        self.band = float(band)
        self.containment_tolerance = (
            float(containment_tolerance)
            if containment_tolerance is not None
            else 1e-9 * self.diameter
        )
        self._inradius = inradius

    # -- signed distance ---------------------------------------------------

    def signed_distance(self, x: np.ndarray) -> np.ndarray:
        """ell(x); accepts a single point (d,) or a batch (..., d)."""
        raise NotImplementedError

    def grad_signed_distance(self, x: np.ndarray) -> np.ndarray:
        """grad ell(x) (the inward unit normal direction near the wall)."""
        raise NotImplementedError

    def outward_normal(self, x: np.ndarray) -> np.ndarray:
        """Unit outward normal ``-grad ell / |grad ell|`` at a single point.

        Raises QueryOutsideBand when ``|ell(x)| > band``.
        """
        ell = float(self.signed_distance(x))
        if abs(ell) > self.band:
            raise QueryOutsideBand(
                f"normal queried at ell={ell:.3g}, outside band {self.band:.3g}")
        g = -self.grad_signed_distance(x)
        norm = float(np.linalg.norm(g))
        return g / norm

    def contains(self, x: np.ndarray) -> np.ndarray:
        return self.signed_distance(x) >= -self.containment_tolerance

    @property
    def inradius(self) -> float:
        if self._inradius is None:
            raise ConfigError(f"{self.kind} domain has no declared inradius")
        return self._inradius

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    # -- hitting times -----------------------------------------------------

    def first_hit(self, x: np.ndarray, v: np.ndarray, dt: float) -> Optional[SurfaceHit]:
        """Smallest tau in (0, dt] with ell(x + tau v) = 0, or None.

        Grazing contacts (|v.n| < 1e-12 |v|) are discarded. Requires
        ell(x) >= -containment_tolerance.
        """
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


def _smallest_positive_exit(a: float, b: float, c: float, dt: float,
                            increasing: bool) -> Optional[float]:
    """Root of a tau^2 + b tau + c = 0 in (0, dt] where q crosses with the
    requested slope sign (increasing = True for q' > 0 at the root).

    Written against cancellation: the affected root is computed from the
    product of roots when the textbook formula is subtractive.
    """
    disc = b * b - 4.0 * a * c
    if disc <= 0.0:
        return None
    sq = math.sqrt(disc)
    if increasing:
        # larger root
        tau = (-b + sq) / (2.0 * a) if b <= 0.0 else (-2.0 * c) / (b + sq)
    else:
        # smaller root
        tau = (-b - sq) / (2.0 * a) if b >= 0.0 else (2.0 * c) / (-b + sq)
    if 0.0 < tau <= dt:
        return tau
    return None


class Ball(Domain):
    """Ball of radius R centered at the origin: ell(x) = R - |x|."""

    kind = "ball"

    def __init__(self, radius: float, d: int = 2,
                 containment_tolerance: Optional[float] = None):
        if radius <= 0:
            raise ConfigError("ball radius must be positive")
        self.radius = float(radius)
        super().__init__(d=d, diameter=2.0 * radius, band=0.9 * radius,
                         containment_tolerance=containment_tolerance,
                         inradius=radius)

    def signed_distance(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.radius - np.linalg.norm(x, axis=-1)

    def grad_signed_distance(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        r = np.linalg.norm(x, axis=-1, keepdims=True)
        return -x / r

    def bounding_box(self):
        r = self.radius
        return -r * np.ones(self.d), r * np.ones(self.d)

    def first_hit(self, x, v, dt):
        speed2 = float(np.dot(v, v))
        if speed2 < _MIN_SPEED * _MIN_SPEED:
            return None
        b = 2.0 * float(np.dot(x, v))
        c = float(np.dot(x, x)) - self.radius * self.radius
        tau = _smallest_positive_exit(speed2, b, c, dt, increasing=True)
        if tau is None:
            return None
        x_hit = x + tau * v
        n = x_hit / float(np.linalg.norm(x_hit))
        if abs(float(np.dot(v, n))) < GRAZING_REL_TOL * math.sqrt(speed2):
            return None
        return SurfaceHit(tau=tau, x_hit=x_hit, n=n)

    def to_dict(self):
        return {"kind": "ball", "radius": self.radius}


class Annulus(Domain):
    """Shell r_in < |x| < r_out: ell(x) = min(|x| - r_in, r_out - |x|).

    The signed distance is exact only near each wall (there is a kink at the
    mid radius); the dynamics only query near the walls, which is why the
    band stops short of the kink.
    """

    kind = "annulus"

    def __init__(self, r_in: float, r_out: float, d: int = 2,
                 containment_tolerance: Optional[float] = None):
        if not (0 < r_in < r_out):
            raise ConfigError("annulus requires 0 < r_in < r_out")
        self.r_in = float(r_in)
        self.r_out = float(r_out)
        half_gap = 0.5 * (r_out - r_in)
        super().__init__(d=d, diameter=2.0 * r_out, band=0.98 * half_gap,
                         containment_tolerance=containment_tolerance,
                         inradius=half_gap)

    def signed_distance(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        r = np.linalg.norm(x, axis=-1)
        return np.minimum(r - self.r_in, self.r_out - r)

    def grad_signed_distance(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        r = np.linalg.norm(x, axis=-1, keepdims=True)
        inner_closer = (r[..., 0] - self.r_in) < (self.r_out - r[..., 0])
        sign = np.where(inner_closer, 1.0, -1.0)
        return sign[..., None] * x / r

    def bounding_box(self):
        r = self.r_out
        return -r * np.ones(self.d), r * np.ones(self.d)

    def first_hit(self, x, v, dt):
        speed2 = float(np.dot(v, v))
        if speed2 < _MIN_SPEED * _MIN_SPEED:
            return None
        speed = math.sqrt(speed2)
        b = 2.0 * float(np.dot(x, v))
        r2 = float(np.dot(x, x))
        # outer wall: |x + tau v|^2 - r_out^2 crosses zero going up
        tau_out = _smallest_positive_exit(
            speed2, b, r2 - self.r_out ** 2, dt, increasing=True)
        # inner wall: |x + tau v|^2 - r_in^2 crosses zero going down
        tau_in = _smallest_positive_exit(
            speed2, b, r2 - self.r_in ** 2, dt, increasing=False)

        best = None
        for tau, outer in ((tau_out, True), (tau_in, False)):
            if tau is None or (best is not None and tau >= best[0]):
                continue
            x_hit = x + tau * v
            rad = x_hit / float(np.linalg.norm(x_hit))
            n = rad if outer else -rad
            if abs(float(np.dot(v, n))) < GRAZING_REL_TOL * speed:
                continue
            best = (tau, x_hit, n)
        if best is None:
            return None
        return SurfaceHit(tau=best[0], x_hit=best[1], n=best[2])

    def to_dict(self):
        return {"kind": "annulus", "r_in": self.r_in, "r_out": self.r_out}


class Custom(Domain):
    """Domain defined by user-supplied ell and grad-ell evaluators.

    ``ell`` must be a true signed distance (unit gradient near the wall, and
    1-Lipschitz along straight lines); this is assumed, not verified, except
    that the unit-gradient property is spot-checked by finite differences
    inside the band. Evaluators must accept batched points (..., d).

    Hitting times are found by safe marching (steps bounded by the current
    distance, which cannot overshoot the wall for a signed distance) with a
    small floor, then bisection to the containment tolerance. A scan that
    exhausts its iteration budget raises RootNotBracketed: the step is too
    coarse for the geometry and the caller should reduce dt.
    """

    kind = "custom"

    def __init__(self, ell: Callable[[np.ndarray], np.ndarray],
                 grad_ell: Callable[[np.ndarray], np.ndarray],
                 d: int, diameter: float, band: float,
                 containment_tolerance: Optional[float] = None,
                 inradius: Optional[float] = None,
                 bbox: Optional[tuple[np.ndarray, np.ndarray]] = None,
                 max_scan_iters: int = 200_000):
        super().__init__(d=d, diameter=diameter, band=band,
                         containment_tolerance=containment_tolerance,
                         inradius=inradius)
        self._ell = ell
        self._grad = grad_ell
        self._bbox = bbox
        self.max_scan_iters = int(max_scan_iters)

    def signed_distance(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(self._ell(np.asarray(x, dtype=float)), dtype=float)

    def grad_signed_distance(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(self._grad(np.asarray(x, dtype=float)), dtype=float)

    def bounding_box(self):
        if self._bbox is None:
            raise ConfigError("custom domain has no declared bounding box")
        return self._bbox

    def check_unit_gradient(self, points: np.ndarray, h: float = 1e-6,
                            tol: float = 1e-4) -> None:
        """Finite-difference check |grad ell| = 1 at points inside the band."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        for p in points:
            if abs(float(self.signed_distance(p))) > self.band:
                continue
            g = np.array([
                (float(self.signed_distance(p + h * e)) -
                 float(self.signed_distance(p - h * e))) / (2 * h)
                for e in np.eye(self.d)])
            if abs(np.linalg.norm(g) - 1.0) > tol:
                raise ConfigError(
                    f"|grad ell| != 1 at {p} (got {np.linalg.norm(g):.6f}); "
                    "not a signed distance near the wall")

    def _bisect(self, x, v, lo, hi):
        """Refine a bracketed crossing ell(x + tau v) = 0 to |ell| <= tol."""
        tol = self.containment_tolerance
        f_lo = float(self.signed_distance(x + lo * v))
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            f_mid = float(self.signed_distance(x + mid * v))
            if abs(f_mid) <= tol:
                return mid
            if (f_mid > 0.0) == (f_lo > 0.0):
                lo, f_lo = mid, f_mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    def first_hit(self, x, v, dt):
        speed = float(np.linalg.norm(v))
        if speed < _MIN_SPEED:
            return None
        tol = self.containment_tolerance
        floor = max(tol, 1e-7 * self.diameter) / speed
        t = 0.0
        ell = float(self.signed_distance(x))
        tau = None
        for _ in range(self.max_scan_iters):
            t_next = min(t + max(ell, 0.0) / speed + floor, dt)
            ell_next = float(self.signed_distance(x + t_next * v))
            if ell_next < -tol:
                tau = self._bisect(x, v, t, t_next)
                break
            if -tol <= ell_next <= tol and t_next < dt:
                tau = t_next
                break
            if t_next >= dt:
                return None
            t, ell = t_next, ell_next
        else:
            raise RootNotBracketed(
                f"no boundary crossing bracketed within {self.max_scan_iters} "
                f"scan steps over dt={dt:.3g}; reduce dt")
        x_hit = x + tau * v
        g = -self.grad_signed_distance(x_hit)
        n = g / float(np.linalg.norm(g))
        if float(np.dot(v, n)) < GRAZING_REL_TOL * speed:
            # grazing touch (or inward-moving artifact): discard, keep flying
            remaining = dt - tau
            if remaining <= 0.0:
                return None
            nxt = self.first_hit(x + tau * v, v, remaining)
            if nxt is None:
                return None
            return SurfaceHit(tau=tau + nxt.tau, x_hit=nxt.x_hit, n=nxt.n)
        return SurfaceHit(tau=tau, x_hit=x_hit, n=n)

    def to_dict(self):
        return {"kind": "custom", "d": self.d, "diameter": self.diameter,
                "band": self.band}


def domain_from_dict(spec: dict, d: int) -> Domain:
    """Build a domain from its config-file form, e.g. {"kind":"ball","radius":1.0}."""
    spec = dict(spec)
    kind = spec.pop("kind", None)
    if kind == "ball":
        radius = spec.pop("radius", None)
        if spec or radius is None:
            raise ConfigError(f"ball domain wants exactly 'radius', got extras {sorted(spec)}")
        return Ball(radius=float(radius), d=d)
    if kind == "annulus":
        r_in, r_out = spec.pop("r_in", None), spec.pop("r_out", None)
        if spec or r_in is None or r_out is None:
            raise ConfigError("annulus domain wants exactly 'r_in' and 'r_out'")
        return Annulus(r_in=float(r_in), r_out=float(r_out), d=d)
    raise ConfigError(f"unknown domain kind {kind!r} (config accepts ball/annulus)")
