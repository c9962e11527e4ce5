"""Smooth compactly supported test functions on D x R^d.

Each function is a product of radial bumps in position and velocity,

    psi(x, v) = A * b(|x - xc|^2 / rx^2) * b(|v - vc|^2 / rv^2),
    b(u) = exp(1 - 1/(1 - u)) for u < 1, else 0,

so psi is C^infinity with compact support and every derivative needed by the
weak formulation (grad_x, grad_v, laplacian_v) has a closed form via the
chain rule. Spatial supports are kept strictly interior to the domain: this
is what removes boundary terms from the Ito expansion of psi along particle
paths, so the margin is part of the contract, not a convenience.

The finite default family of eight functions stands in for the universal
quantifier "for all psi" of the weak formulation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import ConfigError
from .geometry import Annulus, Ball, Domain

__all__ = ["TestFunction", "default_family", "MARGIN_FACTOR"]

# beyond this the bump underflows double precision anyway; cutting keeps
# the (1-u)^-k prefactors finite
_U_CUT = 1.0 - 1.0 / 700.0

MARGIN_FACTOR = 0.1
_RX_FACTOR = 0.3
_RV_FACTOR = 2.0
_CENTER_RING_FACTOR = 0.45


def _bump(u: np.ndarray):
    """b, b', b'' of the normalized bump at u = (radius/scale)^2."""
    u = np.asarray(u, dtype=float)
    inside = u < _U_CUT
    w = np.where(inside, 1.0 - u, 1.0)
    b = np.where(inside, np.exp(1.0 - 1.0 / w), 0.0)
    b1 = np.where(inside, -b / (w * w), 0.0)
    b2 = np.where(inside, b * (1.0 / w ** 4 - 2.0 / w ** 3), 0.0)
    return b, b1, b2


@lru_cache(maxsize=1)
def _grad_shape_max() -> float:
    # max over u of |b'(u)| sqrt(u) = sqrt(u) b(u) / (1-u)^2, for the
    # Lipschitz bound below
    u = np.linspace(0.0, _U_CUT, 200_001)
    _, b1, _ = _bump(u)
    return float(np.max(np.abs(b1) * np.sqrt(u)))


@dataclass(frozen=True, eq=False)
class TestFunction:
    """One product-bump test function; immutable and freely shareable."""

    __test__ = False  # pytest: not a test case despite the name

    x_center: np.ndarray
    v_center: np.ndarray
    r_x: float
    r_v: float
    amplitude: float = 1.0
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "x_center", np.asarray(self.x_center, dtype=float))
        object.__setattr__(self, "v_center", np.asarray(self.v_center, dtype=float))
        if self.r_x <= 0 or self.r_v <= 0:
            raise ConfigError("test function radii must be positive")

    @property
    def d(self) -> int:
        return self.x_center.shape[-1]

    def _ux(self, x):
        dx = np.asarray(x, dtype=float) - self.x_center
        return np.sum(dx * dx, axis=-1) / self.r_x ** 2, dx

    def _uv(self, v):
        dv = np.asarray(v, dtype=float) - self.v_center
        return np.sum(dv * dv, axis=-1) / self.r_v ** 2, dv

    def value(self, x, v):
        ux, _ = self._ux(x)
        uv, _ = self._uv(v)
        bx, _, _ = _bump(ux)
        bv, _, _ = _bump(uv)
        return self.amplitude * bx * bv

    def grad_x(self, x, v):
        ux, dx = self._ux(x)
        uv, _ = self._uv(v)
        bx, bx1, _ = _bump(ux)
        bv, _, _ = _bump(uv)
        return (self.amplitude * bv * bx1 * 2.0 / self.r_x ** 2)[..., None] * dx

    def grad_v(self, x, v):
        ux, _ = self._ux(x)
        uv, dv = self._uv(v)
        bx, _, _ = _bump(ux)
        bv, bv1, _ = _bump(uv)
        return (self.amplitude * bx * bv1 * 2.0 / self.r_v ** 2)[..., None] * dv

    def laplacian_v(self, x, v):
        ux, _ = self._ux(x)
        uv, _ = self._uv(v)
        bx, _, _ = _bump(ux)
        _, bv1, bv2 = _bump(uv)
        d = self.d
        rad = 4.0 * uv / self.r_v ** 2 * bv2 + 2.0 * d / self.r_v ** 2 * bv1
        return self.amplitude * bx * rad

    def weak_derivatives(self, x, v):
        """(grad_x, grad_v, laplacian_v) sharing one bump evaluation.

        The weak-form sweep calls this per step for every family member;
        the separate accessors would recompute the bumps three times.
        """
        ux, dx = self._ux(x)
        uv, dv = self._uv(v)
        bx, bx1, _ = _bump(ux)
        bv, bv1, bv2 = _bump(uv)
        gx = (self.amplitude * bv * bx1 * 2.0 / self.r_x ** 2)[..., None] * dx
        gv = (self.amplitude * bx * bv1 * 2.0 / self.r_v ** 2)[..., None] * dv
        lap = self.amplitude * bx * (4.0 * uv / self.r_v ** 2 * bv2
                                     + 2.0 * self.d / self.r_v ** 2 * bv1)
        return gx, gv, lap

    def in_spatial_support(self, x) -> np.ndarray:
        dx = np.asarray(x, dtype=float) - self.x_center
        return np.sum(dx * dx, axis=-1) <= self.r_x ** 2

    def lipschitz_bound(self) -> float:
        """Upper bound on the full-gradient norm of psi."""
        g = 2.0 * _grad_shape_max()
        return abs(self.amplitude) * g * (1.0 / self.r_x + 1.0 / self.r_v)

    def sup_bound(self) -> float:
        return abs(self.amplitude)


def _ring_centers(radius: float, count: int, d: int) -> np.ndarray:
    """Deterministic well-spread centers on the sphere of given radius."""
    if d == 2:
        ang = 2.0 * np.pi * np.arange(count) / count
        return radius * np.stack([np.cos(ang), np.sin(ang)], axis=-1)
    if d == 3:
        # golden-spiral points on the sphere
        k = np.arange(count)
        z = 1.0 - (2.0 * k + 1.0) / count
        phi = np.pi * (1.0 + np.sqrt(5.0)) * k
        r = np.sqrt(np.maximum(1.0 - z * z, 0.0))
        return radius * np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=-1)
    raise ConfigError(f"default family supports d in (2, 3), got {d}")


def default_family(domain: Domain, velocity_scale: float, count: int = 8,
                   r_x_factor: float = _RX_FACTOR, r_v_factor: float = _RV_FACTOR,
                   amplitude: float = 1.0) -> list[TestFunction]:
    """Deterministic family of test functions with interior spatial support.

    Centers sit on a fixed lattice (a ring at 0.45 of the inradius for balls,
    the mid surface for annuli); r_x = 0.3 * inradius guarantees a support
    margin of at least MARGIN_FACTOR * inradius; r_v = 2 * velocity_scale.
    """
    if velocity_scale <= 0:
        raise ConfigError("velocity_scale must be positive")
    inr = domain.inradius
    r_x = r_x_factor * inr
    if isinstance(domain, Ball):
        centers = _ring_centers(_CENTER_RING_FACTOR * inr, count, domain.d)
    elif isinstance(domain, Annulus):
        mid = 0.5 * (domain.r_in + domain.r_out)
        centers = _ring_centers(mid, count, domain.d)
    else:
        raise ConfigError(
            "default_family knows center lattices for ball/annulus only; "
            "construct TestFunction directly for custom domains")
    margin = MARGIN_FACTOR * inr
    fns = []
    for idx, c in enumerate(centers):
        # ell is 1-Lipschitz, so ell >= ell(center) - r_x on the support
        if float(domain.signed_distance(c)) - r_x < margin - 1e-12:
            raise ConfigError("family center too close to the wall for the margin")
        fns.append(TestFunction(
            x_center=c, v_center=np.zeros(domain.d), r_x=r_x,
            r_v=r_v_factor * velocity_scale, amplitude=amplitude,
            label=f"psi{idx}"))
    return fns
