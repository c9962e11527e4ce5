"""Empirical-measure views: observable integration, histograms, and a
dictionary-based bounded-Lipschitz distance.

The BL distance is a max over a fixed dictionary of 1-bounded 1-Lipschitz
functions, hence a lower bound of the true BL metric. That is enough for
decay-rate experiments, which compare the same functional across N.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ConfigError
from .testfns import TestFunction

__all__ = ["EmpiricalSnapshot", "BLDictionary", "integrate", "bl_distance",
           "PhaseGrid", "phase_histogram"]

DEFAULT_DICT_SIZE = 256
DEFAULT_DICT_SEED = 0x51C3D1C7


@dataclass(frozen=True, eq=False)
class EmpiricalSnapshot:
    """Atoms (x_i, v_i) with weight 1/N each."""

    t: float
    x: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float))
        if self.x.shape != self.v.shape or self.x.ndim != 2:
            raise ConfigError("snapshot wants matching (N, d) position/velocity arrays")

    @property
    def n(self) -> int:
        return self.x.shape[0]


def integrate(snapshot: EmpiricalSnapshot, phi: Callable) -> float:
    """<phi, f^N> = (1/N) sum_i phi(x_i, v_i); phi takes batched (N, d) arrays."""
    vals = np.asarray(phi(snapshot.x, snapshot.v), dtype=float)
    return float(np.mean(vals))


class BLDictionary:
    """Fixed dictionary of 1-bounded, 1-Lipschitz functions on R^(2d).

    Members are random cosine features cos(w . (x, v) + theta) / max(1, |w|)
    plus an optional rescaled test-function family. Deterministic for a
    fixed seed; immutable.
    """

    def __init__(self, d: int, size: int = DEFAULT_DICT_SIZE,
                 seed: int = DEFAULT_DICT_SEED,
                 bumps: Optional[Sequence[TestFunction]] = None):
        rng = np.random.default_rng(seed)
        self.d = int(d)
        self.seed = int(seed)
        self.omegas = rng.standard_normal((size, 2 * d))
        self.thetas = rng.uniform(0.0, 2.0 * np.pi, size)
        norms = np.linalg.norm(self.omegas, axis=1)
        self.scales = 1.0 / np.maximum(1.0, norms)
        self.bumps = list(bumps) if bumps else []
        self.bump_scales = np.array(
            [1.0 / max(1.0, b.sup_bound(), b.lipschitz_bound()) for b in self.bumps])

    def __len__(self) -> int:
        return self.omegas.shape[0] + len(self.bumps)

    def member_values(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Values of every member at the given atoms: shape (N, len(self))."""
        z = np.concatenate([x, v], axis=1)
        feats = np.cos(z @ self.omegas.T + self.thetas) * self.scales
        if self.bumps:
            bump_vals = np.stack(
                [s * b.value(x, v) for b, s in zip(self.bumps, self.bump_scales)],
                axis=1)
            feats = np.concatenate([feats, bump_vals], axis=1)
        return feats

    def means(self, snapshot: EmpiricalSnapshot) -> np.ndarray:
        """<phi_j, f^N> for every member j."""
        return self.member_values(snapshot.x, snapshot.v).mean(axis=0)


def bl_distance(mu: EmpiricalSnapshot, nu: EmpiricalSnapshot,
                dictionary: BLDictionary) -> float:
    """max over the dictionary of |<phi, mu> - <phi, nu>|.

    A pseudometric on snapshots and a lower bound of the true
    bounded-Lipschitz distance.
    """
    return float(np.max(np.abs(dictionary.means(mu) - dictionary.means(nu))))


@dataclass(frozen=True)
class PhaseGrid:
    """Regular product grid over a position box times a velocity box."""

    x_lo: np.ndarray
    x_hi: np.ndarray
    v_lo: np.ndarray
    v_hi: np.ndarray
    bins_x: int = 16
    bins_v: int = 16

    def edges(self, d: int) -> list[np.ndarray]:
        es = []
        for k in range(d):
            es.append(np.linspace(self.x_lo[k], self.x_hi[k], self.bins_x + 1))
        for k in range(d):
            es.append(np.linspace(self.v_lo[k], self.v_hi[k], self.bins_v + 1))
        return es


def phase_histogram(snapshot: EmpiricalSnapshot, grid: PhaseGrid
                    ) -> tuple[np.ndarray, list[np.ndarray]]:
    """Cell masses (counts / N) on the phase-space grid.

    Atoms outside the box are dropped, so the table's total mass is
    1 - (fraction outside the box).
    """
    d = snapshot.x.shape[1]
    edges = grid.edges(d)
    sample = np.concatenate([snapshot.x, snapshot.v], axis=1)
    counts, _ = np.histogramdd(sample, bins=edges)
    return counts / snapshot.n, edges


def histogram_to_csv(table: np.ndarray, path) -> None:
    """Write a histogram table as `cell_index...,mass` rows (one per cell)."""
    axes = table.ndim
    header = ",".join(f"cell{k}" for k in range(axes)) + ",mass"
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for idx in np.ndindex(table.shape):
            fh.write(",".join(str(i) for i in idx) + f",{float(table[idx])!r}\n")
