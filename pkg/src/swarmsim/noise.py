"""Counter-addressed Wiener increments.

Every Gaussian draw is a pure function of (master_seed, stream index,
step counter): draws are produced by running Philox in pure counter mode and
mapping raw 64-bit words through the inverse normal CDF. This gives

* bit-exact reproducibility for a fixed master seed,
* a common stream whose realization is independent of N (it lives at a
  reserved counter slot, not after the per-particle draws),
* per-particle streams that can be re-keyed wholesale (``fork``) while the
  common stream stays identical, which is what the paired-system coupling
  experiment needs,
* order-independence: particle loops can be evaluated in any order or
  concurrently without changing the realized noise.

Counter layout (four 64-bit lanes, little-endian):
    [block within call | fork tag | step k | stream class]
where the stream classes separate per-step idiosyncratic draws, per-step
common draws, and initial-condition draws. Each particle owns a fixed range
of blocks, so its draws never depend on how many other particles exist.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.random import Philox, SeedSequence
from scipy.special import ndtri

from .errors import ConfigError

__all__ = ["NoiseConfig", "NoiseStreams", "fork_idiosyncratic", "mix_seed"]

_CLASS_IDIO = np.uint64(1)
_CLASS_COMMON = np.uint64(2)
_CLASS_INIT = np.uint64(3)

_U64 = 0xFFFFFFFFFFFFFFFF

# words reserved per particle for initial-condition draws (2 Philox blocks)
_INIT_WORDS = 8


def _splitmix64(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & _U64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _U64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _U64
    return (z ^ (z >> 31)) & _U64


def mix_seed(*components: int) -> int:
    """Deterministically combine integers into a 64-bit seed."""
    s = 0x6A09E667F3BCC909
    for c in components:
        s = _splitmix64(s ^ (int(c) & _U64))
    return s


def _words_to_uniform(words: np.ndarray) -> np.ndarray:
    """uint64 -> double strictly inside (0, 1)."""
    return ((words >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0 ** -53


def _words_to_normal(words: np.ndarray) -> np.ndarray:
    return ndtri(_words_to_uniform(words))


@dataclass(frozen=True)
class NoiseConfig:
    """Noise strengths and the master seed.

    sigma is the idiosyncratic diffusivity, sigma_bar the common one; the
    velocity update uses sqrt(2 sigma) dB^i + sqrt(2 sigma_bar) dWbar.
    """

    sigma: float
    sigma_bar: float
    master_seed: int

    def __post_init__(self):
        if self.sigma < 0 or self.sigma_bar < 0:
            raise ConfigError("noise strengths must be nonnegative")

    def to_dict(self):
        return {"sigma": self.sigma, "sigma_bar": self.sigma_bar,
                "master_seed": self.master_seed}


class NoiseStreams:
    """Handles for the per-particle streams B^1..B^N and the common stream.

    Immutable; all sampling methods are pure functions of
    (master_seed, fork_tag, indices, step counter).
    """

    def __init__(self, master_seed: int, fork_tag: int = 0,
                 index_map: Optional[np.ndarray] = None):
        self.master_seed = int(master_seed)
        self.fork_tag = int(fork_tag) & _U64
        self._key = SeedSequence(self.master_seed).generate_state(2, np.uint64)
        self.index_map = None if index_map is None else np.asarray(index_map, dtype=np.int64)

    @classmethod
    def from_config(cls, config: NoiseConfig) -> "NoiseStreams":
        return cls(config.master_seed)

    def _raw(self, stream_class: np.uint64, step: int, n_words: int,
             tag: int = 0) -> np.ndarray:
        # the fork tag keys only idiosyncratic/initial draws; the common
        # stream lives at tag 0 so forks share it exactly
        counter = np.array([0, tag, int(step), stream_class], dtype=np.uint64)
        return Philox(counter=counter, key=self._key).random_raw(n_words)

    def _rows(self, stream_class: np.uint64, step: int, n: int, width: int,
              words_per_row: int) -> np.ndarray:
        """n rows of `width` normals, row i a fixed function of stream index i."""
        words = self._raw(stream_class, step, words_per_row * n, tag=self.fork_tag)
        words = words.reshape(n, words_per_row)[:, :width]
        rows = _words_to_normal(words)
        if self.index_map is not None:
            rows = rows[self.index_map[:n]]
        return rows

    # -- per-step increments ------------------------------------------------

    def sample_increments(self, step: int, dt: float, n: int, d: int
                          ) -> tuple[np.ndarray, np.ndarray]:
        """Wiener increments over one step: (dB: (n, d), dWbar: (d,)).

        Entries are N(0, dt); dB rows are i.i.d. across particles and steps,
        dWbar is independent of every dB and of n.
        """
        if dt <= 0:
            raise ConfigError("dt must be positive")
        if d > 4:
            raise ConfigError("counter layout supports d <= 4")
        root_dt = np.sqrt(dt)
        z = self._rows(_CLASS_IDIO, step, n, d, words_per_row=4)
        zbar = _words_to_normal(self._raw(_CLASS_COMMON, step, 4)[:d])
        return root_dt * z, root_dt * zbar

    def standard_normals(self, step: int, n: int, d: int) -> np.ndarray:
        """Unscaled idiosyncratic draws (used by tests and diagnostics)."""
        return self._rows(_CLASS_IDIO, step, n, d, words_per_row=4)

    def common_normals(self, step: int, d: int) -> np.ndarray:
        return _words_to_normal(self._raw(_CLASS_COMMON, step, 4)[:d])

    # -- initial-condition draws ---------------------------------------------

    def initial_draws(self, n: int, d: int) -> dict:
        """Per-particle draws for sampling the initial law.

        Returns position-direction normals (n, d), one position uniform (n,)
        and velocity normals (n, d); all counter-addressed per particle.
        """
        if 2 * d + 1 > _INIT_WORDS:
            raise ConfigError("initial-draw word budget supports d <= 3")
        words = self._raw(_CLASS_INIT, 0, _INIT_WORDS * n,
                          tag=self.fork_tag).reshape(n, _INIT_WORDS)
        if self.index_map is not None:
            words = words[self.index_map[:n]]
        return {
            "pos_normal": _words_to_normal(words[:, :d]),
            "pos_uniform": _words_to_uniform(words[:, 3]),
            "vel_normal": _words_to_normal(words[:, 4:4 + d]),
        }

    # -- derived streams ------------------------------------------------------

    def fork_idiosyncratic(self, new_master_component: int) -> "NoiseStreams":
        """Fresh idiosyncratic and initial-condition streams, same common stream."""
        tag = mix_seed(self.fork_tag, new_master_component)
        if tag == self.fork_tag:
            tag = _splitmix64(tag)
        return NoiseStreams(self.master_seed, fork_tag=tag, index_map=self.index_map)

    def with_index_map(self, perm: np.ndarray) -> "NoiseStreams":
        """Re-label particle slots: slot m draws from stream perm[m]."""
        return NoiseStreams(self.master_seed, fork_tag=self.fork_tag, index_map=perm)


def fork_idiosyncratic(streams: NoiseStreams, new_master_component: int) -> NoiseStreams:
    """Module-level alias for NoiseStreams.fork_idiosyncratic."""
    return streams.fork_idiosyncratic(new_master_component)
