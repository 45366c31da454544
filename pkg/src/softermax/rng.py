"""Deterministic counter-based PRNG (splitmix64) for test-data generation.

The algorithm is pinned so any reimplementation reproduces the exact same
matrices from a seed:

  state_i   = (seed + i * 0x9E3779B97F4A7C15) mod 2**64       (i = 1, 2, ...)
  z         = state_i
  z         = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9  mod 2**64
  z         = (z ^ (z >> 27)) * 0x94D049BB133111EB  mod 2**64
  output_i  = z ^ (z >> 31)

  uniform double in [0, 1):  (output >> 11) * 2**-53
  standard normal: Box-Muller on two consecutive outputs a, b:
      u1 = ((a >> 11) + 1) * 2**-53          (in (0, 1])
      u2 = (b >> 11) * 2**-53
      n  = sqrt(-2 ln u1) * cos(2 pi u2)

Each normal consumes exactly two 64-bit outputs.  The vectorized helpers
produce bit-identical streams to the scalar class.
"""

from __future__ import annotations

import math

import numpy as np

GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
MASK64 = (1 << 64) - 1


class SplitMix64:
    """Scalar reference generator; also the arbiter for the vectorized path."""

    def __init__(self, seed: int):
        self._state = seed & MASK64

    def next_u64(self) -> int:
        self._state = (self._state + GAMMA) & MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * MIX1) & MASK64
        z = ((z ^ (z >> 27)) * MIX2) & MASK64
        return z ^ (z >> 31)

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        u = (self.next_u64() >> 11) * 2.0**-53
        return lo + (hi - lo) * u

    def normal(self, mu: float = 0.0, sigma: float = 1.0) -> float:
        u1 = ((self.next_u64() >> 11) + 1) * 2.0**-53
        u2 = (self.next_u64() >> 11) * 2.0**-53
        return mu + sigma * math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi] (simple modulo; fine for test sizing)."""
        return lo + self.next_u64() % (hi - lo + 1)


def u64_stream(seed: int, n: int, offset: int = 0) -> np.ndarray:
    """Outputs offset+1 .. offset+n of the splitmix64 stream, vectorized."""
    idx = np.arange(offset + 1, offset + n + 1, dtype=np.uint64)
    z = (np.uint64(seed & MASK64) + idx * np.uint64(GAMMA))
    z = (z ^ (z >> np.uint64(30))) * np.uint64(MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(MIX2)
    return z ^ (z >> np.uint64(31))


def uniforms(seed: int, n: int, lo: float, hi: float, offset: int = 0) -> np.ndarray:
    u = (u64_stream(seed, n, offset) >> np.uint64(11)).astype(np.float64) * 2.0**-53
    return lo + (hi - lo) * u


def normals(seed: int, n: int, mu: float = 0.0, sigma: float = 1.0, offset: int = 0) -> np.ndarray:
    raw = u64_stream(seed, 2 * n, offset)
    u1 = ((raw[0::2] >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0**-53
    u2 = (raw[1::2] >> np.uint64(11)).astype(np.float64) * 2.0**-53
    return mu + sigma * np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)
