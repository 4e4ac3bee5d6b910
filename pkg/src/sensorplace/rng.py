"""Seeded pseudo-randomness built on splitmix64.

Every stochastic component in the package (k-means++ seeding, the random
selector, synthetic noise) draws from this generator, so results reproduce
bit-for-bit from a 64-bit seed in any language with 64-bit integer
arithmetic.  State evolution (all arithmetic mod 2**64):

    state += 0x9E3779B97F4A7C15
    z = state
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    output = z ^ (z >> 31)

Conventions layered on the raw stream:

* uniform doubles in [0, 1) take the top 53 bits of one output word;
* each Gaussian consumes two uniforms (Box-Muller, cosine branch), with no
  caching, so scalar and batched draws follow one consumption order;
* bounded integers reduce one output word modulo the bound (bias < 2**-40
  for bounds below 2**24, irrelevant at sensor-network sizes).
"""

from __future__ import annotations

import math

import numpy as np

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    return z ^ (z >> 31)


class SplitMix64:
    """splitmix64 stream seeded with a 64-bit integer."""

    def __init__(self, seed: int):
        self._state = int(seed) & _MASK

    def next_uint64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK
        return _mix(self._state)

    def uniform(self) -> float:
        """Uniform double in [0, 1)."""
        return (self.next_uint64() >> 11) * 2.0**-53

    def below(self, bound: int) -> int:
        """Integer in [0, bound)."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        return self.next_uint64() % bound

    def gauss(self) -> float:
        """Standard normal draw; consumes exactly two uniforms."""
        u1 = 1.0 - self.uniform()  # (0, 1] keeps the log finite
        u2 = self.uniform()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def _uint64_block(self, count: int) -> np.ndarray:
        """Next `count` output words, advancing the state as scalar calls would."""
        start = self._state
        with np.errstate(over="ignore"):
            states = np.uint64(start) + np.uint64(_GAMMA) * np.arange(
                1, count + 1, dtype=np.uint64
            )
            z = states
            z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
            z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
            z = z ^ (z >> np.uint64(31))
        self._state = (start + count * _GAMMA) & _MASK
        return z

    def gauss_matrix(self, rows: int, cols: int) -> np.ndarray:
        """Row-major matrix of standard normals, two uniforms per entry."""
        k = rows * cols
        if k == 0:
            return np.zeros((rows, cols))
        words = self._uint64_block(2 * k)
        u = (words >> np.uint64(11)).astype(np.float64) * 2.0**-53
        u1 = 1.0 - u[0::2]
        u2 = u[1::2]
        g = np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)
        return g.reshape(rows, cols)

    def sample_without_replacement(self, n: int, m: int) -> list[int]:
        """First m entries of a Fisher-Yates shuffle of range(n)."""
        if m > n:
            raise ValueError("cannot sample more items than available")
        items = list(range(n))
        for i in range(m):
            j = i + self.below(n - i)
            items[i], items[j] = items[j], items[i]
        return items[:m]
