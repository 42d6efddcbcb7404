"""Self-contained deterministic pseudo-random stream.

Weight initialisation and the synthetic-face generator need streams that are
bit-identical across platforms and library versions, so they use this small
64-bit linear congruential generator (Knuth's MMIX multiplier/increment)
instead of a library RNG. Uniform doubles take the top 53 state bits.
"""

from __future__ import annotations

import math

_MASK64 = (1 << 64) - 1
_MULT = 6364136223846793005
_INC = 1442695040888963407


class Lcg64:
    """64-bit LCG: state <- (a*state + c) mod 2**64."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64
        # decorrelate nearby seeds before the first draw
        self.next_u64()
        self.next_u64()

    def next_u64(self) -> int:
        self._state = (_MULT * self._state + _INC) & _MASK64
        return self._state

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        """Uniform double in [lo, hi) from the top 53 bits of the state."""
        u = self.next_u64() >> 11
        return lo + (hi - lo) * (u * (1.0 / (1 << 53)))

    def uniforms(self, n: int, lo: float = 0.0, hi: float = 1.0) -> list[float]:
        return [self.uniform(lo, hi) for _ in range(n)]

    def gauss(self, sigma: float = 1.0) -> float:
        """One Box-Muller normal deviate."""
        u1 = self.uniform()
        while u1 <= 0.0:
            u1 = self.uniform()
        u2 = self.uniform()
        return sigma * math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)
