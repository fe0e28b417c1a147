"""Portable seeded random number generation.

Every seeded generator in this project draws from SplitMix64, a tiny
fixed-algorithm PRNG with a 64-bit state, so that a given seed reproduces
the same stream bit-for-bit on any platform or language.  Gaussian variates
use the trigonometric Box-Muller transform over two SplitMix64 uniforms.
Platform RNGs (random, numpy.random) are deliberately not used anywhere
seed-determinism matters.
"""

from __future__ import annotations

import math

_MASK = 0xFFFFFFFFFFFFFFFF
_GAMMA = 0x9E3779B97F4A7C15


def _mix(z: int) -> int:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & _MASK
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK
    return z ^ (z >> 31)


def derive_seed(seed: int, tag: int) -> int:
    """Deterministically derive an independent child seed from (seed, tag)."""
    return _mix((seed + (tag + 1) * _GAMMA) & _MASK)


class SplitMix64:
    """SplitMix64 stream: state advances by the golden gamma, output is mixed."""

    __slots__ = ("state", "_spare_gauss")

    def __init__(self, seed: int):
        self.state = seed & _MASK
        self._spare_gauss: float | None = None

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK
        return _mix(self.state)

    def uniform(self) -> float:
        """Uniform float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * 2.0 ** -53

    def uniform_in(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.uniform()

    def randint(self, n: int) -> int:
        """Integer in [0, n) by rejection-free modulo of the mixed output.

        The bias for the n used here (n << 2**64) is far below measurable.
        """
        return self.next_u64() % n

    def choice(self, seq):
        return seq[self.randint(len(seq))]

    def shuffled(self, seq: list) -> list:
        """Fisher-Yates on a copy."""
        out = list(seq)
        for i in range(len(out) - 1, 0, -1):
            j = self.randint(i + 1)
            out[i], out[j] = out[j], out[i]
        return out

    def gauss(self, sigma: float = 1.0) -> float:
        """N(0, sigma^2) via trig Box-Muller; one spare is cached."""
        if self._spare_gauss is not None:
            z = self._spare_gauss
            self._spare_gauss = None
            return z * sigma
        # u1 in (0, 1] so log stays finite
        u1 = (self.next_u64() >> 11) * 2.0 ** -53
        u1 = 1.0 - u1
        u2 = (self.next_u64() >> 11) * 2.0 ** -53
        r = math.sqrt(-2.0 * math.log(u1))
        self._spare_gauss = r * math.sin(2.0 * math.pi * u2)
        return r * math.cos(2.0 * math.pi * u2) * sigma
