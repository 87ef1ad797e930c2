"""Deterministic pseudo-random numbers for reproducible experiment suites.

All randomness in the CLI and the seeded test suites flows from a single
64-bit seed through SplitMix64, so runs are reproducible across platforms
and implementations.  The sequence is the standard one:

    state  <- (state + 0x9E3779B97F4A7C15) mod 2^64
    z      <- state
    z      <- (z XOR (z >> 30)) * 0xBF58476D1CE4E5B9   mod 2^64
    z      <- (z XOR (z >> 27)) * 0x94D049BB133111EB   mod 2^64
    output <- z XOR (z >> 31)

Doubles are drawn as (output >> 11) * 2^-53, uniform in [0, 1).
"""

from __future__ import annotations

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class SplitMix64:
    """SplitMix64 generator with helpers for the shapes the suites need."""

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK
        return z ^ (z >> 31)

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        u = (self.next_u64() >> 11) * 2.0**-53
        return lo + (hi - lo) * u

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi] (both ends included)."""
        if hi < lo:
            raise ValueError("empty range")
        span = hi - lo + 1
        return lo + self.next_u64() % span

    def choice(self, seq):
        return seq[self.randint(0, len(seq) - 1)]

    def sorted_distinct(self, count: int, lo: int, hi: int) -> tuple[int, ...]:
        """Distinct integers from [lo, hi], returned sorted ascending."""
        if count > hi - lo + 1:
            raise ValueError("range too small")
        picked: set[int] = set()
        while len(picked) < count:
            picked.add(self.randint(lo, hi))
        return tuple(sorted(picked))
