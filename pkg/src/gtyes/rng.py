"""SplitMix64 as a counter-based generator.

The i-th output of a stream seeded with ``seed`` is
``mix(seed + (i + 1) * GAMMA mod 2**64)``, so any block of outputs can be
produced independently of the others.  Uniform doubles take the top 53 bits.
"""

from __future__ import annotations

import numpy as np

GAMMA = 0x9E3779B97F4A7C15
MASK64 = (1 << 64) - 1
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def splitmix64(seed: int, counter: int) -> int:
    """Scalar reference for output number ``counter`` (0-based)."""
    z = (seed + (counter + 1) * GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def u64_block(seed: int, start: int, count: int) -> np.ndarray:
    """Outputs ``start .. start+count-1`` of the stream as uint64."""
    base = (seed + (start + 1) * GAMMA) & MASK64
    idx = np.arange(count, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(base) + idx * np.uint64(GAMMA)
        return _mix(z)


def uniform_block(seed: int, start: int, count: int) -> np.ndarray:
    """Uniform doubles in [0, 1) for the given counter range."""
    return (u64_block(seed, start, count) >> np.uint64(11)).astype(np.float64) * 2.0**-53


class Stream:
    """Sequential view of a SplitMix64 stream."""

    def __init__(self, seed: int):
        self.seed = seed & MASK64
        self.counter = 0

    def next_u64(self) -> int:
        x = splitmix64(self.seed, self.counter)
        self.counter += 1
        return x

    def random(self) -> float:
        return (self.next_u64() >> 11) * 2.0**-53

    def randbelow(self, n: int) -> int:
        # rejection keeps the draw exactly uniform
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n

    def sample(self, n: int, k: int) -> list[int]:
        """k distinct values from range(n), sorted (Floyd's algorithm)."""
        chosen: set[int] = set()
        for j in range(n - k, n):
            r = self.randbelow(j + 1)
            chosen.add(j if r in chosen else r)
        return sorted(chosen)
