"""Counter-based pseudo-random number generator (SplitMix64).

Draw ``i`` of a stream is ``mix64(c0 + (i + 1) * GAMMA)`` where ``c0`` is a
start counter derived from ``(seed, stream)``.  Replications of a simulation
use distinct streams of the same seed, so they are independent and can run
in any order or in parallel without changing results.

The compiled simulation kernel implements the same arithmetic on ``uint64``;
both backends therefore produce identical draw sequences, which makes
simulation output independent of the selected backend.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15  # 2**64 / golden ratio, the SplitMix64 increment


def mix64(z: int) -> int:
    """SplitMix64 output mixing function (Stafford variant 13)."""
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def stream_origin(seed: int, stream: int) -> int:
    """Start counter for stream ``stream`` of ``seed``."""
    return mix64((seed & MASK64) ^ mix64(((stream + 1) * GAMMA) & MASK64))


class Splitmix64:
    """One PRNG stream; advancing the counter by GAMMA yields the next draw."""

    __slots__ = ("_state",)

    def __init__(self, seed: int, stream: int = 0):
        self._state = stream_origin(seed, stream)

    def next_u64(self) -> int:
        self._state = (self._state + GAMMA) & MASK64
        return mix64(self._state)

    def below(self, n: int) -> int:
        """Unbiased integer in [0, n) via rejection of the top remainder."""
        if n <= 0:
            raise ValueError("n must be positive")
        threshold = (1 << 64) % n
        while True:
            x = self.next_u64()
            if x >= threshold:
                return x % n

    def unit(self) -> float:
        """Float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) / 9007199254740992.0
