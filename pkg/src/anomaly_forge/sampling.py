"""Deterministic seeded sampling of exact rational torus points.

The generator is splitmix64: state advances by GAMMA and the output is
the mix-finalized state.  The update constants are fixed here so that an
implementation in any language reproduces identical sample streams:

    GAMMA = 0x9E3779B97F4B7C15
    MIX1  = 0xBF58476D1CE4E5B9
    MIX2  = 0x94D049BB133111EB

Coordinates are drawn as k/d with d from a configurable denominator list,
which exercises every carry pattern of the torus section map while
staying exact.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence, Tuple

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4B7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB

DEFAULT_DENOMINATORS = (2, 3, 4, 5, 6, 8, 12)


class SplitMix64:
    """64-bit splittable mix generator."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * MIX1) & MASK64
        z = ((z ^ (z >> 27)) * MIX2) & MASK64
        return z ^ (z >> 31)

    def next_below(self, n: int) -> int:
        return self.next_u64() % n

    def split(self, salt: int) -> "SplitMix64":
        """Derive an independent stream, e.g. one per test shard."""
        return SplitMix64(self.next_u64() ^ (salt * GAMMA) & MASK64)


def sample_fraction(rng: SplitMix64, denominators: Sequence[int] = DEFAULT_DENOMINATORS) -> Fraction:
    d = denominators[rng.next_below(len(denominators))]
    return Fraction(rng.next_below(d), d)


def sample_coords(
    rng: SplitMix64,
    rank: int,
    denominators: Sequence[int] = DEFAULT_DENOMINATORS,
) -> Tuple[Fraction, ...]:
    return tuple(sample_fraction(rng, denominators) for _ in range(rank))


def sample_int_vector(rng: SplitMix64, rank: int, lo: int, hi: int) -> Tuple[int, ...]:
    """Uniform integer vector with entries in [lo, hi]."""
    span = hi - lo + 1
    return tuple(lo + rng.next_below(span) for _ in range(rank))
