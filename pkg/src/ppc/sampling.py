"""Deterministic sample-point generation.

Points are drawn with an explicit xorshift64* generator so that identical
(seed, box, exclusions) inputs reproduce bit-identical samples on every
platform.  Constants:

* state update: x ^= x >> 12; x ^= x << 25; x ^= x >> 27 (64-bit)
* output multiplier: 0x2545F4914F6CDD1D
* seed scrambler (one splitmix64 step so arbitrary seeds give good states):
  gamma 0x9E3779B97F4A7C15, multipliers 0xBF58476D1CE4E5B9 and
  0x94D049BB133111EB

Uniform doubles take the top 53 bits: (x >> 11) * 2^-53.
"""

from __future__ import annotations

from typing import Sequence

from .jets import ChartPoint

MASK64 = (1 << 64) - 1
XS_MULT = 0x2545F4914F6CDD1D
SEED_GAMMA = 0x9E3779B97F4A7C15
SM_MULT1 = 0xBF58476D1CE4E5B9
SM_MULT2 = 0x94D049BB133111EB

GUARD_RADIUS = 0.1  # exclusion band around declared singular loci

AXIS_INDEX = {"x": 0, "y": 1, "z": 2}


class Xorshift64Star:
    """Marsaglia xorshift64 with the * output scrambler."""

    def __init__(self, seed: int):
        z = (int(seed) + SEED_GAMMA) & MASK64
        z = ((z ^ (z >> 30)) * SM_MULT1) & MASK64
        z = ((z ^ (z >> 27)) * SM_MULT2) & MASK64
        z ^= z >> 31
        self.state = z if z != 0 else SEED_GAMMA

    def next_u64(self) -> int:
        x = self.state
        x ^= x >> 12
        x = (x ^ (x << 25)) & MASK64
        x ^= x >> 27
        self.state = x
        return (x * XS_MULT) & MASK64

    def uniform(self) -> float:
        return (self.next_u64() >> 11) * 2.0 ** -53


def sample_points(box: Sequence[Sequence[float]], n: int, seed: int,
                  exclude: Sequence[tuple] = ()) -> list[ChartPoint]:
    """n points uniform in the box, rejecting the guard band of radius 0.1
    around each declared singular locus (axis name, center)."""
    rng = Xorshift64Star(seed)
    bands = [(AXIS_INDEX[a] if isinstance(a, str) else int(a), float(c))
             for a, c in exclude]
    points = []
    attempts = 0
    limit = max(10000, 1000 * n)
    while len(points) < n:
        attempts += 1
        if attempts > limit:
            raise ValueError("sampling box is (almost) covered by exclusion bands")
        coords = [lo + rng.uniform() * (hi - lo) for lo, hi in box]
        if any(abs(coords[axis] - center) < GUARD_RADIUS
               for axis, center in bands):
            continue
        points.append(ChartPoint(*coords))
    return points
