"""Portable deterministic pseudorandom numbers.

Every stochastic routine in versaml takes a :class:`DeterministicRng` so that
runs are bit-reproducible on any platform. The generator is a 64-bit linear
congruential generator with Knuth's MMIX constants; it is not meant for
cryptography.
"""

import math

import numpy as np

MULTIPLIER = 6364136223846793005
INCREMENT = 1442695040888963407
MASK64 = (1 << 64) - 1


class DeterministicRng:
    """64-bit LCG; one instance per worker, never shared across threads.

    Parameters
    ----------
    seed : int
        Initial state, reduced modulo 2**64.
    """

    __slots__ = ("state", "_cached_gaussian")

    def __init__(self, seed=0):
        self.state = int(seed) & MASK64
        self._cached_gaussian = None

    def __repr__(self):
        return f"DeterministicRng(state={self.state})"

    def next_u64(self):
        self.state = (self.state * MULTIPLIER + INCREMENT) & MASK64
        return self.state

    def next_double(self):
        """Uniform real in [0, 1) built from the top 53 bits of one draw."""
        return (self.next_u64() >> 11) * (1.0 / 9007199254740992.0)

    def next_range(self, lo, hi):
        """Uniform integer in the inclusive range [lo, hi].

        Uses the high bits of each draw (the low bits of an LCG have short
        periods) and rejects values outside the range, so there is no
        modulo bias.
        """
        lo = int(lo)
        hi = int(hi)
        if lo > hi:
            raise ValueError(f"empty range: lo={lo} > hi={hi}")
        span = hi - lo + 1
        shift = 64 - (span - 1).bit_length()
        while True:
            value = self.next_u64() >> shift
            if value < span:
                return lo + value

    def next_uniform(self, lo, hi):
        return lo + (hi - lo) * self.next_double()

    def next_bool(self, probability=0.5):
        return self.next_double() < probability

    def shuffle(self, sequence):
        """Return a Fisher-Yates permuted copy of ``sequence``."""
        items = list(sequence)
        for i in range(len(items) - 1, 0, -1):
            j = self.next_range(0, i)
            items[i], items[j] = items[j], items[i]
        return items

    def next_gaussian(self):
        """Standard normal deviate (Box-Muller, second value cached)."""
        if self._cached_gaussian is not None:
            value = self._cached_gaussian
            self._cached_gaussian = None
            return value
        u1 = 1.0 - self.next_double()  # (0, 1], keeps log finite
        u2 = self.next_double()
        radius = math.sqrt(-2.0 * math.log(u1))
        angle = 2.0 * math.pi * u2
        self._cached_gaussian = radius * math.sin(angle)
        return radius * math.cos(angle)

    def uniform_array(self, size, lo=0.0, hi=1.0):
        return np.array([self.next_uniform(lo, hi) for _ in range(size)], dtype=float)

    def gaussian_array(self, size, scale=1.0):
        return np.array([scale * self.next_gaussian() for _ in range(size)], dtype=float)


def worker_rngs(base_seed, count):
    """Distinct per-worker generators, worker ``i`` seeded ``base_seed + i``."""
    return [DeterministicRng(base_seed + i) for i in range(count)]
