"""Portable seeded randomness.

Everything random in the pipeline flows through splitmix64 so that plans are
reproducible bit-for-bit across platforms and implementation languages. The
algorithm tag recorded in every manifest is ``splitmix64-v1``:

* state update: ``state = (state + 0x9E3779B97F4A7C15) mod 2^64``
* output: the splitmix64 finalizer (mix64) of the updated state
* ``hash64(seed, n)`` is the output at stream position ``n`` of the stream
  seeded with ``seed``, computed in O(1)
* bounded ints use the Lemire multiply-shift reduction
  ``(next_u64() * n) >> 64``
* floats use the top 53 bits: ``next_u64() >> 11`` times ``2^-53``
"""

from __future__ import annotations

RNG_ALGORITHM = "splitmix64-v1"

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """splitmix64 finalizer: bijective 64-bit mix."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def hash64(seed: int, index: int) -> int:
    """Output of the splitmix64 stream seeded with `seed` at position `index`.

    Used to derive independent per-item seeds from a master seed so that
    worker scheduling can never reorder randomness.
    """
    return mix64((seed + (index + 1) * _GOLDEN) & _MASK64)


class SplitMix64:
    """Sequential splitmix64 stream."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        return mix64(self._state)

    def next_below(self, n: int) -> int:
        """Uniform int in [0, n) via Lemire multiply-shift."""
        if n <= 0:
            raise ValueError("next_below requires n >= 1")
        return (self.next_u64() * n) >> 64

    def next_int(self, lo: int, hi: int) -> int:
        """Uniform int in the inclusive range [lo, hi]."""
        if hi < lo:
            raise ValueError(f"empty range [{lo}, {hi}]")
        return lo + self.next_below(hi - lo + 1)

    def next_float(self) -> float:
        """Uniform float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def next_uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.next_float()
