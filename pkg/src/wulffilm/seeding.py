"""Deterministic seed derivation for independent sample streams.

Every stochastic routine in the package takes a single 64-bit seed.  When an
experiment needs many independent streams (one per disorder sample, one per
Monte-Carlo chunk), stream ``i`` gets ``derive_seed(master, i)``.  The mixer
is a fixed splitmix64 finalizer over an affine index step, so it is

* injective in the index for a fixed master (odd multiplier, bijective
  finalizer), and
* stable across releases: the constants below are part of the output
  contract and must never change.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def derive_seed(master_seed: int, stream_index: int) -> int:
    """Map (master seed, stream index) to a statistically independent 64-bit seed."""
    z = (master_seed + (stream_index + 1) * _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
    return z ^ (z >> 31)
