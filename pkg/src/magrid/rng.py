"""Seeded randomness for the engine.

All stochastic decisions draw from a ``numpy.random.Generator`` backed by
PCG64, a named, well-documented generator whose output is reproducible
across platforms and whose state is explicitly serializable. Sub-streams
(one per epoch, one per model slot) are derived from the master seed with
the SplitMix64 finalizer so each stream is independently reproducible.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1

# Domain offsets keep per-epoch and per-model sub-seeds in disjoint index
# ranges; epoch indices and agent slots are small integers.
EPOCH_SEED_DOMAIN = 0
MODEL_SEED_DOMAIN = 1 << 32


def splitmix64(x: int) -> int:
    """The SplitMix64 finalizer (Steele, Lea & Flood 2014): a bijective
    64-bit mix with full avalanche, used here to turn structured inputs
    (seed xor index) into decorrelated sub-seeds."""
    z = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def split_seed(master: int, index: int) -> int:
    """Derive the sub-seed for stream ``index``: splitmix64(master ^ index)."""
    return splitmix64((master & _MASK64) ^ (index & _MASK64))


def make_rng(seed: int) -> np.random.Generator:
    """A fresh PCG64 generator for the given 64-bit seed."""
    return np.random.Generator(np.random.PCG64(seed & _MASK64))


def draw_index(rng: np.random.Generator, n: int) -> int:
    """Uniform index in [0, n) consuming exactly one double draw.

    Unlike ``Generator.integers`` (whose rejection sampling consumes a
    bound-dependent amount of state), this always advances the stream by
    one quantum, so draw budgets stay independent of candidate counts.
    Returns -1 when n == 0 (the draw still happens).
    """
    u = float(rng.random())
    if n <= 0:
        return -1
    return min(int(u * n), n - 1)


def rng_state(rng: np.random.Generator) -> dict:
    """Serializable snapshot of the generator state."""
    return rng.bit_generator.state


def rng_equal(a: np.random.Generator, b: np.random.Generator) -> bool:
    return a.bit_generator.state == b.bit_generator.state
