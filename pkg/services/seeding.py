"""
Per-drop seed derivation.

seed_drop = splitmix64(master + (drop + 1) * 0x9E3779B97F4A7C15), all mod 2**64:

    z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9
    z ^= z >> 27;  z *= 0x94D049BB133111EB
    z ^= z >> 31

Drops are independent of each other and of the worker that runs them.
"""

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(z: int) -> int:
    """Finalizer of the split-mix 64 generator."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(master: int, drop: int) -> int:
    """64-bit seed for drop index `drop` under master seed `master`."""
    if master < 0 or drop < 0:
        raise ValueError("master seed and drop index must be non-negative")
    return splitmix64(master + (drop + 1) * GOLDEN_GAMMA)


def drop_rng(master: int, drop: int) -> np.random.Generator:
    """Generator for one drop."""
    return np.random.default_rng(derive_seed(master, drop))
