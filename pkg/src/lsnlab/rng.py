"""Random stream helpers.  Every sampler takes a ``numpy.random.Generator``."""

from __future__ import annotations

import numpy as np

__all__ = ["make_rng", "trial_rng", "randbits"]


def make_rng(seed=None) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def trial_rng(master_seed: int, point: int, trial: int) -> np.random.Generator:
    """Counter-mode stream for one trial; independent of scheduling order."""
    seq = np.random.SeedSequence(entropy=master_seed, spawn_key=(point, trial))
    return np.random.Generator(np.random.PCG64(seq))


def randbits(rng: np.random.Generator, k: int) -> int:
    if k <= 0:
        return 0
    if k <= 63:
        return int(rng.integers(0, 1 << k))
    words = rng.integers(0, 1 << 63, size=(k + 62) // 63, dtype=np.int64)
    raw = 0
    for wd in reversed(words.tolist()):
        raw = (raw << 63) | wd
    return raw & ((1 << k) - 1)
