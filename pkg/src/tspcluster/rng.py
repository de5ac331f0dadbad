"""Deterministic pseudo-random generation with seed-splitting.

Backed by numpy's PCG64 generator: the same seed yields the same stream on
every platform, and independent child streams are derived by seed-splitting
rather than by sharing one generator across workers.
"""

import numpy as np


def make_rng(seed):
    """Seeded generator; equal seeds emit identical streams."""
    return np.random.default_rng(seed)


def split_rngs(seed, n):
    """Derive ``n`` statistically independent child generators from one seed.

    Accepts an int seed or an existing Generator (whose state advances).
    """
    if isinstance(seed, np.random.Generator):
        return list(seed.spawn(n))
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]
