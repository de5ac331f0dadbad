"""Input validation helpers shared across the package."""

import numpy as np

# In-memory marker for points without a ground-truth label.  The on-disk
# label format stores this as 0xFFFFFFFF (see tspcluster.io).
UNLABELED = -1


def check_embeddings(x, name="embeddings"):
    """Coerce to a 2-D float64 array and reject empty or non-finite input."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError(f"{name} must be a 2-D array, got shape {x.shape}")
    if x.shape[0] == 0 or x.shape[1] == 0:
        raise ValueError(f"empty dataset: {name} has shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name} contains non-finite values")
    return x


def check_labels(y, n=None, allow_unlabeled=True, name="labels"):
    """Coerce to a 1-D int64 label vector, optionally checking its length."""
    y = np.asarray(y)
    if y.ndim != 1:
        raise ValueError(f"{name} must be a 1-D array, got shape {y.shape}")
    if y.size == 0:
        raise ValueError(f"empty labels: {name} has no entries")
    if not np.issubdtype(y.dtype, np.integer):
        raise ValueError(f"{name} must be integers, got dtype {y.dtype}")
    y = y.astype(np.int64)
    if np.any(y < UNLABELED):
        raise ValueError(f"{name} contains values below {UNLABELED}")
    if not allow_unlabeled and np.any(y == UNLABELED):
        raise ValueError(f"{name} contains unlabeled points (sentinel {UNLABELED})")
    if n is not None and y.shape[0] != n:
        raise ValueError(f"{name} has {y.shape[0]} entries, expected {n}")
    return y


def check_random_state(seed):
    """Turn an int seed, None, or an existing Generator into a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)
