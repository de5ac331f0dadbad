"""Exact k-nearest-neighbor graphs over an embedding matrix.

Brute-force with blockwise vectorization: desk-scale inputs keep the O(n^2 d)
scan tractable, and exactness is what the downstream affinity construction
and the test oracles rely on.  Ties are broken by the smaller index so
results are platform-independent.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import UNLABELED, check_embeddings, check_labels

METRICS = ("euclidean", "cosine", "dot")

# Rows per block, sized so a (block, n) or (block, n, d) scratch stays small.
_BLOCK_BUDGET = 16_000_000


@dataclass
class NeighborGraph:
    """Per-point sorted neighbor lists.

    ``distances`` are dissimilarities sorted ascending per row: Euclidean
    distance, 1 - cosine similarity, or the negated inner product for the
    ``dot`` metric (negated values may be below zero; ordering is what
    matters there).  Self is always excluded.
    """

    k: int
    metric: str
    indices: np.ndarray
    distances: np.ndarray

    @property
    def n(self):
        return self.indices.shape[0]


def _euclidean_block(x, lo, hi):
    diff = x[lo:hi, None, :] - x[None, :, :]
    return np.sqrt((diff**2).sum(axis=2))


def _unit_rows(x, name):
    norms = np.linalg.norm(x, axis=1)
    if np.any(norms == 0):
        raise ValueError(f"{name}: zero-norm row, cosine metric undefined")
    return x / norms[:, None]


def pairwise_block(x, lo, hi, metric, xn=None):
    """Dissimilarities from rows [lo, hi) to every row, as a (hi-lo, n) block."""
    if metric == "euclidean":
        return _euclidean_block(x, lo, hi)
    if metric == "cosine":
        sim = xn[lo:hi] @ xn.T
        return np.maximum(1.0 - sim, 0.0)
    if metric == "dot":
        return -(x[lo:hi] @ x.T)
    raise ValueError(f"metric must be one of {METRICS}, got {metric!r}")


def build_knn(x, k, metric="euclidean", clamp_k=False):
    """Exact k nearest neighbors of every row under the given metric.

    Requires k < n because self is excluded; pass clamp_k=True to clamp k to
    n-1 instead of raising.
    """
    x = check_embeddings(x)
    n, d = x.shape
    if metric not in METRICS:
        raise ValueError(f"metric must be one of {METRICS}, got {metric!r}")
    if n < 2:
        raise ValueError(f"need at least 2 points, got {n}")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k >= n:
        if not clamp_k:
            raise ValueError(
                f"k={k} must be < n={n} (self is excluded); "
                "pass clamp_k=True to clamp"
            )
        k = n - 1

    xn = _unit_rows(x, "embeddings") if metric == "cosine" else None
    block = max(1, _BLOCK_BUDGET // (n * max(d, 8)))
    indices = np.empty((n, k), dtype=np.int64)
    distances = np.empty((n, k), dtype=np.float64)
    for lo in range(0, n, block):
        hi = min(lo + block, n)
        dis = pairwise_block(x, lo, hi, metric, xn)
        dis[np.arange(hi - lo), np.arange(lo, hi)] = np.inf
        # Stable sort: equal distances keep index order, the tie-break rule.
        order = np.argsort(dis, axis=1, kind="stable")[:, :k]
        indices[lo:hi] = order
        distances[lo:hi] = np.take_along_axis(dis, order, axis=1)
    return NeighborGraph(k=k, metric=metric, indices=indices, distances=distances)


def label_consistency(graph, labels):
    """Fraction of each point's neighbors sharing its label, plus the mean.

    The mean over a whole dataset is the standard diagnostic for how well an
    embedding preserves class structure.  Unlabeled points are rejected.
    """
    labels = check_labels(labels, n=graph.n, allow_unlabeled=False)
    same = labels[graph.indices] == labels[:, None]
    per_point = same.mean(axis=1)
    return per_point, float(per_point.mean())
