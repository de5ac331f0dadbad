"""Lloyd's K-means with k-means++ seeding.

Used three ways: as the raw baseline, as the frozen-feature baseline, and to
initialize the clustering head from the final centers.  Restarts run on
split seed streams and the best inertia wins, so a fixed seed reproduces the
same result regardless of restart count ordering.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import check_embeddings, check_random_state
from .rng import split_rngs


@dataclass
class KMeansResult:
    centers: np.ndarray
    assignments: np.ndarray
    inertia: float
    iterations: int
    converged: bool
    inertia_history: list


def _sq_dist_to_centers(x, centers):
    # ||x - c||^2 per point/center, computed directly for exactness.
    diff = x[:, None, :] - centers[None, :, :]
    return (diff**2).sum(axis=2)


def _plus_plus_init(x, n_clusters, rng):
    n = x.shape[0]
    centers = np.empty((n_clusters, x.shape[1]), dtype=np.float64)
    centers[0] = x[rng.integers(n)]
    closest = ((x - centers[0]) ** 2).sum(axis=1)
    for c in range(1, n_clusters):
        total = closest.sum()
        if total > 0:
            idx = rng.choice(n, p=closest / total)
        else:
            idx = rng.integers(n)
        centers[c] = x[idx]
        np.minimum(closest, ((x - centers[c]) ** 2).sum(axis=1), out=closest)
    return centers


def _lloyd(x, n_clusters, rng, max_iter, tol):
    n = x.shape[0]
    centers = _plus_plus_init(x, n_clusters, rng)
    history = []
    converged = False
    iterations = 0
    assignments = np.zeros(n, dtype=np.int64)
    for iterations in range(1, max_iter + 1):
        sq = _sq_dist_to_centers(x, centers)
        assignments = sq.argmin(axis=1)
        point_cost = sq[np.arange(n), assignments]

        # Reseed empty clusters to the point currently farthest from its
        # center; keeps all clusters live for the head initializer.
        counts = np.bincount(assignments, minlength=n_clusters)
        for c in np.flatnonzero(counts == 0):
            far = int(point_cost.argmax())
            centers[c] = x[far]
            assignments[far] = c
            point_cost[far] = 0.0
            counts = np.bincount(assignments, minlength=n_clusters)

        inertia = float(point_cost.sum())
        history.append(inertia)
        if len(history) > 1:
            prev = history[-2]
            if prev - inertia <= tol * max(prev, 1e-300):
                converged = True
                break

        sums = np.zeros_like(centers)
        np.add.at(sums, assignments, x)
        centers = sums / counts[:, None]
    return KMeansResult(
        centers=centers,
        assignments=assignments,
        inertia=history[-1],
        iterations=iterations,
        converged=converged,
        inertia_history=history,
    )


def kmeans(x, n_clusters, rng=None, n_restarts=10, max_iter=300, tol=1e-6):
    """Best-of-n-restarts K-means.

    ``rng`` accepts a seed or Generator; each restart gets an independent
    child stream.  ``tol`` is the relative inertia improvement under which a
    run stops.  Raises if n_clusters exceeds the number of points.
    """
    x = check_embeddings(x)
    if n_clusters < 2:
        raise ValueError(f"n_clusters must be >= 2, got {n_clusters}")
    if x.shape[0] < n_clusters:
        raise ValueError(
            f"need at least n_clusters={n_clusters} points, got {x.shape[0]}"
        )
    if n_restarts < 1:
        raise ValueError("n_restarts must be >= 1")
    rng = check_random_state(rng)
    best = None
    for child in split_rngs(rng, n_restarts):
        result = _lloyd(x, n_clusters, child, max_iter, tol)
        if best is None or result.inertia < best.inertia:
            best = result
    return best


def init_head_from_kmeans(centers):
    """Head weights from cluster centers: each row is the unit-normalized
    center scaled by 1/sqrt(dim), so every row has norm 1/sqrt(dim)."""
    centers = np.asarray(centers, dtype=np.float64)
    if centers.ndim != 2:
        raise ValueError(f"centers must be 2-D, got shape {centers.shape}")
    norms = np.linalg.norm(centers, axis=1)
    if np.any(norms == 0):
        raise ValueError("zero-norm center cannot be normalized into a head row")
    return centers / (norms[:, None] * np.sqrt(centers.shape[1]))
