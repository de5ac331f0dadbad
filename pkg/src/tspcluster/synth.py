"""Synthetic latent spaces with known ground truth.

Serves as the desk-scale stand-in for real frozen-backbone embeddings: the
isotropic shape gives well-separated globular clusters, the ring shape gives
non-globular clusters on which plain K-means degrades while the trained head
does not, and the anisotropic shape sits in between.
"""

from dataclasses import dataclass

import numpy as np

SHAPES = ("isotropic", "anisotropic", "ring")

# Ring-shape layout, in radians: clusters sit on one shared circle as arcs.
# All but the last cluster are short arcs packed closely together; the last
# is one long arc kept under a half-circle so it remains representable as a
# convex cone (argmax cells of a bias-free linear head are convex).  The
# imbalance in arc extent is what makes inertia-minimizing partitions split
# the long arc and merge the short ones.
_RING_SMALL_ARC = np.deg2rad(12.0)
_RING_LONG_ARC = np.deg2rad(170.0)
_RING_SMALL_GAP = np.deg2rad(8.0)


@dataclass(frozen=True)
class BlobSpec:
    """Parameters of one synthetic dataset.

    ``center_separation`` is the minimum pairwise distance between cluster
    centers (isotropic/anisotropic); for the ring shape it sets the scale of
    the shared circle (radius = n_clusters * center_separation).
    ``imbalance`` in [0, 1) shrinks successive cluster sizes geometrically;
    0 keeps every cluster at exactly ``points_per_cluster``.
    """

    n_clusters: int
    points_per_cluster: int
    dim: int
    center_separation: float = 10.0
    within_std: float = 1.0
    shape: str = "isotropic"
    seed: int = 0
    imbalance: float = 0.0

    def __post_init__(self):
        if self.n_clusters < 2:
            raise ValueError("n_clusters must be >= 2")
        if self.dim < 2:
            raise ValueError("dim must be >= 2")
        if self.points_per_cluster < 1:
            raise ValueError("points_per_cluster must be >= 1")
        if self.within_std <= 0:
            raise ValueError("within_std must be > 0")
        if self.center_separation <= 0:
            raise ValueError("center_separation must be > 0")
        if self.shape not in SHAPES:
            raise ValueError(f"shape must be one of {SHAPES}, got {self.shape!r}")
        if not 0.0 <= self.imbalance < 1.0:
            raise ValueError("imbalance must be in [0, 1)")


def _streams(spec):
    seq = np.random.SeedSequence(spec.seed)
    return [np.random.default_rng(s) for s in seq.spawn(3)]


def _ring_layout(spec):
    """Arc spans and start angles of the ring shape."""
    k = spec.n_clusters
    spans = np.full(k, _RING_SMALL_ARC)
    spans[-1] = _RING_LONG_ARC
    used = spans.sum() + max(k - 2, 0) * _RING_SMALL_GAP
    if used >= 2.0 * np.pi:
        raise ValueError(f"ring shape supports at most ~17 clusters, got {k}")
    flank = (2.0 * np.pi - used) / 2.0
    starts = np.empty(k)
    pos = 0.0
    for c in range(k - 1):
        starts[c] = pos
        pos += spans[c] + (_RING_SMALL_GAP if c < k - 2 else flank)
    starts[k - 1] = pos
    return spans, starts


def cluster_sizes(spec):
    """Points per cluster; exactly balanced when imbalance is 0."""
    sizes = [
        max(1, round(spec.points_per_cluster * (1.0 - spec.imbalance) ** c))
        for c in range(spec.n_clusters)
    ]
    return np.asarray(sizes, dtype=np.int64)


def blob_centers(spec):
    """The cluster centers generate() draws around, reproducible from the spec.

    For the ring shape these are the arc centroids (the mean of a uniform
    arc pulled inside the circle by sinc(span/2)).
    """
    center_rng, _, _ = _streams(spec)
    if spec.shape == "ring":
        spans, starts = _ring_layout(spec)
        radius = spec.n_clusters * spec.center_separation
        mid = starts + spans / 2.0
        pull = np.sinc(spans / (2.0 * np.pi))  # np.sinc(x) = sin(pi x)/(pi x)
        centers = np.zeros((spec.n_clusters, spec.dim))
        centers[:, 0] = radius * pull * np.cos(mid)
        centers[:, 1] = radius * pull * np.sin(mid)
        return centers
    raw = center_rng.standard_normal((spec.n_clusters, spec.dim))
    diff = raw[:, None, :] - raw[None, :, :]
    dist = np.sqrt((diff**2).sum(axis=2))
    dmin = dist[np.triu_indices(spec.n_clusters, k=1)].min()
    if dmin <= 0:
        raise RuntimeError("degenerate random centers; pick another seed")
    return raw * (spec.center_separation / dmin)


def generate(spec):
    """Draw (embeddings, labels) for the spec; bit-identical given the seed."""
    _, transform_rng, noise_rng = _streams(spec)
    centers = blob_centers(spec)
    sizes = cluster_sizes(spec)
    labels = np.repeat(np.arange(spec.n_clusters, dtype=np.int64), sizes)
    n = int(sizes.sum())

    if spec.shape == "ring":
        spans, starts = _ring_layout(spec)
        radius = spec.n_clusters * spec.center_separation
        theta = starts[labels] + noise_rng.uniform(0.0, 1.0, size=n) * spans[labels]
        x = np.zeros((n, spec.dim))
        x[:, 0] = radius * np.cos(theta)
        x[:, 1] = radius * np.sin(theta)
        x += spec.within_std * noise_rng.standard_normal((n, spec.dim))
        return x, labels

    noise = noise_rng.standard_normal((n, spec.dim))
    if spec.shape == "anisotropic":
        # Per-cluster random rotation of axis-aligned scales in [0.3, 3]*std.
        for c in range(spec.n_clusters):
            scales = transform_rng.uniform(0.3, 3.0, size=spec.dim)
            q, _ = np.linalg.qr(transform_rng.standard_normal((spec.dim, spec.dim)))
            mask = labels == c
            noise[mask] = (noise[mask] * scales) @ q.T
    x = centers[labels] + spec.within_std * noise
    return x, labels
