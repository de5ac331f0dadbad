"""Row-stochastic neighbor affinities from a NeighborGraph.

Each point i gets a distribution over its k nearest neighbors with weights
proportional to exp(-||x_i - x_j||^2 / (2 sigma_i^2)), where the bandwidth
sigma_i is half the distance to the third nearest neighbor.  Because the
bandwidth is tied to the third neighbor, the three nearest weights are at
least exp(-2) before normalization, so rows can never underflow to zero.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import check_embeddings


@dataclass
class AffinityDistribution:
    """Sparse row-stochastic weights on the neighbor-graph structure.

    ``weights[i]`` aligns with ``indices[i]``; any pair outside the neighbor
    lists implicitly has weight zero.
    """

    indices: np.ndarray
    weights: np.ndarray
    sigmas: np.ndarray

    @property
    def n(self):
        return self.indices.shape[0]

    @property
    def k(self):
        return self.indices.shape[1]


def build_affinity(graph, embeddings=None):
    """Gaussian neighbor weights, normalized per row.

    The graph metric only selects which neighbors participate; the exponent
    always uses squared Euclidean distances.  For non-euclidean graphs pass
    the embedding matrix so distances can be recomputed.  Rows whose
    bandwidth is zero (three or more exact duplicates) fall back to a
    uniform distribution over their neighbors.
    """
    if graph.k < 3:
        raise ValueError(
            f"bandwidth needs a third neighbor: graph.k={graph.k}, require k >= 3"
        )
    if graph.metric == "euclidean":
        dist = graph.distances
    else:
        if embeddings is None:
            raise ValueError(
                "graph metric is not euclidean; pass embeddings to recompute "
                "squared euclidean distances"
            )
        x = check_embeddings(embeddings)
        diff = x[:, None, :] - x[graph.indices]
        dist = np.sqrt((diff**2).sum(axis=2))

    sigmas = 0.5 * dist[:, 2]
    weights = np.ones_like(dist)
    safe = sigmas > 0
    weights[safe] = np.exp(-(dist[safe] ** 2) / (2.0 * sigmas[safe, None] ** 2))
    weights /= weights.sum(axis=1, keepdims=True)
    return AffinityDistribution(
        indices=graph.indices.copy(), weights=weights, sigmas=sigmas
    )
