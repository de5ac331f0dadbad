import numpy as np
import pytest

from tspcluster.affinity import build_affinity
from tspcluster.neighbors import NeighborGraph, build_knn

from oracles import affinity_row_direct


def _graph_from_distances(distances):
    distances = np.asarray(distances, dtype=np.float64)
    n, k = distances.shape
    indices = np.tile(np.arange(1, k + 1), (n, 1))
    return NeighborGraph(k=k, metric="euclidean", indices=indices,
                         distances=distances)


class TestBuildAffinity:
    def test_equidistant_neighbors_uniform_row(self):
        graph = _graph_from_distances([[2.0, 2.0, 2.0, 2.0]])
        aff = build_affinity(graph)
        assert np.allclose(aff.weights[0], 0.25, atol=1e-15)
        assert len(set(aff.weights[0])) == 1

    def test_worked_example_d_2d_2d(self):
        d = 1.7
        graph = _graph_from_distances([[d, 2 * d, 2 * d]])
        aff = build_affinity(graph)
        assert aff.sigmas[0] == d
        want = affinity_row_direct([d, 2 * d, 2 * d])
        assert np.max(np.abs(aff.weights[0] - want)) < 1e-12
        # Unnormalized ratios exp(-1/2) : exp(-2) : exp(-2).
        ratio = aff.weights[0, 0] / aff.weights[0, 1]
        assert abs(ratio - np.exp(1.5)) < 1e-12

    def test_rows_sum_to_one(self):
        rng = np.random.default_rng(3)
        x = rng.normal(size=(80, 6))
        aff = build_affinity(build_knn(x, k=12))
        assert np.max(np.abs(aff.weights.sum(axis=1) - 1.0)) < 1e-12

    def test_support_confined_to_neighbor_indices(self):
        rng = np.random.default_rng(4)
        x = rng.normal(size=(30, 4))
        graph = build_knn(x, k=5)
        aff = build_affinity(graph)
        assert np.array_equal(aff.indices, graph.indices)
        assert aff.weights.shape == (30, 5)
        assert np.all(aff.weights > 0)

    def test_monotone_within_rows(self):
        rng = np.random.default_rng(5)
        x = rng.normal(size=(60, 5))
        aff = build_affinity(build_knn(x, k=8))
        assert np.all(np.diff(aff.weights, axis=1) <= 1e-18)

    def test_exact_invariance_under_power_of_two_rescale(self):
        rng = np.random.default_rng(6)
        x = rng.normal(size=(40, 5))
        base = build_affinity(build_knn(x, k=6))
        scaled = build_affinity(build_knn(4.0 * x, k=6))
        assert np.array_equal(base.weights, scaled.weights)

    def test_near_invariance_under_generic_rescale(self):
        rng = np.random.default_rng(7)
        x = rng.normal(size=(40, 5))
        base = build_affinity(build_knn(x, k=6))
        scaled = build_affinity(build_knn(2.7 * x, k=6))
        assert np.allclose(base.weights, scaled.weights, rtol=1e-10)

    def test_duplicate_heavy_row_falls_back_to_uniform(self):
        x = np.array(
            [[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [9.0, 9.0]]
        )
        aff = build_affinity(build_knn(x, k=4))
        # Point 0 has three exact duplicates: sigma 0, uniform fallback.
        assert aff.sigmas[0] == 0.0
        assert np.allclose(aff.weights[0], 0.25)

    def test_k_below_three_rejected(self):
        rng = np.random.default_rng(8)
        x = rng.normal(size=(10, 3))
        with pytest.raises(ValueError, match="k >= 3"):
            build_affinity(build_knn(x, k=2))

    def test_non_euclidean_graph_needs_embeddings(self):
        rng = np.random.default_rng(9)
        x = rng.normal(size=(20, 4))
        graph = build_knn(x, k=5, metric="cosine")
        with pytest.raises(ValueError, match="embeddings"):
            build_affinity(graph)
        aff = build_affinity(graph, embeddings=x)
        assert np.max(np.abs(aff.weights.sum(axis=1) - 1.0)) < 1e-12
        # Weights use euclidean distances to the cosine-selected neighbors.
        row = 0
        dists = np.sqrt(((x[graph.indices[row]] - x[row]) ** 2).sum(axis=1))
        assert np.max(np.abs(aff.weights[row] - affinity_row_direct(dists))) < 1e-12
