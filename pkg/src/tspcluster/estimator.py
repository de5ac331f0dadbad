"""Scikit-learn style estimators wrapping the clustering pipeline."""

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.exceptions import NotFittedError

from ._validation import check_embeddings, check_random_state
from .affinity import build_affinity
from .head import TrainConfig, train
from .kmeans import kmeans
from .neighbors import build_knn


class NeighborAgreementClustering(ClusterMixin, BaseEstimator):
    """Cluster frozen embeddings with a linear softmax head trained on
    k-nearest-neighbor agreement.

    fit() builds the exact k-NN graph, converts it to row-stochastic
    Gaussian affinities, initializes the head (from K-means centers by
    default), and trains with Adam on the agreement + entropy objective.
    The input matrix is treated as frozen features and never modified.

    Parameters
    ----------
    n_clusters : int, default=10
        Number of output clusters.
    n_neighbors : int, default=20
        Neighbors per point in the affinity graph (must be >= 3).
    entropy_weight : float, default=3.0
        Weight of the entropy regularizer that prevents collapse into a
        single cluster.
    learning_rate : float, default=1e-4
        Adam step size.
    batch_size : int, default=256
    epochs : int, default=100
    init : {"kmeans", "random"}, default="kmeans"
        Head initialization; K-means init is markedly stronger.
    metric : {"euclidean", "cosine", "dot"}, default="euclidean"
        Metric used to select neighbors.  Affinity weights always use
        squared Euclidean distances.
    random_state : int or numpy Generator, default=0
    kmeans_restarts : int, default=10

    Attributes
    ----------
    head_ : ClusterHead
    weights_ : ndarray of shape (n_clusters, n_features)
    labels_ : ndarray of shape (n_samples,)
    loss_history_ : list of per-epoch mean losses
    """

    def __init__(
        self,
        n_clusters=10,
        n_neighbors=20,
        entropy_weight=3.0,
        learning_rate=1e-4,
        batch_size=256,
        epochs=100,
        init="kmeans",
        metric="euclidean",
        random_state=0,
        kmeans_restarts=10,
    ):
        self.n_clusters = n_clusters
        self.n_neighbors = n_neighbors
        self.entropy_weight = entropy_weight
        self.learning_rate = learning_rate
        self.batch_size = batch_size
        self.epochs = epochs
        self.init = init
        self.metric = metric
        self.random_state = random_state
        self.kmeans_restarts = kmeans_restarts

    def fit(self, X, y=None):
        X = check_embeddings(X)
        graph = build_knn(X, self.n_neighbors, metric=self.metric)
        affinity = build_affinity(
            graph, embeddings=None if self.metric == "euclidean" else X
        )
        config = TrainConfig(
            n_clusters=self.n_clusters,
            n_neighbors=self.n_neighbors,
            entropy_weight=self.entropy_weight,
            learning_rate=self.learning_rate,
            batch_size=self.batch_size,
            epochs=self.epochs,
            init=self.init,
            kmeans_restarts=self.kmeans_restarts,
        )
        rng = check_random_state(self.random_state)
        self.head_, self.loss_history_ = train(X, graph, affinity, config, rng=rng)
        self.weights_ = self.head_.phi
        self.labels_ = self.head_.predict(X)
        return self

    def _check_fitted(self):
        if not hasattr(self, "head_"):
            raise NotFittedError(
                "This NeighborAgreementClustering instance is not fitted yet."
            )

    def predict(self, X):
        self._check_fitted()
        return self.head_.predict(check_embeddings(X))

    def predict_proba(self, X):
        self._check_fitted()
        return self.head_.predict_proba(check_embeddings(X))


class LloydKMeans(ClusterMixin, BaseEstimator):
    """Best-of-restarts Lloyd K-means with k-means++ seeding.

    The frozen-feature baseline: run K-means directly on the embeddings.

    Attributes
    ----------
    cluster_centers_ : ndarray of shape (n_clusters, n_features)
    labels_ : ndarray of shape (n_samples,)
    inertia_ : float
    n_iter_ : int
    """

    def __init__(self, n_clusters=10, n_restarts=10, max_iter=300, tol=1e-6,
                 random_state=0):
        self.n_clusters = n_clusters
        self.n_restarts = n_restarts
        self.max_iter = max_iter
        self.tol = tol
        self.random_state = random_state

    def fit(self, X, y=None):
        result = kmeans(
            check_embeddings(X),
            self.n_clusters,
            rng=check_random_state(self.random_state),
            n_restarts=self.n_restarts,
            max_iter=self.max_iter,
            tol=self.tol,
        )
        self.cluster_centers_ = result.centers
        self.labels_ = result.assignments
        self.inertia_ = result.inertia
        self.n_iter_ = result.iterations
        return self

    def predict(self, X):
        if not hasattr(self, "cluster_centers_"):
            raise NotFittedError("This LloydKMeans instance is not fitted yet.")
        X = check_embeddings(X)
        diff = X[:, None, :] - self.cluster_centers_[None, :, :]
        return (diff**2).sum(axis=2).argmin(axis=1)
