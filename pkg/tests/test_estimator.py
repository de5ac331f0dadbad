import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from tspcluster.estimator import LloydKMeans, NeighborAgreementClustering
from tspcluster.metrics import hungarian_acc
from tspcluster.synth import BlobSpec, generate


@pytest.fixture(scope="module")
def blobs():
    spec = BlobSpec(
        n_clusters=4,
        points_per_cluster=80,
        dim=8,
        center_separation=10.0,
        seed=17,
    )
    return generate(spec)


class TestNeighborAgreementClustering:
    def _estimator(self):
        return NeighborAgreementClustering(
            n_clusters=4, n_neighbors=8, epochs=15, batch_size=64,
            random_state=0,
        )

    def test_fit_predict_recovers_blobs(self, blobs):
        x, labels = blobs
        est = self._estimator()
        pred = est.fit_predict(x)
        acc, _ = hungarian_acc(pred, labels)
        assert acc >= 0.99
        assert np.array_equal(pred, est.labels_)

    def test_fit_returns_self_and_sets_attributes(self, blobs):
        x, _ = blobs
        est = self._estimator()
        assert est.fit(x) is est
        assert est.weights_.shape == (4, 8)
        assert len(est.loss_history_) == 15
        proba = est.predict_proba(x)
        assert proba.shape == (x.shape[0], 4)
        assert np.allclose(proba.sum(axis=1), 1.0)

    def test_get_params_round_trip(self):
        est = self._estimator()
        params = est.get_params()
        assert params["n_clusters"] == 4
        assert params["entropy_weight"] == 3.0
        cloned = clone(est)
        assert cloned.get_params() == params
        est.set_params(entropy_weight=1.5)
        assert est.get_params()["entropy_weight"] == 1.5

    def test_predict_before_fit_raises(self, blobs):
        x, _ = blobs
        with pytest.raises(NotFittedError):
            self._estimator().predict(x)

    def test_same_random_state_reproduces(self, blobs):
        x, _ = blobs
        a = self._estimator().fit(x)
        b = self._estimator().fit(x)
        assert np.array_equal(a.weights_, b.weights_)
        assert np.array_equal(a.labels_, b.labels_)


class TestLloydKMeans:
    def test_fit_predict_on_blobs(self, blobs):
        x, labels = blobs
        est = LloydKMeans(n_clusters=4, random_state=1)
        pred = est.fit_predict(x)
        acc, _ = hungarian_acc(pred, labels)
        assert acc == 1.0
        assert est.cluster_centers_.shape == (4, 8)
        assert est.inertia_ > 0

    def test_predict_new_points_use_nearest_center(self, blobs):
        x, _ = blobs
        est = LloydKMeans(n_clusters=4, random_state=1).fit(x)
        pred = est.predict(x[:10])
        assert np.array_equal(pred, est.labels_[:10])

    def test_unfitted_predict_raises(self, blobs):
        x, _ = blobs
        with pytest.raises(NotFittedError):
            LloydKMeans(n_clusters=2).predict(x)

    def test_clone_compatible(self):
        est = LloydKMeans(n_clusters=3, n_restarts=2)
        assert clone(est).get_params() == est.get_params()
