"""Linear softmax clustering head and its training loop.

The head is a bias-free linear classifier over frozen embeddings.  Training
minimizes, per minibatch B,

    L = -(1/|B|) sum_{i in B} sum_{j in N(i)} w_ij * log <p_i, p_j>
        - lambda * H(mean_{i in B} p_i)

where p_i = softmax(phi x_i), w_ij are the row-stochastic neighbor
affinities, and H is Shannon entropy in nats.  The agreement term pulls
neighboring points into the same cluster; the entropy term keeps the mean
assignment spread out so training cannot collapse everything into one
cluster.  The neighbor expectation is summed exactly over each point's k
stored neighbors (fetched from the full matrix, whether or not they are in
the batch), and the gradient flows through both sides of <p_i, p_j>.
"""

from dataclasses import dataclass, field

import numpy as np

from ._validation import check_embeddings, check_random_state
from .kmeans import init_head_from_kmeans, kmeans
from .linalg import softmax_rows

# Inner products are floored here before the log; otherwise a pair of
# disagreeing near-one-hot predictions produces -inf.
LOG_CLAMP = 1e-12

INIT_MODES = ("kmeans", "random")


@dataclass
class TrainConfig:
    """Training hyperparameters; defaults match the reference configuration
    (k=20 neighbors, entropy weight 3, Adam at lr 1e-4, batch 256, 100
    epochs, K-means init)."""

    n_clusters: int
    n_neighbors: int = 20
    entropy_weight: float = 3.0
    learning_rate: float = 1e-4
    batch_size: int = 256
    epochs: int = 100
    init: str = "kmeans"
    seed: int = 0
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    kmeans_restarts: int = 10

    def __post_init__(self):
        if self.n_clusters < 2:
            raise ValueError("n_clusters must be >= 2")
        if self.n_neighbors < 1:
            raise ValueError("n_neighbors must be >= 1")
        if self.entropy_weight < 0:
            raise ValueError("entropy_weight must be >= 0")
        for name in ("learning_rate", "adam_eps"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        for name in ("batch_size", "epochs", "kmeans_restarts"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        for name in ("adam_beta1", "adam_beta2"):
            if not 0.0 <= getattr(self, name) < 1.0:
                raise ValueError(f"{name} must be in [0, 1)")
        if self.init not in INIT_MODES:
            raise ValueError(f"init must be one of {INIT_MODES}, got {self.init!r}")


@dataclass
class ClusterHead:
    """Bias-free linear softmax classifier with weights of shape
    (n_clusters, dim)."""

    phi: np.ndarray

    @property
    def n_clusters(self):
        return self.phi.shape[0]

    @property
    def dim(self):
        return self.phi.shape[1]

    def predict_proba(self, x):
        """Row-stochastic cluster probabilities, softmax(x @ phi.T)."""
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.dim:
            raise ValueError(
                f"embeddings have dim {x.shape[-1]}, head expects {self.dim}"
            )
        return softmax_rows(x @ self.phi.T)

    def predict(self, x):
        """Hard cluster assignments (argmax of predict_proba)."""
        return self.predict_proba(x).argmax(axis=-1)


def predict(head, x):
    """Functional alias for ClusterHead.predict_proba."""
    return head.predict_proba(x)


@dataclass
class AdamState:
    """First/second moment accumulators and step counter."""

    m: np.ndarray
    v: np.ndarray
    step: int = 0

    @classmethod
    def zeros(cls, phi):
        return cls(m=np.zeros_like(phi), v=np.zeros_like(phi), step=0)


def adam_step(state, phi, grad, config):
    """One bias-corrected Adam update; returns (new phi, new state)."""
    if grad.shape != phi.shape:
        raise ValueError(f"grad shape {grad.shape} != phi shape {phi.shape}")
    t = state.step + 1
    m = config.adam_beta1 * state.m + (1.0 - config.adam_beta1) * grad
    v = config.adam_beta2 * state.v + (1.0 - config.adam_beta2) * grad**2
    m_hat = m / (1.0 - config.adam_beta1**t)
    v_hat = v / (1.0 - config.adam_beta2**t)
    new_phi = phi - config.learning_rate * m_hat / (np.sqrt(v_hat) + config.adam_eps)
    return new_phi, AdamState(m=m, v=v, step=t)


def loss_and_grad(phi, x_batch, neighbor_weights, neighbor_x, entropy_weight):
    """Batch loss and its exact gradient with respect to phi.

    x_batch is (m, d); neighbor_weights (m, k) are the affinity rows of the
    batch points; neighbor_x (m, k, d) holds their neighbors' embeddings.
    Neighbor predictions are recomputed from the current phi, so the
    returned gradient includes the neighbor-side path.
    """
    m = x_batch.shape[0]
    p = softmax_rows(x_batch @ phi.T)  # (m, C)
    pn = softmax_rows(neighbor_x @ phi.T)  # (m, k, C)

    s = np.einsum("mc,mkc->mk", p, pn)
    s_safe = np.maximum(s, LOG_CLAMP)
    agreement = -(neighbor_weights * np.log(s_safe)).sum(axis=1).mean()

    p_mean = p.mean(axis=0)
    log_p_mean = np.log(np.maximum(p_mean, LOG_CLAMP))
    entropy = -(p_mean * log_p_mean).sum()

    loss = agreement - entropy_weight * entropy

    # d/dz log<p_i,p_j> = (p_i*p_j)/s - p_i on the batch side and the
    # symmetric expression on the neighbor side; where the clamp was active
    # the computed loss is locally constant in s, so the factor is zero.
    r = np.where(s > LOG_CLAMP, neighbor_weights / s_safe, 0.0)
    w_row = neighbor_weights.sum(axis=1)
    dz = -(p * np.einsum("mk,mkc->mc", r, pn) - p * w_row[:, None]) / m
    dzn = -(r[:, :, None] * (p[:, None, :] * pn)
            - neighbor_weights[:, :, None] * pn) / m

    if entropy_weight != 0.0:
        # -lambda H(p_mean): the softmax Jacobian kills the constant term of
        # log(p_mean) + 1, leaving J_i @ log(p_mean).
        u = log_p_mean
        dz += entropy_weight / m * (p * u[None, :] - p * (p @ u)[:, None])

    grad = dz.T @ x_batch + np.einsum("mkc,mkd->cd", dzn, neighbor_x)
    return float(loss), grad


def initial_head(x, config, rng):
    """Head weights per the configured init mode.

    kmeans: rows are unit-normalized K-means centers scaled by 1/sqrt(dim).
    random: gaussian with std 1/sqrt(dim), small enough that initial
    predictions are near uniform.
    """
    d = x.shape[1]
    if config.init == "kmeans":
        result = kmeans(
            x, config.n_clusters, rng=rng, n_restarts=config.kmeans_restarts
        )
        return init_head_from_kmeans(result.centers)
    return rng.normal(0.0, 1.0 / np.sqrt(d), size=(config.n_clusters, d))


def train(x, graph, affinity, config, rng=None):
    """Train the clustering head; returns (ClusterHead, per-epoch losses).

    The embedding matrix is read-only throughout (frozen features).  Batches
    are reshuffled every epoch; each step fetches the batch's neighbor rows
    from the full matrix by index.
    """
    x = check_embeddings(x)
    n = x.shape[0]
    if graph.n != n or affinity.n != n:
        raise ValueError(
            f"inconsistent row counts: embeddings {n}, graph {graph.n}, "
            f"affinity {affinity.n}"
        )
    rng = check_random_state(rng if rng is not None else config.seed)

    phi = initial_head(x, config, rng)
    state = AdamState.zeros(phi)
    history = []
    for _ in range(config.epochs):
        order = rng.permutation(n)
        total = 0.0
        for start in range(0, n, config.batch_size):
            batch = order[start : start + config.batch_size]
            loss, grad = loss_and_grad(
                phi,
                x[batch],
                affinity.weights[batch],
                x[affinity.indices[batch]],
                config.entropy_weight,
            )
            phi, state = adam_step(state, phi, grad, config)
            total += loss * batch.size
        history.append(total / n)
    return ClusterHead(phi=phi), history
