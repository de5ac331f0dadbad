"""Clustering of frozen embedding vectors with a neighbor-agreement softmax
head, plus the K-means baseline and a clustering-evaluation suite."""

from ._validation import UNLABELED
from .affinity import AffinityDistribution, build_affinity
from .estimator import LloydKMeans, NeighborAgreementClustering
from .head import (
    AdamState,
    ClusterHead,
    TrainConfig,
    adam_step,
    loss_and_grad,
    predict,
    train,
)
from .io import (
    EvalReport,
    read_assignments,
    read_csv_embeddings,
    read_embeddings,
    read_labels,
    write_assignments,
    write_embeddings,
    write_labels,
    write_report,
)
from .kmeans import KMeansResult, init_head_from_kmeans, kmeans
from .linalg import matmul, softmax_rows
from .metrics import (
    ari,
    confusion_counts,
    contingency_table,
    hungarian_acc,
    nmi,
    pca_project,
)
from .neighbors import NeighborGraph, build_knn, label_consistency
from .rng import make_rng, split_rngs
from .synth import BlobSpec, blob_centers, cluster_sizes, generate

__version__ = "0.1.0"

__all__ = [
    "UNLABELED",
    "AffinityDistribution",
    "build_affinity",
    "LloydKMeans",
    "NeighborAgreementClustering",
    "AdamState",
    "ClusterHead",
    "TrainConfig",
    "adam_step",
    "loss_and_grad",
    "predict",
    "train",
    "EvalReport",
    "read_assignments",
    "read_csv_embeddings",
    "read_embeddings",
    "read_labels",
    "write_assignments",
    "write_embeddings",
    "write_labels",
    "write_report",
    "KMeansResult",
    "init_head_from_kmeans",
    "kmeans",
    "matmul",
    "softmax_rows",
    "ari",
    "confusion_counts",
    "contingency_table",
    "hungarian_acc",
    "nmi",
    "pca_project",
    "NeighborGraph",
    "build_knn",
    "label_consistency",
    "make_rng",
    "split_rngs",
    "BlobSpec",
    "blob_centers",
    "cluster_sizes",
    "generate",
    "__version__",
]
