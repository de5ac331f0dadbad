"""Clustering evaluation: Hungarian-matched accuracy, NMI, ARI, confusion
counts, and a PCA projection for external plotting.

NMI uses the arithmetic-mean normalizer (the convention is recorded in every
report, since the literature also uses min/max/geometric).  Log-sums go
through math.fsum and ARI stays in exact integer arithmetic until the final
division, so relabeling invariance and symmetry hold bit-for-bit.
"""

import math

import numpy as np
from scipy.optimize import linear_sum_assignment

from ._validation import check_embeddings, check_labels


def _paired_labels(pred, truth):
    pred = check_labels(pred, allow_unlabeled=False, name="pred")
    truth = check_labels(truth, allow_unlabeled=False, name="truth")
    if pred.shape[0] != truth.shape[0]:
        raise ValueError(
            f"length mismatch: pred has {pred.shape[0]}, truth has {truth.shape[0]}"
        )
    return pred, truth


def contingency_table(pred, truth):
    """Counts table over the distinct values of each side.

    Returns (table, pred_values, truth_values) where table[i, j] counts
    points with pred == pred_values[i] and truth == truth_values[j].
    """
    pred, truth = _paired_labels(pred, truth)
    pred_values, pi = np.unique(pred, return_inverse=True)
    truth_values, ti = np.unique(truth, return_inverse=True)
    table = np.zeros((pred_values.size, truth_values.size), dtype=np.int64)
    np.add.at(table, (pi, ti), 1)
    return table, pred_values, truth_values


def hungarian_acc(pred, truth):
    """Clustering accuracy under the best one-to-one cluster-to-class map.

    Solved exactly on the contingency table with the Kuhn-Munkres assignment
    from scipy; when cluster and class counts differ the table is padded
    with zero-benefit dummies.  Returns (accuracy, mapping) where mapping
    sends each matched predicted cluster to its ground-truth class.
    """
    table, pred_values, truth_values = contingency_table(pred, truth)
    size = max(table.shape)
    padded = np.zeros((size, size), dtype=np.int64)
    padded[: table.shape[0], : table.shape[1]] = table
    rows, cols = linear_sum_assignment(padded, maximize=True)
    matched = int(padded[rows, cols].sum())
    mapping = {
        int(pred_values[r]): int(truth_values[c])
        for r, c in zip(rows, cols)
        if r < table.shape[0] and c < table.shape[1]
    }
    return matched / int(table.sum()), mapping


def nmi(pred, truth):
    """Mutual information normalized by the mean of the two entropies.

    Natural logs internally; the normalization makes the base irrelevant.
    Two zero-entropy partitions are necessarily identical and score 1.
    """
    table, _, _ = contingency_table(pred, truth)
    n = int(table.sum())
    a = table.sum(axis=1)
    b = table.sum(axis=0)
    h_pred = -math.fsum((ai / n) * math.log(ai / n) for ai in a if ai > 0)
    h_truth = -math.fsum((bj / n) * math.log(bj / n) for bj in b if bj > 0)
    denom = 0.5 * (h_pred + h_truth)
    if denom == 0.0:
        return 1.0
    mi = math.fsum(
        (nij / n) * math.log((n * nij) / (ai * bj))
        for row, ai in zip(table, a)
        for nij, bj in zip(row, b)
        if nij > 0
    )
    return min(max(mi / denom, 0.0), 1.0)


def ari(pred, truth):
    """Hubert-Arabie adjusted Rand index from contingency pair counts.

    Exact integer arithmetic until the final division.  A zero denominator
    (both partitions trivial) means identical partitions and scores 1.
    """
    table, _, _ = contingency_table(pred, truth)
    n = int(table.sum())
    index = sum(math.comb(int(nij), 2) for nij in table.ravel())
    sum_a = sum(math.comb(int(ai), 2) for ai in table.sum(axis=1))
    sum_b = sum(math.comb(int(bj), 2) for bj in table.sum(axis=0))
    total = math.comb(n, 2)
    numerator = 2 * (total * index - sum_a * sum_b)
    denominator = total * (sum_a + sum_b) - 2 * sum_a * sum_b
    if denominator == 0:
        return 1.0
    return numerator / denominator


def confusion_counts(pred, truth, size=None):
    """Square confusion matrix: rows are true classes, columns predicted
    clusters, padded to ``size`` (defaults to the larger side).  Row sums
    equal the ground-truth class counts."""
    table, pred_values, truth_values = contingency_table(pred, truth)
    by_truth = table.T
    needed = max(by_truth.shape)
    if size is None:
        size = needed
    elif size < needed:
        raise ValueError(f"size {size} too small for {needed} classes/clusters")
    out = np.zeros((size, size), dtype=np.int64)
    out[: by_truth.shape[0], : by_truth.shape[1]] = by_truth
    return out


def pca_project(x, out_dim=2):
    """Project centered data onto its top principal directions.

    Component signs are fixed (largest-magnitude loading positive) so the
    projection is deterministic.  Raises on zero-variance data and when
    out_dim exceeds min(n_samples, n_features).
    """
    x = check_embeddings(x)
    n, d = x.shape
    if not 1 <= out_dim <= min(n, d):
        raise ValueError(
            f"out_dim must be in [1, {min(n, d)}] for shape {x.shape}, got {out_dim}"
        )
    centered = x - x.mean(axis=0)
    u, s, vt = np.linalg.svd(centered, full_matrices=False)
    if s[0] == 0.0:
        raise ValueError("zero-variance data cannot be projected")
    for j in range(out_dim):
        lead = np.argmax(np.abs(vt[j]))
        if vt[j, lead] < 0:
            u[:, j] = -u[:, j]
            vt[j] = -vt[j]
    return u[:, :out_dim] * s[:out_dim]
