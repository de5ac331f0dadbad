"""Dense float64 matrix helpers used throughout the pipeline.

All numeric work happens in 64-bit floats; file formats may store 32-bit
(see tspcluster.io) but values are widened on read.
"""

import numpy as np


def matmul(a, b):
    """Matrix product with explicit shape checking.

    Raises ValueError naming both shapes on a dimension mismatch, and if
    the product overflows to a non-finite value.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2:
        raise ValueError(f"matmul expects 2-D inputs, got {a.shape} and {b.shape}")
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"matmul shape mismatch: {a.shape} x {b.shape}")
    out = a @ b
    if not np.all(np.isfinite(out)):
        raise ValueError("matmul produced non-finite values")
    return out


def softmax_rows(logits):
    """Numerically stable softmax over the last axis.

    Subtracts the per-row maximum before exponentiating, so rows with
    entries of magnitude 1e4 or more normalize without overflow.  Each
    output row is nonnegative and sums to 1.
    """
    z = np.asarray(logits, dtype=np.float64)
    z = z - z.max(axis=-1, keepdims=True)
    np.exp(z, out=z)
    z /= z.sum(axis=-1, keepdims=True)
    return z
