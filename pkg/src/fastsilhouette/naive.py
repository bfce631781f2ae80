"""Brute-force O(N^2 * D) Silhouette.

This is the trusted reference: it scans every pair of points, one row of
distances at a time, and shares nothing with the fast paths except the final
score assembly. It also covers plain Euclidean distance, which has no fast
path.
"""
from __future__ import annotations

import math

import numpy as np

from .core import Dataset, SilhouetteReport, ValidationError, check_metric, finalize_report


def pairwise_distance(p, q, metric: str) -> float:
    """Distance between two vectors.

    Cosine distance is evaluated as ``|p/|p| - q/|q||^2 / 2``, which equals
    ``1 - cos(p, q)`` and is exactly zero for parallel copies of a vector.
    """
    metric = check_metric(metric)
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise ValidationError(f"dimension mismatch: {p.shape} vs {q.shape}")
    if metric == "cosine":
        np_, nq = math.sqrt(float(p @ p)), math.sqrt(float(q @ q))
        if np_ == 0.0 or nq == 0.0:
            raise ValidationError("cosine distance undefined for zero vector")
        diff = p / np_ - q / nq
        return 0.5 * float(diff @ diff)
    sq = float(((p - q) ** 2).sum())
    return math.sqrt(sq) if metric == "euclidean" else sq


def _row_distances(X: np.ndarray, i: int, metric: str) -> np.ndarray:
    diff = X - X[i]
    sq = np.einsum("ij,ij->i", diff, diff)
    if metric == "squared_euclidean":
        return sq
    if metric == "euclidean":
        return np.sqrt(sq)
    return 0.5 * sq  # rows of X are unit vectors here


def naive_silhouette(ds: Dataset, metric: str = "squared_euclidean") -> SilhouetteReport:
    """Silhouette report by exhaustive pairwise scan."""
    metric = check_metric(metric)
    X = ds.X
    if metric == "cosine":
        norms = np.sqrt(np.einsum("ij,ij->i", X, X))
        if np.any(norms == 0.0):
            row = int(np.flatnonzero(norms == 0.0)[0])
            raise ValidationError(f"cosine distance undefined for zero vector (row {row})")
        X = X / norms[:, None]

    n, K = ds.n, ds.num_clusters
    sizes = ds.cluster_sizes.astype(np.float64)
    a, b = np.zeros(n), np.empty(n)
    neighbour = np.empty(n, dtype=np.int64)
    for i in range(n):
        sums = np.bincount(ds.labels, weights=_row_distances(X, i, metric), minlength=K)
        c = ds.labels[i]
        if sizes[c] > 1:
            a[i] = sums[c] / (sizes[c] - 1.0)
        means = sums / sizes
        means[c] = np.inf
        k = int(np.argmin(means))
        b[i], neighbour[i] = means[k], k

    tag = "euclidean_oracle" if metric == "euclidean" else metric
    return finalize_report(a, b, ds.labels.copy(), neighbour, ds.cluster_sizes, tag, "naive", 1, ds.classes)
