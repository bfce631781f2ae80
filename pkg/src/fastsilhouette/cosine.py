"""Linear-time Silhouette under cosine distance.

With unit vectors ``u = x / |x|``, the summed cosine distance from ``x`` to
cluster k is ``n_k - <u, omega_k>``, where ``omega_k`` is the sum of the
members' unit vectors.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import Dataset, SilhouetteReport, ValidationError, finalize_report
from .parallel import ShardPlan, map_shards, plan_shards


def _zero_norm(row: int) -> ValidationError:
    return ValidationError(f"cosine distance undefined for zero vector (row {row})")


@dataclass(frozen=True)
class CosineClusterStats:
    """Per-cluster ``count`` and ``omega`` (sum of member unit vectors)."""

    count: np.ndarray
    omega: np.ndarray

    @classmethod
    def zeros(cls, k: int, d: int) -> "CosineClusterStats":
        return cls(np.zeros(k, dtype=np.int64), np.zeros((k, d)))

    @property
    def num_clusters(self) -> int:
        return len(self.count)


def normalize_point(p) -> np.ndarray:
    p = np.asarray(p, dtype=np.float64)
    norm = np.sqrt(_kernels.sum_squares(np.ascontiguousarray(p)))
    if norm == 0.0:
        raise ValidationError("cosine distance undefined for zero vector")
    return p / norm


def partial_omega(X, labels, k: int, start: int = 0, stop: int | None = None) -> CosineClusterStats:
    """Count and omega per cluster over rows ``[start, stop)``."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2:
        X = X.reshape(len(X), -1)
    labels = np.ascontiguousarray(labels, dtype=np.int64)
    stop = len(X) if stop is None else stop
    stats = CosineClusterStats.zeros(k, X.shape[1])
    bad_label, zero_row = _kernels.cos_accumulate(X, labels, start, stop, stats.count, stats.omega)
    if bad_label >= 0:
        raise ValueError(f"label {labels[bad_label]} at row {bad_label} outside [0, {k})")
    if zero_row >= 0:
        raise _zero_norm(zero_row)
    return stats


def merge_stats(a: CosineClusterStats, b: CosineClusterStats) -> CosineClusterStats:
    if a.omega.shape != b.omega.shape:
        raise ValueError(f"cannot merge stats of shapes {a.omega.shape} and {b.omega.shape}")
    return CosineClusterStats(a.count + b.count, a.omega + b.omega)


def mean_cos_dist_to_cluster(point, stats: CosineClusterStats, k: int, exclude_self: bool = False) -> float:
    """Mean cosine distance from ``point`` to cluster ``k``, clamped into [0, 2]."""
    count = int(stats.count[k])
    if count < 1:
        raise ValueError(f"cluster {k} is empty")
    if exclude_self and count < 2:
        raise ValueError("exclude_self on a singleton cluster: a is defined as 0")
    x = np.ascontiguousarray(point, dtype=np.float64)
    norm = np.sqrt(_kernels.sum_squares(x))
    if norm == 0.0:
        raise ValidationError("cosine distance undefined for zero vector")
    dot = _kernels.cos_dot(x, norm, stats.omega[k])
    return float(_kernels.cos_mean_dist(dot, count, len(x), exclude_self))


def score_dataset_cos(ds: Dataset, merged: CosineClusterStats, shards: ShardPlan | int = 1) -> SilhouetteReport:
    if merged.num_clusters != ds.num_clusters or not np.array_equal(merged.count, ds.cluster_sizes):
        raise ValueError("merged statistics do not cover the dataset's clusters")
    plan = shards if isinstance(shards, ShardPlan) else plan_shards(ds.n, shards)
    n = ds.n
    a, b = np.empty(n), np.empty(n)
    own, neighbour = np.empty(n, dtype=np.int64), np.empty(n, dtype=np.int64)

    def work(start: int, stop: int) -> int:
        return _kernels.cos_score_range(
            ds.X, ds.labels, start, stop, merged.count, merged.omega, a, b, own, neighbour
        )

    for zero_row in map_shards(work, plan):
        if zero_row >= 0:
            raise _zero_norm(zero_row)
    return finalize_report(a, b, own, neighbour, ds.cluster_sizes, "cosine", "fast", plan.num_shards, ds.classes)


def mean_distance_matrix(X, stats: CosineClusterStats) -> np.ndarray:
    X = np.ascontiguousarray(X, dtype=np.float64)
    out = np.empty((len(X), stats.num_clusters))
    zero_row = _kernels.cos_distance_matrix(X, stats.count, stats.omega, out)
    if zero_row >= 0:
        raise _zero_norm(zero_row)
    return out
