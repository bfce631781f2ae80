"""Linear-time Silhouette under squared Euclidean distance.

The summed squared distance from ``x`` to the members ``c_j`` of cluster k
expands to ``n_k * |x|^2 + psi_k - 2 * <y_k, x>``, where ``psi_k`` is the
sum of member squared norms and ``y_k`` the sum of member vectors. Both are
gathered in one pass, after which each point costs O(K * D).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import Dataset, SilhouetteReport, finalize_report
from .parallel import ShardPlan, map_shards, plan_shards


@dataclass(frozen=True)
class SqEuclidClusterStats:
    """Per-cluster ``count``, ``psi`` (sum of squared norms) and ``y`` (vector sum)."""

    count: np.ndarray
    psi: np.ndarray
    y: np.ndarray

    @classmethod
    def zeros(cls, k: int, d: int) -> "SqEuclidClusterStats":
        return cls(np.zeros(k, dtype=np.int64), np.zeros(k), np.zeros((k, d)))

    @property
    def num_clusters(self) -> int:
        return len(self.count)


def point_xi(p) -> float:
    """Squared norm of a point."""
    return float(_kernels.sum_squares(np.ascontiguousarray(p, dtype=np.float64)))


def partial_cluster_stats(X, labels, k: int, start: int = 0, stop: int | None = None):
    """Count, psi and y per cluster over rows ``[start, stop)`` in one pass."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2:
        X = X.reshape(len(X), -1)
    labels = np.ascontiguousarray(labels, dtype=np.int64)
    stop = len(X) if stop is None else stop
    stats = SqEuclidClusterStats.zeros(k, X.shape[1])
    bad = _kernels.sq_accumulate(X, labels, start, stop, stats.count, stats.psi, stats.y)
    if bad >= 0:
        raise ValueError(f"label {labels[bad]} at row {bad} outside [0, {k})")
    return stats


def merge_stats(a: SqEuclidClusterStats, b: SqEuclidClusterStats) -> SqEuclidClusterStats:
    if a.y.shape != b.y.shape:
        raise ValueError(f"cannot merge stats of shapes {a.y.shape} and {b.y.shape}")
    return SqEuclidClusterStats(a.count + b.count, a.psi + b.psi, a.y + b.y)


def mean_dist_to_cluster(xi: float, point, stats: SqEuclidClusterStats, k: int, exclude_self: bool = False) -> float:
    """Mean squared distance from ``point`` to the members of cluster ``k``.

    With ``exclude_self`` the point is taken to be a member and the sum is
    divided by ``n_k - 1``; its own zero distance leaves the numerator as is.
    Rounding-level results (including negatives) are returned as 0.
    """
    count = int(stats.count[k])
    if count < 1:
        raise ValueError(f"cluster {k} is empty")
    if exclude_self and count < 2:
        raise ValueError("exclude_self on a singleton cluster: a is defined as 0")
    x = np.ascontiguousarray(point, dtype=np.float64)
    return float(_kernels.sq_mean_dist(float(xi), x, count, float(stats.psi[k]), stats.y[k], exclude_self))


def score_dataset_sq(ds: Dataset, merged: SqEuclidClusterStats, shards: ShardPlan | int = 1) -> SilhouetteReport:
    """Score every point against the merged cluster statistics."""
    if merged.num_clusters != ds.num_clusters or not np.array_equal(merged.count, ds.cluster_sizes):
        raise ValueError("merged statistics do not cover the dataset's clusters")
    plan = shards if isinstance(shards, ShardPlan) else plan_shards(ds.n, shards)
    n = ds.n
    a, b = np.empty(n), np.empty(n)
    own, neighbour = np.empty(n, dtype=np.int64), np.empty(n, dtype=np.int64)

    def work(start: int, stop: int) -> None:
        _kernels.sq_score_range(
            ds.X, ds.labels, start, stop, merged.count, merged.psi, merged.y, a, b, own, neighbour
        )

    map_shards(work, plan)
    return finalize_report(
        a, b, own, neighbour, ds.cluster_sizes, "squared_euclidean", "fast", plan.num_shards, ds.classes
    )


def mean_distance_matrix(X, stats: SqEuclidClusterStats) -> np.ndarray:
    """Mean squared distance from each row of ``X`` to each cluster, shape (n, K)."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    out = np.empty((len(X), stats.num_clusters))
    _kernels.sq_distance_matrix(X, stats.count, stats.psi, stats.y, out)
    return out
