"""scikit-learn style entry points."""
from __future__ import annotations

import time

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted, validate_data

from . import cosine, sqeuclidean
from .core import ENGINES, Dataset, SilhouetteReport, ValidationError, check_metric, validate_and_densify
from .naive import naive_silhouette
from .parallel import aggregate, default_shards, run_two_phase


def evaluate(ds: Dataset, metric: str = "squared_euclidean", engine: str = "fast", n_shards: int | None = None) -> SilhouetteReport:
    """Score a validated dataset; the wall time lands in ``report.meta``."""
    metric = check_metric(metric)
    if engine not in ENGINES:
        raise ValidationError(f"unknown engine {engine!r}; expected one of {ENGINES}")
    if engine == "fast" and metric == "euclidean":
        raise ValidationError(
            "no fast path for plain Euclidean distance (the square root does not "
            "decompose into cluster sums); use engine='naive'"
        )
    if n_shards is not None and n_shards < 1:
        raise ValidationError(f"n_shards must be >= 1, got {n_shards}")
    t0 = time.perf_counter()
    if engine == "fast":
        report = run_two_phase(ds, metric, n_shards or default_shards())
    else:
        report = naive_silhouette(ds, metric)
    report.meta["wall_time_ms"] = (time.perf_counter() - t0) * 1e3
    return report


def silhouette_report(X, labels, *, metric="squared_euclidean", engine="fast", n_shards=None) -> SilhouetteReport:
    return evaluate(validate_and_densify(X, labels), metric, engine, n_shards)


def silhouette_samples(X, labels, *, metric="squared_euclidean", engine="fast", n_shards=None) -> np.ndarray:
    """Per-point Silhouette coefficients, like :func:`sklearn.metrics.silhouette_samples`.

    Note that ``metric="squared_euclidean"`` (the default) differs from
    scikit-learn's default of plain Euclidean distance.
    """
    return silhouette_report(X, labels, metric=metric, engine=engine, n_shards=n_shards).s


def silhouette_score(X, labels, *, metric="squared_euclidean", engine="fast", n_shards=None) -> float:
    return silhouette_report(X, labels, metric=metric, engine=engine, n_shards=n_shards).mean


_FAST = {
    "squared_euclidean": (sqeuclidean.partial_cluster_stats, sqeuclidean.merge_stats, sqeuclidean.mean_distance_matrix),
    "cosine": (cosine.partial_omega, cosine.merge_stats, cosine.mean_distance_matrix),
}


class SilhouetteEvaluator(TransformerMixin, BaseEstimator):
    """Silhouette evaluation of a labelled clustering.

    ``fit(X, labels)`` scores the clustering and keeps only the per-cluster
    statistics (O(K * D) memory). ``transform`` maps new rows to their mean
    distance from every fitted cluster, and ``predict`` picks the closest
    cluster by that mean distance.

    Parameters
    ----------
    metric : {"squared_euclidean", "cosine", "euclidean"}
        ``"euclidean"`` is only available with ``engine="naive"`` and
        disables ``transform``/``predict``.
    engine : {"fast", "naive"}
    n_shards : int, optional
        Worker threads for the fast engine; defaults to the available CPUs.

    Attributes
    ----------
    report_ : SilhouetteReport
    silhouette_score_ : float
    classes_ : ndarray of shape (K,)
    cluster_stats_ : SqEuclidClusterStats, CosineClusterStats or None
    """

    def __init__(self, metric="squared_euclidean", engine="fast", n_shards=None):
        self.metric = metric
        self.engine = engine
        self.n_shards = n_shards

    def fit(self, X, y):
        if y is None:
            raise ValueError("SilhouetteEvaluator.fit needs cluster labels as y")
        X, y = validate_data(self, X, y, dtype=np.float64, ensure_min_samples=2, y_numeric=False)
        ds = validate_and_densify(X, y)
        metric = check_metric(self.metric)
        self.report_ = evaluate(ds, metric, self.engine, self.n_shards)
        self.silhouette_score_ = self.report_.mean
        self.classes_ = ds.classes
        if metric in _FAST:
            partial_fn, merge, _ = _FAST[metric]
            self.cluster_stats_ = aggregate(ds, partial_fn, merge, self.n_shards or default_shards())
        else:
            self.cluster_stats_ = None
        return self

    def transform(self, X):
        """Mean distance from each row to each fitted cluster, shape (n, K)."""
        check_is_fitted(self, "cluster_stats_")
        if self.cluster_stats_ is None:
            raise ValueError(f"transform is not available for metric {self.metric!r}")
        X = validate_data(self, X, dtype=np.float64, reset=False)
        return _FAST[check_metric(self.metric)][2](X, self.cluster_stats_)

    def predict(self, X):
        return self.classes_[np.argmin(self.transform(X), axis=1)]

    def score(self, X, y):
        """Mean Silhouette of the clustering ``(X, y)``."""
        return silhouette_score(X, y, metric=self.metric, engine=self.engine, n_shards=self.n_shards)
