"""Dataset model, validation and Silhouette score assembly.

Everything here is shared by the fast paths and the brute-force oracle: the
label densification, the per-point ``s_i`` formula and the report type.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterator, NamedTuple, Sequence

import numpy as np

from ._kernels import assemble_into, silhouette_value

METRICS = ("squared_euclidean", "cosine", "euclidean")
ENGINES = ("fast", "naive")


class ValidationError(ValueError):
    """Input violates a dataset or parameter invariant."""


@dataclass(frozen=True)
class Dataset:
    """Validated, densely labelled dataset.

    Attributes
    ----------
    X : ndarray of shape (n, d), float64, C-contiguous
    labels : ndarray of shape (n,), int64
        Dense cluster indices in ``[0, K)``.
    classes : ndarray of shape (K,)
        Original label of each dense index, in first-appearance order.
    cluster_sizes : ndarray of shape (K,), int64
    """

    X: np.ndarray
    labels: np.ndarray
    classes: np.ndarray
    cluster_sizes: np.ndarray

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def dims(self) -> int:
        return self.X.shape[1]

    @property
    def num_clusters(self) -> int:
        return len(self.cluster_sizes)

    def __len__(self) -> int:
        return self.n

    def take(self, idx) -> "Dataset":
        """Row subset/permutation, keeping the original label mapping."""
        idx = np.asarray(idx)
        return validate_and_densify(self.X[idx], self.classes[self.labels[idx]])


class PointScore(NamedTuple):
    a: float
    b: float
    s: float
    own_cluster: int
    neighbour_cluster: int


@dataclass
class SilhouetteReport:
    """Per-point Silhouette scores plus their mean.

    Per-point values are stored column-wise; ``report[i]`` gives a
    :class:`PointScore`.
    """

    a: np.ndarray
    b: np.ndarray
    s: np.ndarray
    own: np.ndarray
    neighbour: np.ndarray
    mean: float
    metric: str
    engine: str
    shards: int
    classes: np.ndarray | None = None
    meta: dict[str, Any] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.s)

    def __getitem__(self, i: int) -> PointScore:
        return PointScore(
            float(self.a[i]),
            float(self.b[i]),
            float(self.s[i]),
            int(self.own[i]),
            int(self.neighbour[i]),
        )

    def __iter__(self) -> Iterator[PointScore]:
        for i in range(len(self)):
            yield self[i]

    @property
    def scores(self) -> list[PointScore]:
        return list(self)


def _densify(labels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    classes, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
    order = np.argsort(first, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    return rank[inverse].astype(np.int64), classes[order]


def validate_and_densify(features, labels) -> Dataset:
    """Validate a labelled point set and remap labels to ``0..K-1``.

    Labels are numbered by order of first appearance, so ``["b", "a", "b"]``
    becomes ``[0, 1, 0]`` with ``classes == ["b", "a"]``.

    Raises
    ------
    ValidationError
        On ragged rows, non-finite values, fewer than two points or fewer
        than two distinct labels.
    """
    if isinstance(features, np.ndarray):
        X = features
    else:
        rows = list(features)
        if not rows:
            raise ValidationError("empty input: need at least 2 points")
        widths = {len(r) for r in rows}
        if len(widths) > 1:
            first = len(rows[0])
            bad = next(i for i, r in enumerate(rows) if len(r) != first)
            raise ValidationError(
                f"inconsistent dimensionality: row {bad} has {len(rows[bad])} "
                f"features, expected {first}"
            )
        X = np.asarray(rows)
    if X.ndim != 2:
        raise ValidationError(f"features must be 2-dimensional, got shape {X.shape}")
    n, d = X.shape
    if n < 2:
        raise ValidationError(f"Silhouette needs N >= 2 points, got {n}")
    if d < 1:
        raise ValidationError("features must have at least one dimension")
    try:
        X = np.ascontiguousarray(X, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"non-numeric feature value: {exc}") from None
    if not np.isfinite(X).all():
        row = int(np.flatnonzero(~np.isfinite(X).all(axis=1))[0])
        raise ValidationError(f"non-finite feature value in row {row}")

    labels = np.asarray(labels)
    if labels.ndim != 1 or len(labels) != n:
        raise ValidationError(f"expected {n} labels, got shape {labels.shape}")
    dense, classes = _densify(labels)
    if len(classes) < 2:
        raise ValidationError(
            "Silhouette undefined for a single cluster: need K >= 2 distinct labels"
        )
    sizes = np.bincount(dense, minlength=len(classes)).astype(np.int64)
    return Dataset(X=X, labels=dense, classes=classes, cluster_sizes=sizes)


def assemble_score(a: float, b: float) -> float:
    """Silhouette value from intra (``a``) and neighbour (``b``) mean distances.

    ``1 - a/b`` when ``a <= b``, ``b/a - 1`` otherwise, and 0 when both are 0.
    """
    if a < 0 or b < 0:
        raise ValueError("negative mean distance: upstream numerical bug")
    return silhouette_value(float(a), float(b))


def finalize_report(
    a: np.ndarray,
    b: np.ndarray,
    own: np.ndarray,
    neighbour: np.ndarray,
    cluster_sizes: np.ndarray,
    metric: str,
    engine: str,
    shards: int,
    classes: np.ndarray | None = None,
) -> SilhouetteReport:
    """Turn per-point ``(a, b)`` pairs into scores and their mean.

    Takes ownership of ``a``: points of singleton clusters get ``a = 0`` and
    ``s = 0`` in place. The mean is an exactly rounded sum (``math.fsum``), so
    it is independent of row order and of sharding.
    """
    n = len(a)
    if n == 0:
        raise ValidationError("empty score list: need at least 2 points")
    if not (len(b) == len(own) == len(neighbour) == n):
        raise ValueError("per-point arrays differ in length")
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    own = np.ascontiguousarray(own, dtype=np.int64)
    s = np.empty(n)
    assemble_into(a, b, own, np.asarray(cluster_sizes, dtype=np.int64), s)
    mean = math.fsum(s) / n
    return SilhouetteReport(
        a=a,
        b=b,
        s=s,
        own=own,
        neighbour=np.ascontiguousarray(neighbour, dtype=np.int64),
        mean=mean,
        metric=metric,
        engine=engine,
        shards=shards,
        classes=classes,
    )


def check_metric(metric: str) -> str:
    aliases = {
        "sqeuclid": "squared_euclidean",
        "sqeuclidean": "squared_euclidean",
        "euclid": "euclidean",
    }
    metric = aliases.get(metric, metric)
    if metric not in METRICS:
        raise ValidationError(f"unknown metric {metric!r}; expected one of {METRICS}")
    return metric


def as_labelled_pairs(points: Sequence[tuple[Sequence[float], Any]]) -> Dataset:
    """Build a :class:`Dataset` from ``(vector, label)`` pairs."""
    points = list(points)
    if not points:
        raise ValidationError("empty input: need at least 2 points")
    feats = [p for p, _ in points]
    labels = np.array([lab for _, lab in points])
    return validate_and_densify(feats, labels)
