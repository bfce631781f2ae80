"""Two-phase shard-parallel execution.

Phase 1 computes per-cluster partial sums, merged on the driver in a fixed
order; phase 2 scores every shard against the merged (read-only) statistics.
Shards are threads running ``nogil`` kernels on contiguous row ranges.

Partial sums are taken over a fixed grid of ``CHUNK_ROWS``-row chunks rather
than over the shards themselves. The fold then always sees the same operands
in the same order, so the merged statistics, and with them every score, are
bit-identical for any shard count.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Sequence

from .core import Dataset, SilhouetteReport, check_metric

CHUNK_ROWS = 8192


def default_shards() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


@dataclass(frozen=True)
class ShardPlan:
    num_shards: int
    boundaries: tuple[tuple[int, int], ...]

    def __iter__(self):
        return iter(self.boundaries)

    def __len__(self) -> int:
        return self.num_shards


@dataclass(frozen=True)
class PartialAggregate:
    chunk: int
    stats: Any


def plan_shards(n: int, w: int) -> ShardPlan:
    """Split ``range(n)`` into ``min(w, n)`` contiguous near-equal ranges.

    >>> [stop - start for start, stop in plan_shards(10, 3)]
    [4, 3, 3]
    """
    if n < 1 or w < 1:
        raise ValueError(f"need n >= 1 and w >= 1, got n={n}, w={w}")
    w = min(w, n)
    size, extra = divmod(n, w)
    bounds = []
    start = 0
    for i in range(w):
        stop = start + size + (1 if i < extra else 0)
        bounds.append((start, stop))
        start = stop
    return ShardPlan(w, tuple(bounds))


def map_shards(fn: Callable[[int, int], Any], plan: ShardPlan) -> list:
    """Run ``fn(start, stop)`` for every shard; results in shard order."""
    if plan.num_shards == 1:
        return [fn(*plan.boundaries[0])]
    with ThreadPoolExecutor(max_workers=plan.num_shards) as pool:
        futures = [pool.submit(fn, start, stop) for start, stop in plan]
        return [f.result() for f in futures]


def chunk_ranges(n: int) -> list[tuple[int, int]]:
    return [(start, min(start + CHUNK_ROWS, n)) for start in range(0, n, CHUNK_ROWS)]


def fold(partials: Sequence[PartialAggregate], merge: Callable[[Any, Any], Any]):
    """Left fold of partial aggregates in ascending chunk order."""
    ordered = sorted(partials, key=lambda p: p.chunk)
    acc = ordered[0].stats
    for p in ordered[1:]:
        acc = merge(acc, p.stats)
    return acc


def aggregate(ds: Dataset, partial_fn: Callable, merge: Callable, shards: int):
    """Phase 1: chunk-wise partial statistics, computed by shard, then folded.

    ``partial_fn(X, labels, K, start, stop)`` returns the statistics of one
    row range.
    """
    chunks = chunk_ranges(ds.n)
    K = ds.num_clusters

    def work(lo: int, hi: int) -> list[PartialAggregate]:
        return [
            PartialAggregate(c, partial_fn(ds.X, ds.labels, K, *chunks[c]))
            for c in range(lo, hi)
        ]

    per_shard = map_shards(work, plan_shards(len(chunks), shards))
    return fold([p for group in per_shard for p in group], merge)


def _metric_module(metric: str):
    if metric == "squared_euclidean":
        from . import sqeuclidean

        return sqeuclidean.partial_cluster_stats, sqeuclidean.merge_stats, sqeuclidean.score_dataset_sq
    if metric == "cosine":
        from . import cosine

        return cosine.partial_omega, cosine.merge_stats, cosine.score_dataset_cos
    raise ValueError(
        f"no fast path for metric {metric!r}: the square root in plain Euclidean "
        "distance does not decompose into per-cluster sums; use the naive engine"
    )


def run_two_phase(ds: Dataset, metric: str, plan: ShardPlan | int | None = None) -> SilhouetteReport:
    """Score ``ds`` with the fast path for ``metric``.

    ``plan`` may be a :class:`ShardPlan`, a worker count, or ``None`` for the
    available parallelism. The output does not depend on the worker count.
    """
    metric = check_metric(metric)
    partial_fn, merge, score = _metric_module(metric)
    if plan is None:
        plan = default_shards()
    if isinstance(plan, int):
        plan = plan_shards(ds.n, plan)
    merged = aggregate(ds, partial_fn, merge, plan.num_shards)
    return score(ds, merged, plan)
