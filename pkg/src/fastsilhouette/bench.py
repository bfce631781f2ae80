"""Runtime scaling benchmark: brute-force vs. linear-time engine.

Records are appended as JSON lines with the fields of :class:`BenchRecord`;
``wall_time_ms`` is the best of ``trials`` runs.
"""
from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass
from typing import Iterable, Sequence

from .core import check_metric
from .data_io import BlobSpec, generate_blobs
from .estimator import evaluate


@dataclass(frozen=True)
class BenchRecord:
    n: int
    d: int
    k: int
    metric: str
    engine: str
    shards: int
    trials: int
    wall_time_ms: float
    mean_silhouette: float


def warm_up(metric: str) -> None:
    """Trigger JIT compilation so it is not billed to the first timed run."""
    ds = generate_blobs(BlobSpec(n=16, d=2, k=2, seed=0))
    evaluate(ds, metric, "fast", 1)
    evaluate(ds, metric, "fast", 2)


def time_engine(ds, metric: str, engine: str, shards: int, trials: int) -> tuple[float, float]:
    """Best-of-``trials`` wall time in ms, and the mean Silhouette."""
    best = float("inf")
    mean = None
    for _ in range(trials):
        t0 = time.perf_counter()
        report = evaluate(ds, metric, engine, shards)
        best = min(best, (time.perf_counter() - t0) * 1e3)
        mean = report.mean
    return best, mean


def run_bench(
    sizes: Sequence[int],
    d: int,
    k: int,
    metric: str = "squared_euclidean",
    engines: Sequence[str] = ("naive", "fast"),
    shards: int = 1,
    trials: int = 3,
    seed: int = 0,
    spread: float = 1.0,
    separation: float = 10.0,
    progress=None,
) -> list[BenchRecord]:
    metric = check_metric(metric)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if "fast" in engines:
        warm_up(metric)
    records = []
    for n in sizes:
        ds = generate_blobs(BlobSpec(n=n, d=d, k=k, spread=spread, separation=separation, seed=seed))
        for engine in engines:
            ms, mean = time_engine(ds, metric, engine, shards, trials)
            rec = BenchRecord(n, d, k, metric, engine, shards if engine == "fast" else 1, trials, ms, mean)
            records.append(rec)
            if progress is not None:
                progress(rec)
    return records


def append_records(records: Iterable[BenchRecord], path) -> None:
    with open(path, "a") as fh:
        for rec in records:
            fh.write(json.dumps(asdict(rec)) + "\n")


def load_records(path) -> list[BenchRecord]:
    with open(path) as fh:
        return [BenchRecord(**json.loads(line)) for line in fh if line.strip()]


def growth_ratios(records: Sequence[BenchRecord], engine: str) -> list[float]:
    """Successive wall-time ratios for ``engine``, in order of increasing n."""
    times = [r.wall_time_ms for r in sorted(records, key=lambda r: r.n) if r.engine == engine]
    return [b / a for a, b in zip(times, times[1:])]


def format_table(records: Sequence[BenchRecord]) -> str:
    engines = list(dict.fromkeys(r.engine for r in records))
    sizes = sorted({r.n for r in records})
    by_key = {(r.n, r.engine): r for r in records}
    head = f"{'N':>9}" + "".join(f"{e + ' [s]':>14}" for e in engines)
    if {"naive", "fast"} <= set(engines):
        head += f"{'speedup':>11}"
    lines = [head, "-" * len(head)]
    for n in sizes:
        line = f"{n:>9}"
        for e in engines:
            rec = by_key.get((n, e))
            line += f"{rec.wall_time_ms / 1e3:>14.4f}" if rec else f"{'-':>14}"
        if {"naive", "fast"} <= set(engines) and (n, "naive") in by_key and (n, "fast") in by_key:
            line += f"{by_key[n, 'naive'].wall_time_ms / by_key[n, 'fast'].wall_time_ms:>10.1f}x"
        lines.append(line)
    return "\n".join(lines)


def plot_svg(records: Sequence[BenchRecord], path) -> None:
    """Runtime vs. N on a linear and a log10 axis, one series per engine."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    styles = {"naive": ("tab:blue", "o", "Brute force O(N^2)"), "fast": ("tab:red", "s", "Linear-time")}
    with plt.rc_context({"svg.fonttype": "none", "svg.hashsalt": "fastsilhouette"}):
        fig, axes = plt.subplots(1, 2, figsize=(11, 4))
        for ax, scale in zip(axes, ("linear", "log")):
            for engine in dict.fromkeys(r.engine for r in records):
                pts = sorted((r.n, r.wall_time_ms / 1e3) for r in records if r.engine == engine)
                color, marker, label = styles.get(engine, ("black", "^", engine))
                (line,) = ax.plot(*zip(*pts), linestyle="none", marker=marker, color=color, label=label)
                line.set_gid(f"series-{engine}-{scale}")
            ax.set_xlabel("Dataset size (N)")
            if scale == "log":
                ax.set_yscale("log", base=10)
                ax.set_ylabel("seconds (log10 scale)")
                ax.set_title("log10 axis")
            else:
                ax.set_ylabel("seconds")
                ax.set_title("linear axis")
            ax.grid(axis="y")
            ax.legend()
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
