"""Exit criteria. Each test prints one ``[PASS]``/``[FAIL]`` line.

The scaling benchmark (criterion 3) runs the brute-force engine up to
N = 40,000 and takes several minutes.
"""
import json
import os
import time
import tracemalloc

import numpy as np
import psutil
import pytest

from fastsilhouette import (
    BlobSpec,
    evaluate,
    generate_blobs,
    naive_silhouette,
    run_two_phase,
    validate_and_densify,
)
from fastsilhouette import cli
from fastsilhouette.bench import growth_ratios, run_bench

from synth import random_dataset

FAST_METRICS = ("squared_euclidean", "cosine")
RTOL, ATOL = 1e-9, 1e-12


@pytest.fixture
def verdict(capsys):
    def emit(number: int, title: str, ok: bool, detail: str = "") -> None:
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}" + (f" ({detail})" if detail else ""))
        assert ok, f"criterion {number} failed: {detail}"

    return emit


def close(x, ref):
    diff = np.abs(x - ref)
    return bool(np.all((diff <= ATOL) | (diff <= RTOL * np.abs(ref))))


def test_1_oracle_equivalence(verdict):
    t0 = time.perf_counter()
    failures = []
    singletons = duplicates = 0
    for seed in range(200):
        ds = random_dataset(seed)
        singletons += bool((ds.cluster_sizes == 1).any())
        duplicates += len(np.unique(ds.X, axis=0)) < ds.n
        for metric in FAST_METRICS:
            fast = run_two_phase(ds, metric, 1 + seed % 4)
            ref = naive_silhouette(ds, metric)
            ok = all(close(getattr(fast, f), getattr(ref, f)) for f in ("a", "b", "s"))
            ok &= abs(fast.mean - ref.mean) <= 1e-12
            if not ok:
                failures.append((seed, metric))
    elapsed = time.perf_counter() - t0
    verdict(
        1,
        "fast == oracle on 200 random datasets",
        not failures and elapsed < 120 and singletons > 0 and duplicates > 0,
        f"{len(failures)} mismatches, {singletons} with singletons, {duplicates} with duplicates, {elapsed:.1f}s",
    )


def test_2_golden_instances(verdict):
    sq = validate_and_densify([[0, 0], [0, 1], [4, 0], [4, 1]], ["A", "A", "B", "B"])
    cos = validate_and_densify([[1, 0], [2, 0], [0, 1], [0, 3]], ["A", "A", "B", "B"])
    means = {
        (metric, engine): evaluate(ds, metric, engine, 1).mean
        for ds, metric in ((sq, "squared_euclidean"), (cos, "cosine"))
        for engine in ("fast", "naive")
    }
    ok = all(abs(means["squared_euclidean", e] - 31 / 33) <= 1e-15 for e in ("fast", "naive"))
    ok &= all(means["cosine", e] == 1.0 for e in ("fast", "naive"))
    verdict(2, "golden means 31/33 and 1", ok, ", ".join(f"{k[0]}/{k[1]}={v:.16g}" for k, v in means.items()))


def test_3_complexity_trend(verdict, tmp_path):
    t0 = time.perf_counter()
    records = run_bench([5000, 10000, 20000, 40000], d=32, k=10, engines=("naive", "fast"), shards=1, trials=3, seed=0)
    elapsed = time.perf_counter() - t0
    naive_r, fast_r = growth_ratios(records, "naive"), growth_ratios(records, "fast")
    at_20k = {r.engine: r.wall_time_ms for r in records if r.n == 20000}
    speedup = at_20k["naive"] / at_20k["fast"]
    ok = all(3.2 <= r <= 5.2 for r in naive_r) and all(1.6 <= r <= 2.6 for r in fast_r)
    ok &= speedup > 50 and elapsed < 15 * 60
    verdict(
        3,
        "quadratic vs linear growth",
        ok,
        f"naive ratios {[round(r, 2) for r in naive_r]}, fast ratios {[round(r, 2) for r in fast_r]}, "
        f"speedup@20k {speedup:.0f}x, {elapsed:.0f}s",
    )


@pytest.fixture(scope="module")
def million():
    return generate_blobs(BlobSpec(n=10**6, d=16, k=10, seed=1))


def best_time(fn, trials=3):
    best = float("inf")
    for _ in range(trials):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def test_4_parallel_scaling(verdict, million):
    cores = psutil.cpu_count(logical=False) or os.cpu_count() or 1
    run_two_phase(million, "squared_euclidean", 1)
    t1 = best_time(lambda: run_two_phase(million, "squared_euclidean", 1))
    tw = best_time(lambda: run_two_phase(million, "squared_euclidean", cores))
    speedup = t1 / tw
    r1 = run_two_phase(million, "squared_euclidean", 1)
    r4 = run_two_phase(million, "squared_euclidean", 4)
    identical = all(np.array_equal(getattr(r1, f), getattr(r4, f)) for f in ("a", "b", "s", "own", "neighbour"))
    identical &= r1.mean == r4.mean
    verdict(
        4,
        "parallel speedup and W-independence",
        speedup >= 0.6 * cores and identical,
        f"W={cores} physical cores, speedup {speedup:.2f} (need {0.6 * cores:.2f}), W=4 bit-identical: {identical}",
    )


def test_5_invariants(verdict):
    problems = []
    for seed in range(60):
        ds = random_dataset(seed, n_range=(4, 300))
        rng = np.random.default_rng(seed)
        perm = rng.permutation(ds.n)
        relabel = {c: f"c{v}" for c, v in zip(ds.classes.tolist(), rng.permutation(ds.num_clusters))}
        original = ds.classes[ds.labels]
        renamed = np.array([relabel[c] for c in original.tolist()])
        for metric in FAST_METRICS:
            base = run_two_phase(ds, metric, 1)
            if not np.all((base.s >= -1) & (base.s <= 1)):
                problems.append((seed, metric, "range"))
            singles = ds.cluster_sizes[ds.labels] == 1
            if np.any(base.s[singles] != 0.0):
                problems.append((seed, metric, "singleton"))
            permuted = run_two_phase(validate_and_densify(ds.X[perm], original[perm]), metric, 1)
            if not close(permuted.s, base.s[perm]) or abs(permuted.mean - base.mean) > 1e-12:
                problems.append((seed, metric, "permutation"))
            relabelled = run_two_phase(validate_and_densify(ds.X, renamed), metric, 1)
            if not np.array_equal(relabelled.s, base.s):
                problems.append((seed, metric, "relabel"))
        shift = rng.normal(scale=10.0, size=ds.dims)
        moved = run_two_phase(validate_and_densify(ds.X + shift, ds.labels), "squared_euclidean", 1)
        base = run_two_phase(ds, "squared_euclidean", 1)
        if not np.allclose(moved.s, base.s, rtol=1e-9, atol=ATOL):
            problems.append((seed, "squared_euclidean", "translation"))
        scale = rng.uniform(0.01, 100.0, size=(ds.n, 1))
        scaled = run_two_phase(validate_and_densify(ds.X * scale, ds.labels), "cosine", 1)
        base = run_two_phase(ds, "cosine", 1)
        if np.max(np.abs(scaled.s - base.s)) > 1e-12:
            problems.append((seed, "cosine", "scale"))
    verdict(5, "range, permutation, relabel, translation, scale, singleton", not problems, f"{len(problems)} violations {problems[:5]}")


def test_6_memory_contract(verdict, million):
    peaks = {}
    for metric in FAST_METRICS:
        run_two_phase(million, metric, 8)
        tracemalloc.start()
        base = tracemalloc.get_traced_memory()[0]
        report = run_two_phase(million, metric, 8)
        peak = tracemalloc.get_traced_memory()[1]
        tracemalloc.stop()
        output = sum(getattr(report, f).nbytes for f in ("a", "b", "s", "own", "neighbour"))
        peaks[metric] = (peak - base - output) / 2**20
    verdict(
        6,
        "auxiliary memory < 10 MB at N=1e6, D=16, K=10, W=8",
        all(v < 10 for v in peaks.values()),
        ", ".join(f"{m}: {v:.2f} MB beyond dataset and report" for m, v in peaks.items()),
    )


def _strip_timing(path):
    lines = []
    for line in path.read_text().splitlines():
        if line.startswith("# wall_time_ms="):
            continue
        if line.startswith("{"):
            rec = json.loads(line)
            rec.pop("wall_time_ms", None)
            line = json.dumps(rec)
        lines.append(line)
    return lines


def test_7_determinism(verdict, tmp_path, capsys):
    def run_twice(tag, argv_fn, out_name):
        outs = []
        for i in range(2):
            path = tmp_path / f"{tag}{i}{out_name}"
            assert cli.main(argv_fn(path)) == 0
            outs.append(path)
        return outs

    data = run_twice("gen", lambda p: ["gen", "--n", "3000", "--d", "8", "--k", "6", "--seed", "42", "-o", str(p)], ".csv")
    same = {"gen": data[0].read_bytes() == data[1].read_bytes()}
    src = str(data[0])
    for engine in ("fast", "naive"):
        for fmt in ("csv", "jsonl"):
            outs = run_twice(
                f"score-{engine}-", lambda p: ["score", "-i", src, "--engine", engine, "--shards", "3", "-o", str(p)], f".{fmt}"
            )
            same[f"score/{engine}/{fmt}"] = _strip_timing(outs[0]) == _strip_timing(outs[1])
    bench = run_twice("bench", lambda p: ["bench", "--sizes", "300,600", "--d", "4", "--k", "3", "--records", str(p)], ".jsonl")
    same["bench"] = _strip_timing(bench[0]) == _strip_timing(bench[1])
    capsys.readouterr()
    verdict(7, "identical outputs for identical flags", all(same.values()), ", ".join(f"{k}={v}" for k, v in same.items()))
