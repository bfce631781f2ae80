"""Command-line interface.

Exit codes: 0 success, 1 I/O error, 2 invalid input or flags, 3 the fast and
brute-force engines disagree beyond tolerance.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .core import ValidationError
from .data_io import BlobSpec, CsvSchema, generate_blobs, read_csv, write_dataset_csv, write_report
from .estimator import evaluate
from .parallel import default_shards

EXIT_OK, EXIT_IO, EXIT_INVALID, EXIT_TOLERANCE = 0, 1, 2, 3

METRIC_CHOICES = {"sqeuclid": "squared_euclidean", "cosine": "cosine", "euclid": "euclidean"}


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _int_list(text: str) -> list[int]:
    try:
        values = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values or min(values) < 2:
        raise argparse.ArgumentTypeError("sizes must be integers >= 2")
    return values


def _add_input(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", "-i", required=True, type=Path, help="CSV dataset, one point per row")
    p.add_argument("--label-column", default="-1", help="label column index or header name (default: last)")
    p.add_argument("--delimiter", default=",")
    p.add_argument("--metric", choices=sorted(METRIC_CHOICES), default="sqeuclid")
    p.add_argument("--shards", type=_positive_int, default=None, help="worker threads (default: available CPUs)")


def _schema(args) -> CsvSchema:
    col = args.label_column
    try:
        col = int(col)
    except ValueError:
        pass
    return CsvSchema(delimiter=args.delimiter, label_column=col)


def _guess_format(path: Path, fmt: str | None) -> str:
    if fmt:
        return fmt
    return "csv" if path.suffix.lower() == ".csv" else "jsonl"


def cmd_score(args) -> int:
    ds = read_csv(args.input, _schema(args))
    report = evaluate(ds, METRIC_CHOICES[args.metric], args.engine, args.shards or default_shards())
    if args.output is not None:
        write_report(report, args.output, _guess_format(args.output, args.format))
    print(f"mean silhouette: {report.mean:.17g}")
    print(f"wall time: {report.meta['wall_time_ms']:.3f} ms ({report.engine}, {report.shards} shard(s))")
    return EXIT_OK


def _deviation(fast: np.ndarray, ref: np.ndarray) -> tuple[float, float]:
    diff = np.abs(fast - ref)
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(diff == 0, 0.0, diff / np.abs(ref))
    return float(diff.max()), float(rel.max())


def _breaches(fast: np.ndarray, ref: np.ndarray, rtol: float, atol: float) -> int:
    diff = np.abs(fast - ref)
    return int(np.count_nonzero((diff > atol) & (diff > rtol * np.abs(ref))))


def cmd_compare(args) -> int:
    ds = read_csv(args.input, _schema(args))
    metric = METRIC_CHOICES[args.metric]
    naive = evaluate(ds, metric, "naive")
    fast = evaluate(ds, metric, "fast", args.shards or default_shards())
    bad = 0
    print(f"{'field':<6}{'max abs dev':>14}{'max rel dev':>14}")
    for field in ("a", "b", "s"):
        f, r = getattr(fast, field), getattr(naive, field)
        dabs, drel = _deviation(f, r)
        bad += _breaches(f, r, args.rtol, args.atol)
        print(f"{field:<6}{dabs:>14.3e}{drel:>14.3e}")
    dmean = abs(fast.mean - naive.mean)
    mean_ok = dmean <= max(args.atol, args.rtol * abs(naive.mean))
    print(f"mean  naive={naive.mean:.17g} fast={fast.mean:.17g} |diff|={dmean:.3e}")
    t_naive, t_fast = naive.meta["wall_time_ms"], fast.meta["wall_time_ms"]
    print(f"wall time  naive={t_naive:.3f} ms  fast={t_fast:.3f} ms  speedup={t_naive / t_fast:.1f}x")
    if bad or not mean_ok:
        print(
            f"FAIL: {bad} per-point value(s) outside rtol={args.rtol:g} / atol={args.atol:g}"
            + ("" if mean_ok else "; mean outside tolerance"),
            file=sys.stderr,
        )
        return EXIT_TOLERANCE
    print("OK: engines agree within tolerance")
    return EXIT_OK


def cmd_bench(args) -> int:
    from .bench import append_records, format_table, plot_svg, run_bench

    engines = [e.strip() for e in args.engines.split(",") if e.strip()]
    for e in engines:
        if e not in ("fast", "naive"):
            raise ValidationError(f"unknown engine {e!r} in --engines")
    metric = METRIC_CHOICES[args.metric]

    def progress(rec):
        print(f"  n={rec.n} {rec.engine}: {rec.wall_time_ms:.3f} ms", file=sys.stderr)

    records = run_bench(
        args.sizes,
        args.d,
        args.k,
        metric,
        engines,
        args.shards or default_shards(),
        args.trials,
        args.seed,
        args.spread,
        args.separation,
        progress=progress,
    )
    print(format_table(records))
    if args.records is not None:
        append_records(records, args.records)
    if args.plot is not None:
        plot_svg(records, args.plot)
    return EXIT_OK


def cmd_gen(args) -> int:
    spec = BlobSpec(args.n, args.d, args.k, args.spread, args.separation, args.seed)
    ds = generate_blobs(spec)
    write_dataset_csv(ds, args.output)
    print(f"wrote {ds.n} points ({ds.dims} dims, {ds.num_clusters} clusters) to {args.output}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fastsil", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score", help="score a labelled CSV dataset")
    _add_input(p)
    p.add_argument("--engine", choices=("fast", "naive"), default="fast")
    p.add_argument("--output", "-o", type=Path)
    p.add_argument("--format", choices=("csv", "jsonl"))
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("compare", help="check the fast engine against brute force")
    _add_input(p)
    p.add_argument("--rtol", type=float, default=1e-9)
    p.add_argument("--atol", type=float, default=1e-12)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("bench", help="runtime scaling benchmark on synthetic blobs")
    p.add_argument("--sizes", type=_int_list, default=[5000, 10000, 20000, 40000])
    p.add_argument("--d", type=_positive_int, default=32)
    p.add_argument("--k", type=_positive_int, default=10)
    p.add_argument("--metric", choices=sorted(set(METRIC_CHOICES) - {"euclid"}), default="sqeuclid")
    p.add_argument("--engines", default="naive,fast")
    p.add_argument("--shards", type=_positive_int, default=1)
    p.add_argument("--trials", type=_positive_int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--spread", type=float, default=1.0)
    p.add_argument("--separation", type=float, default=10.0)
    p.add_argument("--records", type=Path, help="append JSONL bench records here")
    p.add_argument("--plot", type=Path, help="write an SVG runtime plot here")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("gen", help="write a synthetic Gaussian-blob dataset as CSV")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--spread", type=float, default=1.0)
    p.add_argument("--separation", type=float, default=10.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", "-o", type=Path, required=True)
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
