"""CSV ingestion, synthetic blobs and report files.

Report formats
--------------
Both formats write one record per point (``index, own, neighbour, a, b, s``)
followed by a summary (``mean, metric, engine, shards, wall_time_ms,
classes``). Floats carry 17 significant digits, so reading a report back
gives bit-identical values.

* ``csv``: a header row, one row per point, then ``# key=value`` summary
  lines whose values are JSON-encoded.
* ``jsonl``: one JSON object per point, then one object with
  ``"summary": true``.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import Dataset, SilhouetteReport, ValidationError, validate_and_densify

REPORT_FIELDS = ("index", "own", "neighbour", "a", "b", "s")
SUMMARY_FIELDS = ("mean", "metric", "engine", "shards", "wall_time_ms", "classes")


class CsvFormatError(ValidationError):
    pass


@dataclass(frozen=True)
class CsvSchema:
    delimiter: str = ","
    label_column: int | str = -1
    has_header: bool | None = None  # None: header iff the first row is not numeric


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def read_csv(path, schema: CsvSchema = CsvSchema()) -> Dataset:
    """Read a labelled dataset: one point per row, one label column.

    Line numbers in error messages are 1-based and count the header.
    """
    with open(path, newline="") as fh:
        rows = [(lineno, row) for lineno, row in enumerate(csv.reader(fh, delimiter=schema.delimiter), 1) if row]
    if not rows:
        raise CsvFormatError(f"{path}: no data rows")

    ncols = len(rows[0][1])
    if ncols < 2:
        raise CsvFormatError(f"line {rows[0][0]}: need at least one feature column and a label column")
    header = None
    has_header = schema.has_header
    if has_header is None:
        has_header = isinstance(schema.label_column, str) or not all(
            _is_number(v) for j, v in enumerate(rows[0][1]) if j != _label_index(schema.label_column, ncols, None)
        )
    if has_header:
        header = [h.strip() for h in rows[0][1]]
        rows = rows[1:]
    label_col = _label_index(schema.label_column, ncols, header)

    feats, labels = [], []
    for lineno, row in rows:
        if len(row) != ncols:
            raise CsvFormatError(f"line {lineno}: expected {ncols} columns, got {len(row)}")
        values = []
        for j, text in enumerate(row):
            if j == label_col:
                continue
            try:
                v = float(text)
            except ValueError:
                raise CsvFormatError(f"line {lineno}: column {j + 1} is not a number: {text!r}") from None
            if not math.isfinite(v):
                raise CsvFormatError(f"line {lineno}: non-finite value {text!r} in column {j + 1}")
            values.append(v)
        feats.append(values)
        labels.append(row[label_col].strip())
    if not feats:
        raise CsvFormatError(f"{path}: no data rows")
    return validate_and_densify(np.array(feats, dtype=np.float64), np.array(labels))


def _label_index(label_column, ncols: int, header) -> int:
    if isinstance(label_column, str):
        if header is None:
            raise CsvFormatError(f"label column {label_column!r} given by name but the file has no header")
        if label_column not in header:
            raise CsvFormatError(f"label column {label_column!r} not in header {header}")
        return header.index(label_column)
    idx = label_column + ncols if label_column < 0 else label_column
    if not 0 <= idx < ncols:
        raise CsvFormatError(f"label column {label_column} out of range for {ncols} columns")
    return idx


def write_dataset_csv(ds: Dataset, path) -> None:
    """Write features and original labels, with an ``x0,..,label`` header."""
    with open(path, "w", newline="") as fh:
        fh.write(",".join([f"x{j}" for j in range(ds.dims)] + ["label"]) + "\n")
        labels = ds.classes[ds.labels]
        for row, lab in zip(ds.X.tolist(), labels.tolist()):
            fh.write(",".join(map(_fmt, row)) + f",{lab}\n")


# synthetic data ---------------------------------------------------------------


@dataclass(frozen=True)
class BlobSpec:
    n: int
    d: int
    k: int
    spread: float = 1.0
    separation: float = 10.0
    seed: int = 0

    def validate(self) -> None:
        if not (self.n >= self.k >= 2):
            raise ValidationError(f"need n >= k >= 2, got n={self.n}, k={self.k}")
        if self.d < 1:
            raise ValidationError(f"need d >= 1, got {self.d}")
        if not self.spread > 0:
            raise ValidationError(f"need spread > 0, got {self.spread}")
        if not self.separation >= 0:
            raise ValidationError(f"need separation >= 0, got {self.separation}")
        if not 0 <= self.seed < 2**64:
            raise ValidationError("seed must fit in 64 unsigned bits")


class NormalStream:
    """Standard normals from Philox4x64-10 via the Box-Muller transform.

    The generator is keyed with the seed and starts at counter zero. Each
    pair of raw 64-bit outputs ``(r1, r2)`` becomes ``u = ((r >> 11) + 1) /
    2**53`` in (0, 1] and then ``sqrt(-2 ln u1) * (cos 2 pi u2, sin 2 pi u2)``.
    """

    def __init__(self, seed: int):
        self._bits = np.random.Philox(key=seed)

    def normals(self, count: int) -> np.ndarray:
        pairs = (count + 1) // 2
        raw = self._bits.random_raw(2 * pairs).reshape(pairs, 2)
        u = ((raw >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0**-53
        radius = np.sqrt(-2.0 * np.log(u[:, 0]))
        angle = 2.0 * np.pi * u[:, 1]
        out = np.empty((pairs, 2))
        out[:, 0] = radius * np.cos(angle)
        out[:, 1] = radius * np.sin(angle)
        return out.ravel()[:count]


def generate_blobs(spec: BlobSpec) -> Dataset:
    """Isotropic Gaussian blobs; point ``i`` belongs to blob ``i % k``.

    Centres are ``separation`` times standard normal vectors and points
    scatter around them with standard deviation ``spread``. Output is a pure
    function of ``spec``.
    """
    spec.validate()
    stream = NormalStream(spec.seed)
    centres = spec.separation * stream.normals(spec.k * spec.d).reshape(spec.k, spec.d)
    labels = np.arange(spec.n, dtype=np.int64) % spec.k
    X = centres[labels] + spec.spread * stream.normals(spec.n * spec.d).reshape(spec.n, spec.d)
    return validate_and_densify(X, labels)


# reports ----------------------------------------------------------------------


def _summary(report: SilhouetteReport) -> dict:
    classes = None if report.classes is None else np.asarray(report.classes).tolist()
    return {
        "mean": report.mean,
        "metric": report.metric,
        "engine": report.engine,
        "shards": report.shards,
        "wall_time_ms": report.meta.get("wall_time_ms"),
        "classes": classes,
    }


def _json_value(v) -> str:
    return _fmt(v) if isinstance(v, float) else json.dumps(v)


def write_report(report: SilhouetteReport, path, fmt: str = "jsonl") -> None:
    """Write per-point rows then a summary record (see module docstring)."""
    if fmt not in ("csv", "jsonl"):
        raise ValueError(f"unknown report format {fmt!r}")
    cols = zip(report.own.tolist(), report.neighbour.tolist(), report.a.tolist(), report.b.tolist(), report.s.tolist())
    with open(path, "w", newline="") as fh:
        if fmt == "csv":
            fh.write(",".join(REPORT_FIELDS) + "\n")
            for i, (own, nb, a, b, s) in enumerate(cols):
                fh.write(f"{i},{own},{nb},{_fmt(a)},{_fmt(b)},{_fmt(s)}\n")
            for key, value in _summary(report).items():
                fh.write(f"# {key}={_json_value(value)}\n")
        else:
            for i, (own, nb, a, b, s) in enumerate(cols):
                fh.write(
                    f'{{"index": {i}, "own": {own}, "neighbour": {nb}, '
                    f'"a": {_fmt(a)}, "b": {_fmt(b)}, "s": {_fmt(s)}}}\n'
                )
            body = ", ".join(f'"{k}": {_json_value(v)}' for k, v in _summary(report).items())
            fh.write(f'{{"summary": true, "n": {len(report)}, {body}}}\n')


def read_report(path, fmt: str | None = None) -> SilhouetteReport:
    """Parse a file written by :func:`write_report`."""
    path = Path(path)
    if fmt is None:
        fmt = "csv" if path.suffix.lower() == ".csv" else "jsonl"
    rows: list[tuple] = []
    summary: dict = {}
    with open(path) as fh:
        if fmt == "csv":
            next(fh)
            for line in fh:
                if line.startswith("#"):
                    key, _, value = line[1:].strip().partition("=")
                    summary[key] = json.loads(value)
                else:
                    i, own, nb, a, b, s = line.strip().split(",")
                    rows.append((int(own), int(nb), float(a), float(b), float(s)))
        else:
            for line in fh:
                rec = json.loads(line)
                if rec.get("summary"):
                    summary = rec
                else:
                    rows.append((rec["own"], rec["neighbour"], rec["a"], rec["b"], rec["s"]))
    own, nb, a, b, s = (list(c) for c in zip(*rows)) if rows else ([],) * 5
    classes = summary.get("classes")
    return SilhouetteReport(
        a=np.array(a, dtype=np.float64),
        b=np.array(b, dtype=np.float64),
        s=np.array(s, dtype=np.float64),
        own=np.array(own, dtype=np.int64),
        neighbour=np.array(nb, dtype=np.int64),
        mean=summary["mean"],
        metric=summary["metric"],
        engine=summary["engine"],
        shards=summary["shards"],
        classes=None if classes is None else np.array(classes),
        meta={"wall_time_ms": summary.get("wall_time_ms")},
    )
