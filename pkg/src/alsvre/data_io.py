"""LIBSVM ingestion, small text vector files and CSV traces."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np
from scipy import sparse

from .core import UsageError, make_rng


class LibsvmFormatError(UsageError):
    def __init__(self, message: str, line: int):
        super().__init__(f"{message}, line {line}")
        self.line = line


@dataclass(frozen=True)
class LabeledSparseRow:
    label: int
    features: tuple  # ((index >= 1, value), ...) with strictly increasing indices


def _number(token: str, what: str, line: int) -> float:
    try:
        v = float(token)
    except ValueError:
        raise LibsvmFormatError(f"non-numeric {what} {token!r}", line) from None
    if not math.isfinite(v):
        raise LibsvmFormatError(f"non-finite {what} {token!r}", line)
    return v


def parse_libsvm(stream) -> list[LabeledSparseRow]:
    """Parse ``label index:value ...`` records.

    Positive labels map to +1, everything else to -1. Zero values are dropped,
    blank lines and ``#`` comments skipped. Errors carry the 1-based line number.
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    rows = []
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        label = 1 if _number(tokens[0], "label", lineno) > 0 else -1
        feats = []
        prev = 0
        for tok in tokens[1:]:
            idx_s, sep, val_s = tok.partition(":")
            if not sep:
                raise LibsvmFormatError(f"missing colon in {tok!r}", lineno)
            try:
                idx = int(idx_s)
            except ValueError:
                raise LibsvmFormatError(f"non-numeric index {idx_s!r}", lineno) from None
            if idx < 1:
                raise LibsvmFormatError(f"index must be >= 1, got {idx}", lineno)
            if idx <= prev:
                raise LibsvmFormatError("non-increasing index", lineno)
            prev = idx
            val = _number(val_s, "value", lineno)
            if val != 0.0:
                feats.append((idx, val))
        rows.append(LabeledSparseRow(label, tuple(feats)))
    return rows


def load_libsvm(path) -> list[LabeledSparseRow]:
    with open(path, encoding="utf-8") as fh:
        return parse_libsvm(fh)


def rows_to_csr(rows, dim: int | None = None):
    """``(csr matrix, labels)``; column ``j`` holds LIBSVM index ``j + 1``."""
    rows = list(rows)
    max_idx = max((r.features[-1][0] for r in rows if r.features), default=0)
    if dim is None:
        dim = max_idx
    elif dim < max_idx:
        raise UsageError(f"declared dimension {dim} is below the largest index {max_idx}")
    indptr = np.zeros(len(rows) + 1, dtype=np.int64)
    cols, vals = [], []
    for k, r in enumerate(rows):
        indptr[k + 1] = indptr[k] + len(r.features)
        cols.extend(i - 1 for i, _ in r.features)
        vals.extend(v for _, v in r.features)
    X = sparse.csr_matrix((np.array(vals, dtype=float), np.array(cols, dtype=np.int64), indptr),
                          shape=(len(rows), max(dim, 1)))
    return X, np.array([r.label for r in rows], dtype=float)


def fixture_path() -> Path:
    """The bundled 200-row binary-feature sample (123 features, a9a-like)."""
    return Path(str(resources.files("alsvre") / "data" / "a9a_sample.libsvm"))


def synth_binary_libsvm(rows: int = 200, dim: int = 123, active: int = 14, seed=0) -> str:
    """Synthetic a9a-like records: ``active`` one-hot features per row, roughly 1 in 4 positive."""
    rng = make_rng(seed)
    w = rng.standard_normal(dim)
    lines = []
    for _ in range(rows):
        idx = np.sort(rng.choice(dim, size=active, replace=False))
        score = w[idx].sum() / np.sqrt(active) + 0.5 * rng.standard_normal()
        label = "+1" if score > 0.9 else "-1"
        lines.append(" ".join([label] + [f"{i + 1}:1" for i in idx]))
    return "\n".join(lines) + "\n"


def _fmt(v) -> str:
    # repr gives the shortest string that round-trips exactly
    return repr(float(v))


def write_trace_csv(trace, sink) -> None:
    """Header ``iteration,sfo_calls,epoch,<metrics>``, one row per checkpoint, LF endings."""
    names = trace.metric_names

    def emit(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["iteration", "sfo_calls", "epoch", *names])
        for c in trace.checkpoints:
            w.writerow([c.iteration, c.sfo_calls, _fmt(c.sfo_calls / trace.n),
                        *(_fmt(c.metrics[k]) for k in names)])

    if isinstance(sink, (str, Path)):
        with open(sink, "w", encoding="utf-8", newline="") as fh:
            emit(fh)
    else:
        emit(sink)


def read_trace_csv(source):
    """``(header, rows)`` with ints for the counters and floats elsewhere."""
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8", newline="") as fh:
            return read_trace_csv(fh)
    reader = csv.reader(source)
    header = next(reader)
    rows = []
    for rec in reader:
        row = {h: float(v) for h, v in zip(header, rec)}
        row["iteration"] = int(rec[0])
        row["sfo_calls"] = int(rec[1])
        rows.append(row)
    return header, rows


def write_params_json(trace, path) -> None:
    info = {"params": trace.params, "seed": trace.seed, "n": trace.n, "iterations": trace.iterations,
            "sfo_calls": trace.sfo_calls, "refreshes": trace.refreshes,
            "measurement_calls": trace.measurement_calls}
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(info, fh, indent=2, sort_keys=True, default=float)
        fh.write("\n")


def write_vector_file(values, path, header: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# {header}\n")
        for v in values:
            fh.write(_fmt(v) + "\n")


def read_vector_file(path) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        vals = [float(s) for s in (ln.strip() for ln in fh) if s and not s.startswith("#")]
    return np.array(vals)
