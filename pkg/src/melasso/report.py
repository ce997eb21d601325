"""Replicate records, their aggregation, and table output."""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .errors import ValidationError

METRICS = ("tp", "fp", "l2_err", "l1_err")


@dataclass
class ReplicateRecord:
    replicate: int
    method: str
    tuning: float
    tp: int
    fp: int
    sign_correct: bool
    l1_err: float
    l2_err: float
    converged: bool = True
    wall_time: float = 0.0

    def as_row(self) -> dict:
        row = asdict(self)
        row.pop("wall_time")
        return row


@dataclass
class Summary:
    method: str
    n: int
    n_nonconverged: int
    mean: dict
    se: dict


def aggregate(records, metrics=METRICS) -> dict[str, Summary]:
    """Mean and standard error (sd with ddof=1, divided by sqrt(m)) per metric
    and method. A single record gets se = 0. Non-converged records are kept
    and counted."""
    groups: dict[str, list] = {}
    for r in records:
        groups.setdefault(r.method, []).append(r)
    if not groups:
        raise ValidationError("nothing to aggregate: no records")
    out = {}
    for method in sorted(groups):
        recs = sorted(groups[method], key=lambda r: r.replicate)
        m = len(recs)
        mean, se = {}, {}
        for k in metrics:
            v = np.array([float(getattr(r, k)) for r in recs])
            mean[k] = float(np.mean(v))
            se[k] = float(np.std(v, ddof=1) / np.sqrt(m)) if m > 1 else 0.0
        out[method] = Summary(method, m, sum(not r.converged for r in recs), mean, se)
    return out


def fp_reduction(naive_fp: float, corrected_fp: float) -> float:
    """Relative reduction in false positives, 1 - corrected / naive."""
    if naive_fp == 0:
        return 0.0
    return 1.0 - corrected_fp / naive_fp


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return "" if v is None else str(v)


def write_csv(path, rows: list[dict], columns: list[str] | None = None) -> Path:
    """Write rows atomically (temp file + rename); floats use repr for exact round trips."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if columns is None:
        columns = list(rows[0].keys()) if rows else []
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(row.get(c)) for c in columns])
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())
    os.replace(tmp, path)
    return path


def write_json(path, payload) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")
    os.replace(tmp, path)
    return path


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer, np.bool_)):
        return o.item()
    raise TypeError(f"not JSON serializable: {type(o)}")


def read_csv_rows(path) -> list[dict]:
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))
