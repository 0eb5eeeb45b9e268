"""Write experiment reports as the CSV table or as JSON."""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Sequence

from ..errors import ConfigError
from .metrics import MetricsReport

CSV_COLUMNS = ("method", "pca_k", "haar_levels", "train_acc", "test_acc", "precision", "recall", "f1", "train_time_s")


def _fmt(v):
    return f"{v:.6f}"


def report_rows(reports: Sequence[MetricsReport]):
    for r in reports:
        yield [
            r.method,
            "none" if r.pca_k is None else str(r.pca_k),
            str(r.haar_levels),
            _fmt(r.train.accuracy),
            _fmt(r.test.accuracy),
            _fmt(r.test.precision),
            _fmt(r.test.recall),
            _fmt(r.test.f1),
            _fmt(r.train_time_s),
        ]


def render_report(reports: Sequence[MetricsReport], fmt="csv") -> str:
    """Serialise ``reports`` in the given order; precision/recall/F1 are test-split values."""
    if not reports:
        raise ConfigError("no reports to emit")
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        w.writerows(report_rows(reports))
        return buf.getvalue()
    if fmt == "json":
        return json.dumps([r.to_dict() for r in reports], indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    raise ConfigError(f"report format must be 'csv' or 'json', got {fmt!r}")


def emit_report(reports: Sequence[MetricsReport], fmt, path) -> Path:
    path = Path(path)
    text = render_report(reports, fmt)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise ConfigError(f"cannot write report to {path}: {exc.strerror}") from exc
    return path


def load_reports(path) -> list[MetricsReport]:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if isinstance(data, dict):
        data = [data]
    return [MetricsReport.from_dict(d) for d in data]
