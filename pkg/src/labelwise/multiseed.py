"""Aggregate evaluation reports across seeds into mean +/- stdev."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import ArtifactError
from .metrics import MetricsReport


def aggregate(reports: list[MetricsReport]) -> dict[str, dict[str, float]]:
    if not reports:
        raise ArtifactError("no reports to aggregate")
    ks = {r.k for r in reports}
    if len(ks) != 1:
        raise ArtifactError(f"reports disagree on k: {sorted(ks)}")
    out: dict[str, dict[str, float]] = {}
    for key in MetricsReport.METRIC_KEYS:
        values = np.array([getattr(r, key) for r in reports], dtype=np.float64)
        stdev = float(values.std(ddof=1)) if len(values) > 1 else 0.0
        out[key] = {"mean": float(values.mean()), "stdev": stdev}
    out["k"] = {"mean": float(ks.pop()), "stdev": 0.0}
    out["runs"] = {"mean": float(len(reports)), "stdev": 0.0}
    return out


def write_summary(summary: dict, out_dir: str | Path, stem: str = "summary") -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    lines = []
    for key in MetricsReport.METRIC_KEYS:
        entry = summary[key]
        lines.append(f"{key}\t{entry['mean']:.6f} ± {entry['stdev']:.6f}")
    lines.append(f"k\t{int(summary['k']['mean'])}")
    lines.append(f"runs\t{int(summary['runs']['mean'])}")
    (out / f"{stem}.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    (out / f"{stem}.json").write_text(
        json.dumps(summary, sort_keys=True) + "\n", encoding="utf-8"
    )


def load_reports(paths: list[str | Path]) -> list[MetricsReport]:
    reports = []
    for path in paths:
        try:
            reports.append(MetricsReport.from_json(Path(path).read_text(encoding="utf-8")))
        except (OSError, ValueError, KeyError) as exc:
            raise ArtifactError(f"{path}: not a metrics JSON file ({exc})") from exc
    return reports
