"""Estimation statistics over trial metrics.

Pairwise differences between mode means with percentile bootstrap
confidence intervals, reported per task and aggregated. No p-values; an
interval excluding zero is flagged as significant.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

MODES = ("no_haptic", "haptic", "haptic_snap")
TASKS = (
    "TaskProtrusion",
    "TaskDepression",
    "TaskRandVal",
    "TaskCurve",
    "TaskGroove",
    "TaskAnnotation",
)
DEFAULT_RESAMPLES = 10_000


@dataclass
class TrialRecord:
    participant: str
    mode: str
    task: str
    trial: int | str
    completion_time: float | None = None
    metrics: dict = field(default_factory=dict)

    def validate(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode: {self.mode!r}")
        if self.task not in TASKS:
            raise ValueError(f"unknown task: {self.task!r}")
        return self

    def value_of(self, metric: str):
        if metric == "completion_time":
            return self.completion_time
        return self.metrics.get(metric)


@dataclass
class BootstrapResult:
    mean_diff: float
    ci_low: float
    ci_high: float
    level: float
    n_resamples: int

    @property
    def significant(self) -> bool:
        return self.ci_low > 0.0 or self.ci_high < 0.0


def bootstrap_mean_diff(
    a,
    b,
    n_resamples: int = DEFAULT_RESAMPLES,
    level: float = 0.95,
    seed: int = 0,
) -> BootstrapResult:
    """Percentile bootstrap CI for mean(a) - mean(b).

    Each resample redraws both groups with replacement; deterministic in
    the seed, and the resampling indices are independent of the sample
    values (so rescaling the data rescales the interval).
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.size < 2 or b.size < 2:
        raise ValueError("each group needs at least 2 samples")
    if not 0.0 < level < 1.0:
        raise ValueError("confidence level must be in (0, 1)")
    rng = np.random.default_rng(seed)
    idx_a = rng.integers(0, a.size, size=(n_resamples, a.size))
    idx_b = rng.integers(0, b.size, size=(n_resamples, b.size))
    diffs = a[idx_a].mean(axis=1) - b[idx_b].mean(axis=1)
    alpha = (1.0 - level) / 2.0
    lo, hi = np.percentile(diffs, [100.0 * alpha, 100.0 * (1.0 - alpha)])
    return BootstrapResult(
        mean_diff=float(a.mean() - b.mean()),
        ci_low=float(lo),
        ci_high=float(hi),
        level=level,
        n_resamples=n_resamples,
    )


def _pairs(modes_present):
    order = [m for m in MODES if m in modes_present]
    return [(order[i], order[j]) for i in range(len(order)) for j in range(i + 1, len(order))]


def summarize(
    records,
    metrics=None,
    n_resamples: int = DEFAULT_RESAMPLES,
    level: float = 0.95,
    seed: int = 0,
) -> dict:
    """All pairwise mode comparisons per metric, per task and aggregated.

    Missing task/mode cells are reported rather than fabricated; the
    result is invariant to the order of the input records (group samples
    are sorted before resampling).
    """
    records = [r.validate() for r in records]
    modes_present = {r.mode for r in records}
    report = {"comparisons": [], "missing": [], "errors": []}
    if len(modes_present) < 2:
        report["errors"].append("need at least two interaction modes to compare")
        return report

    if metrics is None:
        names = set()
        for r in records:
            names.update(k for k, v in r.metrics.items() if v is not None)
            if r.completion_time is not None:
                names.add("completion_time")
        metrics = sorted(names)

    tasks_present = [t for t in TASKS if any(r.task == t for r in records)]
    for task in TASKS:
        for mode in MODES:
            if not any(r.task == task and r.mode == mode for r in records):
                report["missing"].append({"task": task, "mode": mode})

    scopes = [("ALL", records)] + [
        (task, [r for r in records if r.task == task]) for task in tasks_present
    ]
    for metric in metrics:
        for scope, recs in scopes:
            groups = {}
            for mode in MODES:
                vals = sorted(
                    float(v)
                    for r in recs
                    if r.mode == mode and (v := r.value_of(metric)) is not None
                )
                if len(vals) >= 2:
                    groups[mode] = np.array(vals)
            for mode_a, mode_b in _pairs(groups):
                res = bootstrap_mean_diff(
                    groups[mode_a], groups[mode_b], n_resamples, level, seed
                )
                report["comparisons"].append(
                    {
                        "task": scope,
                        "metric": metric,
                        "mode_a": mode_a,
                        "mode_b": mode_b,
                        "n_a": int(groups[mode_a].size),
                        "n_b": int(groups[mode_b].size),
                        "mean_diff": res.mean_diff,
                        "ci_low": res.ci_low,
                        "ci_high": res.ci_high,
                        "level": level,
                        "significant": res.significant,
                    }
                )
    return report


# ---------------------------------------------------------------------------
# CSV / JSON plumbing


def read_metrics_csv(text: str) -> list[TrialRecord]:
    """Rows of trial,mode,task,completion_time,deviation,irregularity,error,touch_count."""
    records = []
    reader = csv.DictReader(io.StringIO(text))
    for row in reader:
        metrics = {}
        for key in ("deviation", "irregularity", "error", "touch_count"):
            raw = (row.get(key) or "").strip()
            if raw:
                metrics[key] = float(raw)
        ct = (row.get("completion_time") or "").strip()
        trial_raw = (row.get("trial") or "0").strip()
        try:
            trial = int(trial_raw)
        except ValueError:
            trial = trial_raw  # string trial ids are fine
        records.append(
            TrialRecord(
                participant=row.get("participant", ""),
                mode=row["mode"].strip(),
                task=row["task"].strip(),
                trial=trial,
                completion_time=float(ct) if ct else None,
                metrics=metrics,
            ).validate()
        )
    return records


def report_to_csv(report: dict) -> str:
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(
        [
            "task",
            "metric",
            "mode_a",
            "mode_b",
            "n_a",
            "n_b",
            "mean_diff",
            "ci_low",
            "ci_high",
            "level",
            "significant",
        ]
    )
    for c in report["comparisons"]:
        writer.writerow(
            [
                c["task"],
                c["metric"],
                c["mode_a"],
                c["mode_b"],
                c["n_a"],
                c["n_b"],
                repr(c["mean_diff"]),
                repr(c["ci_low"]),
                repr(c["ci_high"]),
                c["level"],
                int(c["significant"]),
            ]
        )
    return out.getvalue()


def ci_segments_csv(report: dict) -> str:
    """Plot-ready rows: one CI segment per comparison."""
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(["label", "task", "metric", "lo", "mid", "hi"])
    for c in report["comparisons"]:
        label = f"{c['mode_a']}-{c['mode_b']}"
        writer.writerow(
            [
                label,
                c["task"],
                c["metric"],
                repr(c["ci_low"]),
                repr(c["mean_diff"]),
                repr(c["ci_high"]),
            ]
        )
    return out.getvalue()


def report_to_json(report: dict) -> str:
    return json.dumps(report, indent=2)
