"""Suite results and deterministic serialisation.

Floats are written with 12 significant digits and keys are sorted, so a
report re-read and re-written is byte-identical.  Non-finite floats become
``null``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, replace
from typing import List

import numpy as np

from .solver import BoundReport

SIG_DIGITS = 12


def canonical(obj):
    """Plain JSON-ready structure with floats rounded to 12 significant digits."""
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return None
        return float(f"{x:.{SIG_DIGITS}g}")
    if isinstance(obj, dict):
        return {str(k): canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [canonical(v) for v in obj]
    if isinstance(obj, BoundReport):
        return canonical(obj.to_dict())
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(canonical(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return "nan" if not math.isfinite(x) else f"{float(x):.{SIG_DIGITS}g}"
    if isinstance(x, (list, tuple, np.ndarray)):
        return "[" + ", ".join(fmt(v) for v in x) + "]"
    if isinstance(x, dict):
        return "{" + ", ".join(f"{k}: {fmt(v)}" for k, v in x.items()) + "}"
    return str(x)


def worst_of(name, reports) -> BoundReport:
    """Fold a sweep of reports into one: passed iff every checked one passed;
    lhs/rhs/margin come from the smallest margin."""
    reports = list(reports)
    checked = [r for r in reports if not r.skipped]
    skipped = len(reports) - len(checked)
    if not checked:
        reason = reports[0].reason if reports else "empty sweep"
        return BoundReport.skip(name, reason, n_checked=0, n_skipped=skipped)
    worst = min(checked, key=lambda r: r.margin)
    failed = sum(not r.passed for r in checked)
    details = dict(worst.details)
    details.update(n_checked=len(checked), n_failed=failed, n_skipped=skipped)
    return replace(worst, name=name, passed=failed == 0, details=details)


@dataclass
class SuiteResult:
    metric_id: str
    grid: int
    reports: List[BoundReport] = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    # Not serialised: it would break byte-identical reruns.
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports if not r.skipped)

    def add(self, *reports):
        self.reports.extend(reports)

    def failures(self):
        return [r for r in self.reports if not r.skipped and not r.passed]

    def to_dict(self):
        return {
            "metric": self.metric_id,
            "grid": self.grid,
            "passed": self.passed,
            "summary": self.summary,
            "reports": [r.to_dict() for r in self.reports],
        }

    def to_json(self):
        return dumps(self.to_dict())

    def to_table(self):
        rows = [("check", "status", "lhs", "rhs", "margin", "sharp")]
        for r in self.reports:
            status = "skip" if r.skipped else ("PASS" if r.passed else "FAIL")
            rows.append((r.name, status, fmt(r.lhs), fmt(r.rhs), fmt(r.margin), fmt(r.sharp)))
        widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
        lines = [f"metric {self.metric_id}  grid {self.grid}"]
        for key in sorted(self.summary):
            lines.append(f"  {key:<22} {fmt(self.summary[key])}")
        lines.append("")
        for row in rows:
            lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
        for r in self.reports:
            if r.skipped:
                lines.append(f"  skipped {r.name}: {r.reason}")
            elif "literal_rhs" in r.details:
                state = "violated" if r.details.get("literal_violated") else "holds"
                lines.append(f"  note {r.name}: literal constant 2pi/(3H) = {fmt(r.details['literal_rhs'])} {state}")
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines) + "\n"

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["check", "passed", "skipped", "sharp", "lhs", "rhs", "margin", "reason"])
        for r in self.reports:
            w.writerow([r.name, fmt(r.passed), fmt(r.skipped), fmt(r.sharp),
                        fmt(r.lhs), fmt(r.rhs), fmt(r.margin), r.reason])
        return buf.getvalue()

    def render(self, fmt_name):
        return {"json": self.to_json, "csv": self.to_csv, "table": self.to_table}[fmt_name]()


def summary_table(title, values) -> str:
    width = max(len(k) for k in values)
    lines = [title]
    lines += [f"  {k:<{width}}  {fmt(values[k])}" for k in sorted(values)]
    return "\n".join(lines) + "\n"


def summary_csv(values) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["quantity", "value"])
    for k in sorted(values):
        w.writerow([k, fmt(values[k])])
    return buf.getvalue()


def profile_csv(profile) -> str:
    """Columns r, H, u, plateau_flag."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["r", "H", "u", "plateau_flag"])
    for r, h, u, p in zip(profile.r_grid, profile.h_values, profile.u_values, profile.plateau_mask):
        w.writerow([fmt(float(r)), fmt(float(h)), fmt(float(u)), int(p)])
    return buf.getvalue()
