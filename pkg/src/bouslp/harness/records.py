"""Estimate records: time series of both sides of a monitored inequality."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

CSV_COLUMNS = [
    "check_id", "t", "lhs", "rhs", "ratio",
    "grid_n", "kappa", "gamma_name", "p0", "p1", "seed",
]


@dataclass
class EstimateRecord:
    check_id: str
    times: list[float]
    lhs: list[float]
    rhs: list[float]
    meta: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)  # e.g. truncation residuals

    def __post_init__(self):
        if not (len(self.times) == len(self.lhs) == len(self.rhs)):
            raise ValueError("series lengths differ")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValueError("times must be strictly increasing")
        if any(v < 0 for v in self.lhs) or any(v < 0 for v in self.rhs):
            raise ValueError("lhs and rhs must be nonnegative")

    @property
    def ratios(self) -> list[float]:
        out = []
        for l, r in zip(self.lhs, self.rhs):
            if r > 0:
                out.append(l / r)
            else:
                out.append(0.0 if l == 0 else math.inf)
        return out

    @property
    def empirical_constant(self) -> float:
        return max(self.ratios, default=0.0)

    def rows(self):
        meta = self.meta
        for t, l, r, q in zip(self.times, self.lhs, self.rhs, self.ratios):
            yield {
                "check_id": self.check_id,
                "t": repr(float(t)),
                "lhs": repr(float(l)),
                "rhs": repr(float(r)),
                "ratio": repr(float(q)),
                "grid_n": meta.get("grid_n", ""),
                "kappa": meta.get("kappa", ""),
                "gamma_name": meta.get("gamma_name", ""),
                "p0": meta.get("p0", ""),
                "p1": meta.get("p1", ""),
                "seed": meta.get("seed", ""),
            }


def write_records_csv(path, records, config_hash: str = ""):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        if config_hash:
            fh.write(f"# config_hash={config_hash}\n")
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for rec in records:
            for row in rec.rows():
                writer.writerow(row)


def read_records_csv(path):
    """Rows grouped by check_id; values parsed back to float."""
    groups: dict[str, list[dict]] = {}
    with open(path, newline="") as fh:
        first = fh.readline()
        if not first.startswith("#"):
            fh.seek(0)
        reader = csv.DictReader(fh)
        for row in reader:
            parsed = dict(row)
            for key in ("t", "lhs", "rhs", "ratio"):
                parsed[key] = float(row[key])
            groups.setdefault(row["check_id"], []).append(parsed)
    return groups


def summary_dict(records, calibration: dict | None = None, margin: float = 1e-2):
    """Per-check empirical constants and pass/fail against calibration."""
    checks = {}
    all_pass = True
    for rec in records:
        cal = None if calibration is None else calibration.get(rec.check_id)
        entry = {
            "empirical_constant": rec.empirical_constant,
            "samples": len(rec.times),
            "extra": rec.extra,
        }
        if cal is not None:
            passed = rec.empirical_constant <= cal * (1.0 + margin)
            entry["calibrated_constant"] = cal
            entry["passed"] = passed
            all_pass = all_pass and passed
        checks[rec.check_id] = entry
    return {"checks": checks, "all_passed": all_pass}


def write_summary_json(path, summary: dict):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
