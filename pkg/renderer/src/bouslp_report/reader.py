"""Read-only parsers for the harness output files.

The renderer deliberately reparses the CSV/JSON formats rather than import
the solver package: the files are the interface.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

CSV_COLUMNS = [
    "check_id", "t", "lhs", "rhs", "ratio",
    "grid_n", "kappa", "gamma_name", "p0", "p1", "seed",
]


class MalformedRecord(ValueError):
    pass


def read_estimates_csv(path):
    """Parse one records CSV; returns (config_hash, {check_id: series}).

    Each series holds t/lhs/rhs/ratio arrays plus the metadata of its first
    row. Raises MalformedRecord on schema violations.
    """
    path = Path(path)
    config_hash = ""
    rows_by_check: dict[str, list[dict]] = {}
    with open(path, newline="") as fh:
        first = fh.readline()
        if first.startswith("#"):
            if "config_hash=" in first:
                config_hash = first.split("config_hash=", 1)[1].strip()
        else:
            fh.seek(0)
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or set(CSV_COLUMNS) - set(reader.fieldnames):
            raise MalformedRecord(f"{path}: missing columns {CSV_COLUMNS}")
        for row in reader:
            try:
                parsed = {
                    "t": float(row["t"]),
                    "lhs": float(row["lhs"]),
                    "rhs": float(row["rhs"]),
                    "ratio": float(row["ratio"]),
                }
            except (TypeError, ValueError) as err:
                raise MalformedRecord(f"{path}: bad numeric row {row}") from err
            parsed["meta"] = {
                k: row[k] for k in ("grid_n", "kappa", "gamma_name", "p0", "p1", "seed")
            }
            rows_by_check.setdefault(row["check_id"], []).append(parsed)

    series = {}
    for check_id, rows in rows_by_check.items():
        series[check_id] = {
            "t": np.array([r["t"] for r in rows]),
            "lhs": np.array([r["lhs"] for r in rows]),
            "rhs": np.array([r["rhs"] for r in rows]),
            "ratio": np.array([r["ratio"] for r in rows]),
            "meta": rows[0]["meta"],
        }
    return config_hash, series


def read_json(path):
    return json.loads(Path(path).read_text())


def discover(input_dir):
    """Locate harness artifacts below a directory.

    Returns dict with lists of paths: csvs, summaries, twin_runs,
    approximations, snapshots.
    """
    root = Path(input_dir)
    found = {"csvs": [], "summaries": [], "twin_runs": [],
             "approximations": [], "snapshots": []}
    if not root.exists():
        return found
    found["csvs"] = sorted(root.glob("**/estimates*.csv"))
    found["snapshots"] = sorted(root.glob("**/*.f64"))
    for path in sorted(root.glob("**/*.json")):
        try:
            doc = read_json(path)
        except (json.JSONDecodeError, UnicodeDecodeError):
            continue
        if not isinstance(doc, dict):
            continue
        kind = doc.get("kind")
        if kind == "twin_run":
            found["twin_runs"].append(path)
        elif kind == "approximation":
            found["approximations"].append(path)
        elif "checks" in doc and "config_hash" in doc:
            found["summaries"].append(path)
    return found


def read_snapshot(data_path):
    """Load a field snapshot (.f64 + sidecar); validates the shape."""
    data_path = Path(data_path)
    meta_path = data_path.with_suffix(".json")
    if not meta_path.exists():
        raise MalformedRecord(f"{data_path}: missing sidecar {meta_path.name}")
    meta = read_json(meta_path)
    raw = np.frombuffer(data_path.read_bytes(), dtype="<f8")
    n = int(meta["n"])
    if raw.size != n * n:
        raise MalformedRecord(
            f"{data_path}: {raw.size} samples but sidecar says n={n}"
        )
    return raw.reshape(n, n), meta
