"""Field snapshot files: raw little-endian float64 samples plus a JSON sidecar."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from bouslp.spectral import TWO_PI, Grid, SpectralField


def write_snapshot(base_path, field: SpectralField, name: str, time: float,
                   config_hash: str = "") -> tuple[Path, Path]:
    """Write physical samples to <base>.f64 and metadata to <base>.json."""
    base = Path(base_path)
    base.parent.mkdir(parents=True, exist_ok=True)
    data_path = base.with_suffix(".f64")
    meta_path = base.with_suffix(".json")
    values = field.to_physical().astype("<f8")
    data_path.write_bytes(values.tobytes())  # row-major
    meta = {
        "n": field.grid.n,
        "period": TWO_PI,
        "field": name,
        "time": float(time),
        "config_hash": config_hash,
    }
    meta_path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return data_path, meta_path


def read_snapshot(data_path) -> tuple[SpectralField, dict]:
    data_path = Path(data_path)
    meta_path = data_path.with_suffix(".json")
    meta = json.loads(meta_path.read_text())
    raw = np.frombuffer(data_path.read_bytes(), dtype="<f8")
    n = int(meta["n"])
    if raw.size != n * n:
        raise ValueError(
            f"{data_path}: expected {n * n} samples per sidecar, found {raw.size}"
        )
    values = raw.reshape(n, n)
    return SpectralField.from_physical(Grid(n), values), meta
