"""Catalog of reproducible initial fields for runs and experiments."""

from __future__ import annotations

import numpy as np

from bouslp.lp import random_prescribed_spectrum
from bouslp.spectral import Grid, SpectralField


def taylor_green(grid: Grid, amplitude: float = 1.0) -> SpectralField:
    """Steady-Euler cellular vorticity -2 A cos x1 cos x2."""
    a = grid.arrays
    return SpectralField.from_physical(
        grid, -2.0 * amplitude * np.cos(a.x1) * np.cos(a.x2)
    )


def single_mode(grid: Grid, k1: int = 1, k2: int = 0, amplitude: float = 1.0,
                phase: str = "cos") -> SpectralField:
    a = grid.arrays
    arg = k1 * a.x1 + k2 * a.x2
    vals = np.cos(arg) if phase == "cos" else np.sin(arg)
    return SpectralField.from_physical(grid, amplitude * vals)


def zero(grid: Grid) -> SpectralField:
    return SpectralField.zero(grid)


_CATALOG = {
    "zero": zero,
    "taylor_green": taylor_green,
    "single_mode": single_mode,
    "random": random_prescribed_spectrum,
}


def catalog_names():
    return sorted(_CATALOG)


def make_field(grid: Grid, spec: dict) -> SpectralField:
    """Build a field from a config entry: {"kind": name, ...params}."""
    spec = dict(spec)
    kind = spec.pop("kind", None)
    if kind not in _CATALOG:
        raise ValueError(f"unknown initial-data kind {kind!r}; catalog: {catalog_names()}")
    return _CATALOG[kind](grid, **spec)
