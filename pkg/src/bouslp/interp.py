"""Scattered-point interpolation on the periodic grid.

The compiled kernel (bouslp._bicubic) is preferred when it was built; a
vectorized NumPy implementation with identical results is the fallback.
Setting BOUSLP_PURE_PYTHON=1 forces the fallback.
"""

from __future__ import annotations

import os

import numpy as np


def _bicubic_numpy(values: np.ndarray, px: np.ndarray, py: np.ndarray, period: float):
    n = values.shape[0]
    if values.shape[1] != n:
        raise ValueError("values must be square")
    h = period / n
    x = px / h
    y = py / h
    i0 = np.floor(x).astype(np.int64)
    j0 = np.floor(y).astype(np.int64)
    tx = x - i0
    ty = y - j0

    def weights(t):
        # Catmull-Rom weights for samples at offsets -1, 0, 1, 2
        t2 = t * t
        t3 = t2 * t
        return (
            0.5 * (-t3 + 2.0 * t2 - t),
            0.5 * (3.0 * t3 - 5.0 * t2 + 2.0),
            0.5 * (-3.0 * t3 + 4.0 * t2 + t),
            0.5 * (t3 - t2),
        )

    wx = weights(tx)
    wy = weights(ty)
    out = np.zeros_like(x)
    for a in range(4):
        ia = (i0 - 1 + a) % n
        row = np.zeros_like(x)
        for b in range(4):
            jb = (j0 - 1 + b) % n
            row += wy[b] * values[ia, jb]
        out += wx[a] * row
    return out


_compiled = None
if os.environ.get("BOUSLP_PURE_PYTHON", "") != "1":
    try:
        from bouslp._bicubic import bicubic_periodic as _compiled  # type: ignore
    except ImportError:
        _compiled = None

HAVE_COMPILED_KERNEL = _compiled is not None


def bicubic_periodic(values, px, py, period):
    """Bicubic (Catmull-Rom) interpolation of a periodic grid field.

    values[i, j] samples the field at (i*h, j*h), h = period / n. Points are
    wrapped periodically. Returns an array shaped like px.
    """
    values = np.ascontiguousarray(values, dtype=np.float64)
    px = np.asarray(px, dtype=np.float64)
    py = np.asarray(py, dtype=np.float64)
    shape = px.shape
    if _compiled is not None:
        out = _compiled(values, np.ravel(px), np.ravel(py), float(period))
        return out.reshape(shape)
    return _bicubic_numpy(values, px, py, float(period))


def bicubic_periodic_reference(values, px, py, period):
    """Always-NumPy path, kept for cross-checking the compiled kernel."""
    values = np.ascontiguousarray(values, dtype=np.float64)
    return _bicubic_numpy(values, np.asarray(px, float), np.asarray(py, float), float(period))
