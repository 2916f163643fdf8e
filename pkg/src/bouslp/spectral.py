"""Periodic 2D spectral fields and operators on the torus [0, 2*pi)^2.

Fields are stored as full complex Fourier coefficient arrays on the integer
wavevector lattice k in [-n/2, n/2)^2, normalized so that

    f(x) = sum_k coeffs[k] * exp(i k . x).

All operators are pure functions; fields are treated as immutable values.
Nonlinear (pointwise) products are dealiased by zeroing every mode with
|k| > n // 3 (the 2/3 rule, circular cutoff).
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi


class MeanVorticityError(ValueError):
    """Vorticity with a nonzero mean mode has no stream function on the torus."""


def check_exponent(p) -> float:
    """Validate a Lebesgue exponent; returns it as float (math.inf allowed)."""
    p = float(p)
    if not (p >= 1.0):
        raise ValueError(f"Lebesgue exponent must lie in [1, inf], got {p}")
    return p


# Admissible defaults: 1 < p0 < 2 < p1 < inf.
DEFAULT_P0 = 1.5
DEFAULT_P1 = 4.0


@dataclass(frozen=True)
class Grid:
    """Uniform n x n grid on [0, 2*pi)^2; n a power of two, n >= 16."""

    n: int

    length: float = TWO_PI

    def __post_init__(self):
        n = self.n
        if n < 16 or (n & (n - 1)) != 0:
            raise ValueError(f"grid size must be a power of two >= 16, got {n}")
        if self.length != TWO_PI:
            raise ValueError("domain period is fixed at 2*pi")

    @property
    def dx(self) -> float:
        return self.length / self.n

    @property
    def dealias_radius(self) -> int:
        return self.n // 3

    @property
    def arrays(self) -> "_GridArrays":
        return _grid_arrays(self.n)


class _GridArrays:
    """Cached wavevector/coordinate arrays for one grid size."""

    def __init__(self, n: int):
        k = np.fft.fftfreq(n, d=1.0 / n)  # integer wavenumbers as float
        self.k1 = k[:, None] * np.ones((1, n))
        self.k2 = np.ones((n, 1)) * k[None, :]
        self.kmag2 = self.k1**2 + self.k2**2
        self.kmag = np.sqrt(self.kmag2)
        inv = np.zeros_like(self.kmag2)
        nz = self.kmag2 > 0
        inv[nz] = 1.0 / self.kmag2[nz]
        self.inv_kmag2 = inv
        self.dealias_mask = (self.kmag <= n // 3).astype(float)
        # ik multipliers for odd derivatives drop the unpaired Nyquist mode,
        # keeping derivatives of real fields real.
        knyq = -(n // 2)
        d1 = self.k1.copy()
        d1[self.k1 == knyq] = 0.0
        d2 = self.k2.copy()
        d2[self.k2 == knyq] = 0.0
        self.deriv_k1 = d1
        self.deriv_k2 = d2
        x = TWO_PI * np.arange(n) / n
        self.x1 = x[:, None] * np.ones((1, n))
        self.x2 = np.ones((n, 1)) * x[None, :]


_ARRAY_CACHE: dict[int, _GridArrays] = {}
_ARRAY_LOCK = threading.Lock()


def _grid_arrays(n: int) -> _GridArrays:
    try:
        return _ARRAY_CACHE[n]
    except KeyError:
        with _ARRAY_LOCK:
            if n not in _ARRAY_CACHE:
                _ARRAY_CACHE[n] = _GridArrays(n)
            return _ARRAY_CACHE[n]


@dataclass(frozen=True)
class SpectralField:
    """A real scalar field stored by its Fourier coefficients."""

    grid: Grid
    coeffs: np.ndarray

    @classmethod
    def from_physical(cls, grid: Grid, values) -> "SpectralField":
        values = np.asarray(values, dtype=float)
        if values.shape != (grid.n, grid.n):
            raise ValueError(f"expected shape {(grid.n, grid.n)}, got {values.shape}")
        return cls(grid, np.fft.fft2(values) / grid.n**2)

    @classmethod
    def zero(cls, grid: Grid) -> "SpectralField":
        return cls(grid, np.zeros((grid.n, grid.n), dtype=complex))

    def to_physical(self) -> np.ndarray:
        return np.real(np.fft.ifft2(self.coeffs * self.grid.n**2))

    @property
    def mean(self) -> float:
        return float(np.real(self.coeffs[0, 0]))

    def __add__(self, other: "SpectralField") -> "SpectralField":
        return SpectralField(self.grid, self.coeffs + other.coeffs)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        return SpectralField(self.grid, self.coeffs - other.coeffs)

    def __mul__(self, c) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs * c)

    __rmul__ = __mul__

    def __neg__(self) -> "SpectralField":
        return SpectralField(self.grid, -self.coeffs)


@dataclass(frozen=True)
class VelocityField:
    """Divergence-free velocity with components u1, u2."""

    u1: SpectralField
    u2: SpectralField

    @property
    def grid(self) -> Grid:
        return self.u1.grid

    def max_speed(self) -> float:
        p1 = self.u1.to_physical()
        p2 = self.u2.to_physical()
        return float(np.sqrt(p1**2 + p2**2).max())


def hermitian_defect(f: SpectralField) -> float:
    """Max |c(k) - conj(c(-k))| over the lattice (0 for a real field)."""
    c = f.coeffs
    flipped = np.conj(np.roll(np.flip(c, axis=(0, 1)), shift=(1, 1), axis=(0, 1)))
    return float(np.abs(c - flipped).max())


def spectral_derivative(f: SpectralField, axis: int) -> SpectralField:
    """d/dx_axis by the ik multiplier (axis is 1 or 2)."""
    a = f.grid.arrays
    if axis == 1:
        k = a.deriv_k1
    elif axis == 2:
        k = a.deriv_k2
    else:
        raise ValueError(f"axis must be 1 or 2, got {axis}")
    return SpectralField(f.grid, 1j * k * f.coeffs)


def laplacian(f: SpectralField) -> SpectralField:
    a = f.grid.arrays
    return SpectralField(f.grid, -a.kmag2 * f.coeffs)


def gradient(f: SpectralField) -> tuple[SpectralField, SpectralField]:
    return spectral_derivative(f, 1), spectral_derivative(f, 2)


def divergence(u: VelocityField) -> SpectralField:
    return spectral_derivative(u.u1, 1) + spectral_derivative(u.u2, 2)


def curl(u: VelocityField) -> SpectralField:
    """Scalar curl d1 u2 - d2 u1."""
    return spectral_derivative(u.u2, 1) - spectral_derivative(u.u1, 2)


def biot_savart(w: SpectralField, strict: bool = True) -> VelocityField:
    """Divergence-free velocity whose curl is w (stream-function convention).

    The k = 0 mode carries no velocity; with ``strict`` a nonzero-mean
    vorticity is rejected, otherwise its mean is ignored.
    """
    a = w.grid.arrays
    scale = max(1.0, float(np.abs(w.coeffs).max()))
    if strict and abs(w.coeffs[0, 0]) > 1e-12 * scale:
        raise MeanVorticityError(
            f"vorticity mean mode {w.coeffs[0, 0]:.3e} != 0; no torus stream function"
        )
    u1 = 1j * a.k2 * w.coeffs * a.inv_kmag2
    u2 = -1j * a.k1 * w.coeffs * a.inv_kmag2
    return VelocityField(SpectralField(w.grid, u1), SpectralField(w.grid, u2))


def dealias(f: SpectralField) -> SpectralField:
    a = f.grid.arrays
    return SpectralField(f.grid, f.coeffs * a.dealias_mask)


def multiply(f: SpectralField, g: SpectralField) -> SpectralField:
    """Dealiased pointwise product computed pseudospectrally."""
    if f.grid.n != g.grid.n:
        raise ValueError("fields live on different grids")
    prod = f.to_physical() * g.to_physical()
    return dealias(SpectralField.from_physical(f.grid, prod))


def advect(u: VelocityField, f: SpectralField) -> SpectralField:
    """u . grad f, formed pointwise in physical space and dealiased."""
    fx = spectral_derivative(f, 1).to_physical()
    fy = spectral_derivative(f, 2).to_physical()
    prod = u.u1.to_physical() * fx + u.u2.to_physical() * fy
    return dealias(SpectralField.from_physical(f.grid, prod))


def lp_norm(f: SpectralField, p) -> float:
    """L^p norm by equal-weight quadrature (grid max for p = inf)."""
    p = check_exponent(p)
    vals = np.abs(f.to_physical())
    if math.isinf(p):
        return float(vals.max())
    dx2 = f.grid.dx**2
    return float((np.sum(vals**p) * dx2) ** (1.0 / p))


def lp_norm_vector(fields, p) -> float:
    """L^p norm of the pointwise Euclidean magnitude of a field tuple."""
    p = check_exponent(p)
    mag2 = None
    for f in fields:
        phys = f.to_physical()
        mag2 = phys**2 if mag2 is None else mag2 + phys**2
    vals = np.sqrt(mag2)
    if math.isinf(p):
        return float(vals.max())
    dx2 = fields[0].grid.dx**2
    return float((np.sum(vals**p) * dx2) ** (1.0 / p))
