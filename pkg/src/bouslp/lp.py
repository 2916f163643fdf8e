"""Dyadic (Littlewood-Paley) decomposition and the norms built on it.

The family is generated from a single smooth radial low-pass profile L with
L = 1 on [0, r_pass] and L = 0 on [r_stop, inf), built from the classical
exp(-1/x) bump. Band multipliers telescope,

    band_{-1}(k) = L(|k|),   band_j(k) = L(|k| / 2^(j+1)) - L(|k| / 2^j),

so the partition of unity is exact on every lattice mode with |k| <= 2^j_max
and adjacent-band overlap distance is exactly 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from bouslp.gamma import GammaSpec
from bouslp.spectral import Grid, SpectralField, check_exponent


def _bump_step(x):
    """Smooth monotone 0 -> 1 transition on [0, 1] from the exp(-1/x) bump."""
    x = np.asarray(x, dtype=float)
    lo = x <= 0.0
    hi = x >= 1.0
    xm = np.clip(x, 1e-12, 1.0 - 1e-12)
    a = np.exp(-1.0 / xm)
    b = np.exp(-1.0 / (1.0 - xm))
    out = a / (a + b)
    out = np.where(lo, 0.0, out)
    out = np.where(hi, 1.0, out)
    return out


@dataclass(frozen=True)
class LPFamily:
    """Dyadic multiplier family bound to one grid."""

    grid: Grid
    r_pass: float
    r_stop: float
    j_max: int
    overlap: int  # maximal |j - k| with interacting bands

    def lowpass_profile(self, r):
        """The radial profile L(r): 1 below r_pass, 0 above r_stop."""
        r = np.asarray(r, dtype=float)
        t = (r - self.r_pass) / (self.r_stop - self.r_pass)
        return 1.0 - _bump_step(t)

    def phi_hat(self, r):
        """Radial symbol of the low block."""
        return self.lowpass_profile(r)

    def varphi_hat(self, r):
        """Radial symbol of the dyadic annulus block (band 0 shape)."""
        r = np.asarray(r, dtype=float)
        return self.lowpass_profile(r / 2.0) - self.lowpass_profile(r)

    @property
    def band_indices(self) -> range:
        return range(-1, self.j_max + 1)

    @property
    def n_bands(self) -> int:
        return self.j_max + 2

    def band_multiplier(self, j: int) -> np.ndarray:
        """Lattice multiplier of band j (any j >= -1; zero for j <= -2)."""
        kmag = self.grid.arrays.kmag
        if j <= -2:
            return np.zeros_like(kmag)
        if j == -1:
            return self.lowpass_profile(kmag)
        return self.lowpass_profile(kmag / 2.0 ** (j + 1)) - self.lowpass_profile(
            kmag / 2.0**j
        )

    def cumulative_multiplier(self, j: int) -> np.ndarray:
        """Lattice multiplier of the partial sum through band j (S_j)."""
        kmag = self.grid.arrays.kmag
        if j <= -2:
            return np.zeros_like(kmag)
        return self.lowpass_profile(kmag / 2.0 ** (j + 1))

    def _stack(self) -> np.ndarray:
        return _multiplier_stack(self)

    def delta(self, f: SpectralField, j: int) -> SpectralField:
        return SpectralField(f.grid, f.coeffs * self.band_multiplier(j))

    def partial_sum(self, f: SpectralField, j: int) -> SpectralField:
        return SpectralField(f.grid, f.coeffs * self.cumulative_multiplier(j))

    def decompose(self, f: SpectralField) -> list[SpectralField]:
        """All bands j = -1 .. j_max as spectral fields."""
        stack = self._stack()
        return [SpectralField(f.grid, f.coeffs * stack[i]) for i in range(self.n_bands)]

    def bands_physical(self, fields) -> np.ndarray:
        """Physical samples of every band of a field (or field tuple).

        Returns shape (n_bands, n_components, n, n); scalar input gives
        n_components = 1.
        """
        if isinstance(fields, SpectralField):
            fields = (fields,)
        n = self.grid.n
        stack = self._stack()
        coeffs = np.stack([f.coeffs for f in fields])  # (c, n, n)
        banded = stack[:, None, :, :] * coeffs[None, :, :, :]
        return np.real(np.fft.ifft2(banded * n**2, axes=(-2, -1)))

    def band_lp_norms(self, fields, p) -> np.ndarray:
        """L^p norm of each band; vector fields use pointwise magnitude."""
        p = check_exponent(p)
        phys = self.bands_physical(fields)
        mag = np.sqrt(np.sum(phys**2, axis=1))
        if math.isinf(p):
            return mag.max(axis=(-2, -1))
        dx2 = self.grid.dx**2
        return (np.sum(mag**p, axis=(-2, -1)) * dx2) ** (1.0 / p)

    def band_sup_norms(self, fields) -> np.ndarray:
        return self.band_lp_norms(fields, math.inf)


_STACK_CACHE: dict[tuple, np.ndarray] = {}


def _multiplier_stack(family: LPFamily) -> np.ndarray:
    key = (family.grid.n, family.r_pass, family.r_stop, family.j_max)
    if key not in _STACK_CACHE:
        _STACK_CACHE[key] = np.stack(
            [family.band_multiplier(j) for j in family.band_indices]
        )
    return _STACK_CACHE[key]


def build_lp_family(grid: Grid, r_pass: float = 0.5, r_stop: float = 1.0) -> LPFamily:
    """Construct the family; validates the support/coverage constraints.

    The low block must cover {r <= 1} with a positive floor on {r <= 5/6},
    and the annulus block must live in {1/2 <= r <= 2} with a floor on
    {3/5 <= r <= 5/3}. j_max is the largest band with 2^(j_max + 1) <= n/2.
    """
    if not (0.0 < r_pass < r_stop <= 1.0):
        raise ValueError("need 0 < r_pass < r_stop <= 1 for admissible supports")
    if r_pass > 5.0 / 6.0:
        raise ValueError("r_pass must not exceed 5/6 (annulus floor on [3/5, 5/3])")
    j_max = int(math.log2(grid.n)) - 2
    if j_max < 0:
        raise ValueError(f"grid n={grid.n} too small to host the j = 0 annulus")
    fam = LPFamily(grid=grid, r_pass=r_pass, r_stop=r_stop, j_max=j_max, overlap=1)
    # positive-floor constraints from the construction
    if fam.phi_hat(5.0 / 6.0) <= 0.0:
        raise ValueError("low-block profile vanishes inside {r <= 5/6}")
    probe = np.linspace(3.0 / 5.0, 5.0 / 3.0, 64)
    if np.min(fam.varphi_hat(probe)) <= 0.0:
        raise ValueError("annulus profile vanishes inside {3/5 <= r <= 5/3}")
    return fam


def reconstruction_radius(family: LPFamily) -> int:
    """Largest |k| for which the band partition of unity is exact."""
    return int(2**family.j_max)


def band_project(f: SpectralField, family: LPFamily, j: int, mode: str = "delta"):
    """Project onto band j (``delta``) or onto bands <= j (``partial_sum``)."""
    if mode == "delta":
        return family.delta(f, j)
    if mode == "partial_sum":
        return family.partial_sum(f, j)
    raise ValueError(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class NormSpec:
    """Selector for the band-built norms.

    kind: "besov" (uses s, p, q), "bgamma" (uses gamma, variant "gamma" or
    "gamma1"), or "b0_inf_inf".
    """

    kind: str
    s: float = 0.0
    p: float = math.inf
    q: float = 1.0
    gamma: GammaSpec | None = None
    variant: str = "gamma"


def besov_norm(fields, family: LPFamily, s: float, p, q) -> float:
    """(sum_j 2^(jsq) |band_j|_p^q)^(1/q), truncated at j_max."""
    q = check_exponent(q)
    band_norms = family.band_lp_norms(fields, p)
    j = np.arange(-1, family.j_max + 1, dtype=float)
    weighted = 2.0 ** (j * s) * band_norms
    if math.isinf(q):
        return float(weighted.max())
    return float((weighted**q).sum() ** (1.0 / q))


def band_sup_norm(fields, family: LPFamily) -> float:
    """sup_j |band_j|_inf (the weakest band norm)."""
    return float(family.band_sup_norms(fields).max())


def bgamma_norm(fields, family: LPFamily, gamma: GammaSpec, variant: str = "gamma") -> float:
    """sup_N growth(N)^(-1) sum_{j<=N} |band_j|_inf, N up to j_max."""
    sups = family.band_sup_norms(fields)
    partial = np.cumsum(sups)
    bands = np.arange(-1, family.j_max + 1, dtype=float)
    if variant == "gamma":
        weights = gamma(bands)
    elif variant == "gamma1":
        weights = gamma.gamma1(bands)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return float((partial / weights).max())


def norm(fields, spec: NormSpec, family: LPFamily) -> float:
    if spec.kind == "besov":
        return besov_norm(fields, family, spec.s, spec.p, spec.q)
    if spec.kind == "bgamma":
        if spec.gamma is None:
            raise ValueError("bgamma norm needs a GammaSpec")
        return bgamma_norm(fields, family, spec.gamma, spec.variant)
    if spec.kind == "b0_inf_inf":
        return band_sup_norm(fields, family)
    raise ValueError(f"unknown norm kind {spec.kind!r}")


def reconstruct(f: SpectralField, family: LPFamily) -> SpectralField:
    """Sum of all bands (equals f on modes inside the reconstruction radius)."""
    total = np.zeros_like(f.coeffs)
    for j in family.band_indices:
        total = total + f.coeffs * family.band_multiplier(j)
    return SpectralField(f.grid, total)


def partition_defect(family: LPFamily, radius: float | None = None) -> float:
    """Max |1 - sum of multipliers| over lattice modes with |k| <= radius."""
    if radius is None:
        radius = reconstruction_radius(family)
    kmag = family.grid.arrays.kmag
    total = np.zeros_like(kmag)
    for j in family.band_indices:
        total += family.band_multiplier(j)
    mask = kmag <= radius
    return float(np.abs(total[mask] - 1.0).max())


def truncate_low_pass(f: SpectralField, m: int, family: LPFamily) -> SpectralField:
    """Smooth low-pass truncation of initial data (partial sum through m)."""
    if m < -1 or m > family.j_max:
        raise ValueError(f"truncation band m={m} outside [-1, {family.j_max}]")
    return family.partial_sum(f, m)


def random_prescribed_spectrum(
    grid: Grid,
    seed,
    decay: float = 3.0,
    kmax: float | None = None,
    amplitude: float = 1.0,
    mean_free: bool = True,
) -> SpectralField:
    """Random-phase field with |k|^(-decay) coefficient envelope.

    The standard surrogate for rough initial data on a band-limited grid;
    fully reproducible from the seed.
    """
    rng = np.random.default_rng(seed)
    a = grid.arrays
    if kmax is None:
        kmax = grid.dealias_radius
    noise = rng.standard_normal((grid.n, grid.n))
    coeffs = np.fft.fft2(noise) / grid.n**2
    envelope = (a.kmag <= kmax).astype(float)
    envelope *= np.where(a.kmag > 0, np.maximum(a.kmag, 1.0), 1.0) ** (-decay)
    coeffs = coeffs * envelope
    if mean_free:
        coeffs[0, 0] = 0.0
    f = SpectralField(grid, coeffs)
    peak = float(np.abs(f.to_physical()).max())
    if peak > 0:
        f = f * (amplitude / peak)
    return f


def bands_of(fields: Sequence[SpectralField] | SpectralField, family: LPFamily):
    """Convenience: list of (j, band sup norm) pairs."""
    sups = family.band_sup_norms(fields)
    return list(zip(family.band_indices, sups))
