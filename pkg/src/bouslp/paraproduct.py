"""Bony paraproduct splitting and the band-advection commutator.

The product of two fields splits into low-high, high-low and diagonal band
interactions; the commutator measures how far band projection is from
commuting with advection. Both are evaluated with the same dealiasing as a
direct product, so the three Bony parts sum to the dealiased product exactly
(up to roundoff) for band-limited inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from bouslp.lp import LPFamily
from bouslp.spectral import (
    SpectralField,
    VelocityField,
    advect,
    dealias,
    gradient,
)


@dataclass(frozen=True)
class BonySplit:
    low_high: SpectralField  # T_f g: low parts of f times bands of g
    high_low: SpectralField  # T_g f
    remainder: SpectralField  # diagonal interactions, |j - k| <= 1

    def total(self) -> SpectralField:
        return self.low_high + self.high_low + self.remainder


def bony_decompose(f: SpectralField, g: SpectralField, family: LPFamily) -> BonySplit:
    """Split the dealiased product f*g into the three Bony parts.

    Partial sums use the empty-sum convention: S_j = 0 for j < -1, so the
    j = 0 paraproduct term vanishes and the identity
    low_high + high_low + remainder = f*g holds band-pair by band-pair.
    """
    if f.grid.n != g.grid.n:
        raise ValueError("fields live on different grids")
    grid = f.grid
    fb = family.bands_physical(f)[:, 0]  # (n_bands, n, n)
    gb = family.bands_physical(g)[:, 0]
    nb = family.n_bands  # index i holds band j = i - 1

    # cumulative sums give S_j in physical space; S_{j-2} for band j = i - 1
    # is the cumulative through index i - 2 (empty when i < 2)
    f_cum = np.cumsum(fb, axis=0)
    g_cum = np.cumsum(gb, axis=0)

    t_fg = np.zeros((grid.n, grid.n))
    t_gf = np.zeros((grid.n, grid.n))
    rem = np.zeros((grid.n, grid.n))
    for i in range(nb):  # band j = i - 1
        if i >= 2:
            t_fg += f_cum[i - 2] * gb[i]
            t_gf += g_cum[i - 2] * fb[i]
        for k in range(max(0, i - 1), min(nb, i + 2)):
            rem += fb[i] * gb[k]

    mk = lambda phys: dealias(SpectralField.from_physical(grid, phys))
    return BonySplit(mk(t_fg), mk(t_gf), mk(rem))


def commutator(
    u: VelocityField, rho: SpectralField, j: int, family: LPFamily
) -> SpectralField:
    """band_j(u . grad rho) - (S u . grad) band_j rho.

    The low-pass index is clamped at -1 (S_{j-2} means S_{-1} for j <= 1),
    so constant velocities commute exactly for every band.
    """
    if j < -1:
        raise ValueError("band index must be >= -1")
    adv = advect(u, rho)
    first = family.delta(adv, j)
    jlow = max(j - 2, -1)
    u_low = VelocityField(
        family.partial_sum(u.u1, jlow), family.partial_sum(u.u2, jlow)
    )
    second = advect(u_low, family.delta(rho, j))
    return first - second


@dataclass(frozen=True)
class CommutatorReport:
    j: int
    lhs: float
    rhs: float
    ratio: float
    violation: bool  # rhs vanished while lhs did not


def _grad_u_fields(u: VelocityField):
    g11, g12 = gradient(u.u1)
    g21, g22 = gradient(u.u2)
    return (g11, g12, g21, g22)


def commutator_bound_terms(u: VelocityField, rho: SpectralField, family: LPFamily):
    """Band data entering the commutator bound, shared across all j.

    Returns (rho_sups, rho_cum_sups, gu_sups, gu_cum_sups, u_low_sup) where
    *_sups[i] is the sup of band i-1 and *_cum_sups[i] the sup of the partial
    sum through band i-3 (the shifted low-pass), computed with pointwise
    Euclidean magnitudes for tensor quantities.
    """
    nb = family.n_bands
    rho_b = family.bands_physical(rho)[:, 0]
    gu = _grad_u_fields(u)
    gu_b = family.bands_physical(gu)  # (nb, 4, n, n)

    rho_sups = np.abs(rho_b).max(axis=(-2, -1))
    gu_mag_b = np.sqrt(np.sum(gu_b**2, axis=1))
    gu_sups = gu_mag_b.max(axis=(-2, -1))

    rho_cum = np.cumsum(rho_b, axis=0)
    gu_cum = np.cumsum(gu_b, axis=0)
    rho_cum_sups = np.zeros(nb)
    gu_cum_sups = np.zeros(nb)
    for i in range(nb):
        if i >= 2:
            rho_cum_sups[i] = np.abs(rho_cum[i - 2]).max()
            gu_cum_sups[i] = np.sqrt(np.sum(gu_cum[i - 2] ** 2, axis=0)).max()

    u_b = family.bands_physical((u.u1, u.u2))
    u_low_sup = float(np.sqrt(np.sum(u_b[0] ** 2, axis=0)).max())
    return rho_sups, rho_cum_sups, gu_sups, gu_cum_sups, u_low_sup


def commutator_bound_rhs(j: int, family: LPFamily, terms) -> float:
    """Right-hand side of the commutator bound with unit constant.

    Both band sums truncate at j_max. In the tail sum the l = -1 factor uses
    the low-block velocity sup itself (not its gradient), and the dyadic
    weight 2^{-l} = 2 is kept there.
    """
    rho_sups, rho_cum_sups, gu_sups, gu_cum_sups, u_low_sup = terms
    m0 = family.overlap
    jmax = family.j_max
    nb = family.n_bands

    term1 = 0.0
    for l in range(max(-1, j - m0), min(jmax, j + m0) + 1):
        i = l + 1
        term1 += rho_cum_sups[i] * gu_sups[i] + gu_cum_sups[i] * rho_sups[i]

    term2 = 0.0
    for l in range(max(-1, j - m0), jmax + 1):
        il = l + 1
        factor = u_low_sup if l == -1 else gu_sups[il]
        inner = 0.0
        for m in range(max(-1, l - 1), min(jmax, l + 1) + 1):
            inner += rho_sups[m + 1]
        term2 += 2.0 ** (-l) * factor * inner
    term2 *= 2.0**j
    assert nb == jmax + 2
    return float(term1 + term2)


def commutator_bound_ratio(
    u: VelocityField,
    rho: SpectralField,
    j: int,
    family: LPFamily,
    terms=None,
    zero_tol: float = 1e-12,
) -> CommutatorReport:
    """Measured lhs, unit-constant rhs, and their ratio for one band."""
    if terms is None:
        terms = commutator_bound_terms(u, rho, family)
    lhs = float(np.abs(commutator(u, rho, j, family).to_physical()).max())
    rhs = commutator_bound_rhs(j, family, terms)
    if lhs <= zero_tol:
        # cancellation at machine precision reports an exact zero ratio
        return CommutatorReport(j, lhs, rhs, 0.0, False)
    if rhs > zero_tol:
        return CommutatorReport(j, lhs, rhs, lhs / rhs, False)
    return CommutatorReport(j, lhs, rhs, math.inf, True)


def commutator_sweep(
    u: VelocityField, rho: SpectralField, family: LPFamily
) -> list[CommutatorReport]:
    """Bound ratios for every band j = -1 .. j_max."""
    terms = commutator_bound_terms(u, rho, family)
    return [
        commutator_bound_ratio(u, rho, j, family, terms=terms)
        for j in family.band_indices
    ]


def commutator_grid_suite(grid_sizes, pairs_per_grid: int, seed: int) -> dict:
    """Max bound ratio over bands and random smooth (u, rho) pairs on each
    grid; the suite's sup is the empirical constant of the bound."""
    from bouslp.lp import build_lp_family, random_prescribed_spectrum, reconstruction_radius
    from bouslp.spectral import Grid, biot_savart

    per_grid = {}
    overall = 0.0
    violations = 0
    for gi, n in enumerate(grid_sizes):
        grid = Grid(n)
        family = build_lp_family(grid)
        kmax = reconstruction_radius(family)
        worst = 0.0
        for p in range(pairs_per_grid):
            s = seed + 1000 * gi + 2 * p
            w = random_prescribed_spectrum(grid, seed=s, decay=1.5, kmax=kmax)
            rho = random_prescribed_spectrum(grid, seed=s + 1, decay=1.5, kmax=kmax)
            u = biot_savart(w)
            for rep in commutator_sweep(u, rho, family):
                if rep.violation:
                    violations += 1
                elif math.isfinite(rep.ratio):
                    worst = max(worst, rep.ratio)
        per_grid[n] = worst
        overall = max(overall, worst)
    return {
        "max_ratio": overall,
        "per_grid": per_grid,
        "violations": violations,
        "pairs_per_grid": pairs_per_grid,
        "seed": seed,
    }
