"""Registry of monitored inequalities evaluated along trajectories.

Every check compares a measured left-hand side against the right-hand side
with unit constants, sample by sample; the empirical constant of a run is
the sup of the ratio series. Time integrals use the trapezoid rule at the
trajectory's sample stride.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from bouslp.gamma import GammaSpec
from bouslp.harness.records import EstimateRecord
from bouslp.lp import LPFamily
from bouslp.paraproduct import bony_decompose
from bouslp.solver import Trajectory
from bouslp.spectral import (
    SpectralField,
    TWO_PI,
    advect,
    biot_savart,
    gradient,
    lp_norm,
    lp_norm_vector,
)


def cumtrapz(values, times):
    values = np.asarray(values, float)
    times = np.asarray(times, float)
    out = np.zeros_like(values)
    if len(values) > 1:
        inc = 0.5 * (values[1:] + values[:-1]) * np.diff(times)
        out[1:] = np.cumsum(inc)
    return out


def bgamma_from_sups(sups, gamma: GammaSpec, variant: str = "gamma") -> float:
    bands = np.arange(-1, len(sups) - 1, dtype=float)
    weights = gamma(bands) if variant == "gamma" else gamma.gamma1(bands)
    return float((np.cumsum(sups) / weights).max())


def besov_from_band_norms(norms, s: float, q: float = 1.0) -> float:
    j = np.arange(-1, len(norms) - 1, dtype=float)
    weighted = 2.0 ** (s * j) * np.asarray(norms)
    return float(weighted.max()) if math.isinf(q) else float(
        (weighted**q).sum() ** (1.0 / q)
    )


@dataclass
class CheckContext:
    """Shared evaluation context with per-state memoization."""

    traj: Trajectory
    family: LPFamily
    gamma: GammaSpec
    p0: float = 1.5
    p1: float = 4.0
    meta: dict = field(default_factory=dict)
    energy_series: tuple | None = None  # optional dense (t, |rho|_2^2, |grad rho|_2^2)
    _memo: dict = field(default_factory=dict)

    def __post_init__(self):
        # trapezoid quadrature needs dense sampling relative to the step
        times = self.traj.times
        if len(times) > 1:
            spacing = float(np.max(np.diff(times)))
            if spacing > 10.0 * self.traj.config.dt * (1.0 + 1e-9):
                raise ValueError(
                    f"sample spacing {spacing:.3g} exceeds 10*dt="
                    f"{10 * self.traj.config.dt:.3g}; store a denser stride"
                )

    def _get(self, key, builder):
        if key not in self._memo:
            self._memo[key] = builder()
        return self._memo[key]

    # field accessors -----------------------------------------------------
    def state(self, i):
        return self.traj.states[i]

    def velocity(self, i):
        return self._get(("u", i), lambda: self.traj.velocity(i))

    def grad_rho(self, i):
        return self._get(("grad_rho", i), lambda: gradient(self.state(i).rho))

    # scalar metrics ------------------------------------------------------
    def omega_lp(self, i, p):
        return self._get(("omega_lp", i, p), lambda: lp_norm(self.state(i).omega, p))

    def rho_lp(self, i, p):
        return self._get(("rho_lp", i, p), lambda: lp_norm(self.state(i).rho, p))

    def grad_rho_lp(self, i, p):
        return self._get(
            ("grad_rho_lp", i, p), lambda: lp_norm_vector(self.grad_rho(i), p)
        )

    # band metrics ----------------------------------------------------------
    def rho_band_sups(self, i):
        return self._get(
            ("rho_sups", i), lambda: self.family.band_sup_norms(self.state(i).rho)
        )

    def rho_band_l2(self, i):
        return self._get(
            ("rho_bl2", i), lambda: self.family.band_lp_norms(self.state(i).rho, 2.0)
        )

    def grad_rho_band_sups(self, i):
        return self._get(
            ("grad_rho_sups", i),
            lambda: self.family.band_sup_norms(self.grad_rho(i)),
        )

    def u_band_sups(self, i):
        u = self.velocity(i)
        return self._get(
            ("u_sups", i), lambda: self.family.band_sup_norms((u.u1, u.u2))
        )

    def omega_band_sups(self, i):
        return self._get(
            ("omega_sups", i), lambda: self.family.band_sup_norms(self.state(i).omega)
        )

    def advection_field(self, i):
        return self._get(
            ("adv", i), lambda: advect(self.velocity(i), self.state(i).rho)
        )

    def advection_band_sups(self, i):
        return self._get(
            ("adv_sups", i),
            lambda: self.family.band_sup_norms(self.advection_field(i)),
        )

    def advection_band_l2(self, i):
        return self._get(
            ("adv_bl2", i),
            lambda: self.family.band_lp_norms(self.advection_field(i), 2.0),
        )

    # composite norms -------------------------------------------------------
    def omega_bgamma(self, i, variant="gamma"):
        return bgamma_from_sups(self.omega_band_sups(i), self.gamma, variant)

    def grad_rho_bgamma(self, i, variant="gamma"):
        return bgamma_from_sups(self.grad_rho_band_sups(i), self.gamma, variant)


def _record(check_id, ctx, times, lhs, rhs, extra=None):
    return EstimateRecord(
        check_id=check_id,
        times=list(map(float, times)),
        lhs=list(map(float, lhs)),
        rhs=list(map(float, rhs)),
        meta=dict(ctx.meta),
        extra=extra or {},
    )


# --- individual checks ----------------------------------------------------


def _vorticity_transport(ctx: CheckContext, p) -> tuple:
    times = ctx.traj.times
    grad_norms = [ctx.grad_rho_lp(i, p) for i in range(len(times))]
    integral = cumtrapz(grad_norms, times)
    lhs = [ctx.omega_lp(i, p) for i in range(len(times))]
    rhs = ctx.omega_lp(0, p) + integral
    return times, lhs, rhs


def check_vorticity_transport_p0(ctx):
    t, l, r = _vorticity_transport(ctx, ctx.p0)
    return _record("vorticity_transport_p0", ctx, t, l, r)


def check_vorticity_transport_p1(ctx):
    t, l, r = _vorticity_transport(ctx, ctx.p1)
    return _record("vorticity_transport_p1", ctx, t, l, r)


def check_density_energy(ctx):
    """L2 balance: |rho(t)|_2^2 + 2 kappa int |grad rho|_2^2 == |rho_0|_2^2.

    Uses the dense per-step series when the context carries one (the drift
    tolerance needs finer quadrature than the trajectory stride).
    """
    kappa = ctx.traj.config.kappa
    if ctx.energy_series is not None:
        times, l2sq, gradsq = ctx.energy_series
    else:
        times = ctx.traj.times
        l2sq = np.array([ctx.rho_lp(i, 2.0) ** 2 for i in range(len(times))])
        gradsq = np.array([ctx.grad_rho_lp(i, 2.0) ** 2 for i in range(len(times))])
    dissipated = cumtrapz(gradsq, times)
    lhs = np.asarray(l2sq) + 2.0 * kappa * dissipated
    rhs = np.full_like(lhs, float(l2sq[0]))
    return _record("density_energy", ctx, times, lhs, rhs)


def check_band_sup_l2(ctx):
    """Weakest band norm of rho controlled by |rho|_2 + |grad rho|_2."""
    times = ctx.traj.times
    lhs = [float(ctx.rho_band_sups(i).max()) for i in range(len(times))]
    rhs = [ctx.rho_lp(i, 2.0) + ctx.grad_rho_lp(i, 2.0) for i in range(len(times))]
    return _record("band_sup_l2", ctx, times, lhs, rhs)


def check_diffusion_smoothing(ctx):
    """Time-integrated first-order band norm of rho bounded through the
    diffusion: kappa int |rho|_{B^1_inf,1} <= (1 + kappa t)(|rho_0|_{B^-1_inf,1}
    + int |u . grad rho|_{B^-1_inf,1})."""
    kappa = ctx.traj.config.kappa
    times = ctx.traj.times
    n = len(times)
    b1 = [besov_from_band_norms(ctx.rho_band_sups(i), s=1.0) for i in range(n)]
    bm1_adv = [besov_from_band_norms(ctx.advection_band_sups(i), s=-1.0) for i in range(n)]
    lhs = kappa * cumtrapz(b1, times)
    rho0_bm1 = besov_from_band_norms(ctx.rho_band_sups(0), s=-1.0)
    rhs = (1.0 + kappa * np.asarray(times)) * (rho0_bm1 + cumtrapz(bm1_adv, times))
    return _record("diffusion_smoothing", ctx, times, lhs, rhs)


def check_heat_band_decay(ctx):
    """Band-wise diffusive decay with the advective forcing retained:

        |band_j rho(t)|_2 <= exp(-kappa 4^(j-1) t) |band_j rho_0|_2
                           + int_0^t exp(-kappa 4^(j-1)(t-s)) |band_j h(s)|_2 ds

    with h = u . grad rho and the slowest admissible band rate 4^(j-1). On a
    diffusion-only run the forcing vanishes and the ratio stays <= 1; the
    worst band is reported at each sample."""
    kappa = ctx.traj.config.kappa
    times = np.asarray(ctx.traj.times)
    n = len(times)
    base = ctx.rho_band_l2(0)
    cur = np.stack([ctx.rho_band_l2(i) for i in range(n)])  # (n, bands)
    forcing = np.stack([ctx.advection_band_l2(i) for i in range(n)])
    nb = cur.shape[1]
    rates = kappa * 4.0 ** (np.arange(-1, nb - 1, dtype=float) - 1.0)

    lhs, rhs = [], []
    for i, t in enumerate(times):
        decay = np.exp(-rates * t) * base
        duhamel = np.zeros(nb)
        if i > 0:
            weights = np.exp(-rates[None, :] * (t - times[: i + 1, None]))
            integrand = weights * forcing[: i + 1]
            duhamel = np.trapezoid(integrand, times[: i + 1], axis=0)
        bound = decay + duhamel
        active = bound > 1e-14
        if not active.any():
            lhs.append(float(cur[i].max()))
            rhs.append(0.0)
            continue
        ratios = np.where(active, cur[i] / np.where(active, bound, 1.0), -1.0)
        worst = int(np.argmax(ratios))
        lhs.append(float(cur[i, worst]))
        rhs.append(float(bound[worst]))
    return _record("heat_band_decay", ctx, times, lhs, rhs)


def gradient_budget_rhs(alpha, t, rho0_bm1_max, rho0_l2, omega0_mixed):
    """Growth envelope for the integrated gradient norms, unit constants."""
    inner = alpha**2 * (rho0_bm1_max**2 + alpha * t * rho0_l2**2 * omega0_mixed**2)
    return np.sqrt(inner) * np.exp(alpha**3 * rho0_l2**2 * t)


def check_gradient_budget(ctx):
    """Integrated max(|grad rho|_{p0}, |grad rho|_Gamma) against its envelope."""
    kappa = ctx.traj.config.kappa
    if kappa <= 0:
        raise ValueError("gradient budget check needs kappa > 0")
    times = ctx.traj.times
    n = len(times)
    mixed = [
        max(ctx.grad_rho_lp(i, ctx.p0), ctx.grad_rho_bgamma(i)) for i in range(n)
    ]
    theta = cumtrapz(mixed, times)

    bm1_inf = besov_from_band_norms(ctx.rho_band_sups(0), s=-1.0)
    bm1_p0 = besov_from_band_norms(
        ctx.family.band_lp_norms(ctx.state(0).rho, ctx.p0), s=-1.0
    )
    rho0_bm1_max = max(bm1_inf, bm1_p0)
    rho0_l2 = ctx.rho_lp(0, 2.0)
    omega0_mixed = max(ctx.omega_lp(0, ctx.p0), ctx.omega_bgamma(0))

    t_arr = np.asarray(times, float)
    alpha = (1.0 + kappa * t_arr) / kappa
    rhs = gradient_budget_rhs(alpha, t_arr, rho0_bm1_max, rho0_l2, omega0_mixed)
    return _record(
        "gradient_budget", ctx, times, theta, rhs,
        extra={"alpha_final": float(alpha[-1])},
    )


def _paraproduct_rhs(ctx, i):
    return float(ctx.rho_band_sups(i).max()) * (
        ctx.omega_lp(i, ctx.p0) + ctx.omega_bgamma(i, "gamma1")
    )


def check_bony_remainder(ctx):
    """Diagonal band interactions of u with grad rho in the B^-1 norm."""
    times = ctx.traj.times
    lhs, rhs = [], []
    for i in range(len(times)):
        u = ctx.velocity(i)
        gx, gy = ctx.grad_rho(i)
        rem = (
            bony_decompose(u.u1, gx, ctx.family).remainder
            + bony_decompose(u.u2, gy, ctx.family).remainder
        )
        lhs.append(besov_from_band_norms(ctx.family.band_sup_norms(rem), s=-1.0))
        rhs.append(_paraproduct_rhs(ctx, i))
    return _record("bony_remainder", ctx, times, lhs, rhs)


def check_bony_paraproducts(ctx):
    """Low-high interactions of grad rho against u in the B^-1 norm."""
    times = ctx.traj.times
    lhs, rhs = [], []
    for i in range(len(times)):
        u = ctx.velocity(i)
        gx, gy = ctx.grad_rho(i)
        total = None
        for comp_u, comp_g in ((u.u1, gx), (u.u2, gy)):
            t1 = bony_decompose(comp_g, comp_u, ctx.family).low_high
            t2 = bony_decompose(comp_u, comp_g, ctx.family).low_high
            part = t1 + t2
            total = part if total is None else total + part
        lhs.append(besov_from_band_norms(ctx.family.band_sup_norms(total), s=-1.0))
        rhs.append(_paraproduct_rhs(ctx, i))
    return _record("bony_paraproducts", ctx, times, lhs, rhs)


def check_apriori_norms(ctx):
    """Boundedness monitor: the norms controlled a priori, relative to t=0."""
    times = ctx.traj.times

    def bundle(i):
        return (
            ctx.omega_lp(i, ctx.p0)
            + ctx.omega_lp(i, ctx.p1)
            + ctx.omega_bgamma(i, "gamma1")
            + ctx.grad_rho_lp(i, ctx.p0)
            + ctx.grad_rho_lp(i, ctx.p1)
            + ctx.grad_rho_bgamma(i)
        )

    lhs = [bundle(i) for i in range(len(times))]
    rhs = [lhs[0]] * len(times)
    return _record("apriori_norms", ctx, times, lhs, rhs)


def check_band_tail(ctx):
    """Geometric tail of the band sums of rho, measured at N = j_max - 2
    against 2^(-N) gamma(N) |grad rho|_Gamma."""
    times = ctx.traj.times
    nmax = ctx.family.j_max - 2
    if nmax < -1:
        raise ValueError("grid too coarse for a tail check")
    lhs, rhs = [], []
    weight = 2.0 ** (-nmax) * float(ctx.gamma(np.asarray(float(nmax))))
    for i in range(len(times)):
        sups = ctx.rho_band_sups(i)
        lhs.append(float(sups[nmax + 2 :].sum()))  # bands j > N
        rhs.append(weight * ctx.grad_rho_bgamma(i))
    return _record(
        "band_tail", ctx, times, lhs, rhs, extra={"tail_band": nmax}
    )


def check_commutator_bound(ctx):
    """Worst band-advection commutator ratio at each sample; the ratio
    reports land in the same CSV as every other monitored inequality."""
    from bouslp.paraproduct import commutator_sweep

    times = ctx.traj.times
    lhs, rhs = [], []
    for i in range(len(times)):
        reports = commutator_sweep(ctx.velocity(i), ctx.state(i).rho, ctx.family)
        finite = [r for r in reports if math.isfinite(r.ratio)]
        worst = max(finite, key=lambda r: r.ratio)
        lhs.append(worst.lhs)
        rhs.append(worst.rhs)
    return _record("commutator_bound", ctx, times, lhs, rhs)


CHECKS = {
    "vorticity_transport_p0": check_vorticity_transport_p0,
    "vorticity_transport_p1": check_vorticity_transport_p1,
    "density_energy": check_density_energy,
    "band_sup_l2": check_band_sup_l2,
    "diffusion_smoothing": check_diffusion_smoothing,
    "heat_band_decay": check_heat_band_decay,
    "gradient_budget": check_gradient_budget,
    "bony_remainder": check_bony_remainder,
    "bony_paraproducts": check_bony_paraproducts,
    "apriori_norms": check_apriori_norms,
    "band_tail": check_band_tail,
    "commutator_bound": check_commutator_bound,
}


def run_inequality_check(check_id: str, traj: Trajectory, family: LPFamily,
                         gamma: GammaSpec, p0: float = 1.5, p1: float = 4.0,
                         meta: dict | None = None,
                         energy_series=None) -> EstimateRecord:
    if check_id not in CHECKS:
        raise KeyError(f"unknown check id {check_id!r}; known: {sorted(CHECKS)}")
    ctx = CheckContext(
        traj=traj, family=family, gamma=gamma, p0=p0, p1=p1,
        meta=meta or {}, energy_series=energy_series,
    )
    return CHECKS[check_id](ctx)


def run_checks(check_ids, traj, family, gamma, p0=1.5, p1=4.0, meta=None,
               energy_series=None):
    """Evaluate several checks over one trajectory with shared memoization."""
    ctx = CheckContext(
        traj=traj, family=family, gamma=gamma, p0=p0, p1=p1,
        meta=meta or {}, energy_series=energy_series,
    )
    out = []
    for cid in check_ids:
        if cid not in CHECKS:
            raise KeyError(f"unknown check id {cid!r}; known: {sorted(CHECKS)}")
        out.append(CHECKS[cid](ctx))
    return out


class EnergySeriesObserver:
    """Per-step collector of (t, |rho|_2^2, |grad rho|_2^2) via the spectral
    sums; attach to simulate() for quadrature finer than the storage stride."""

    def __init__(self, omega0: SpectralField, rho0: SpectralField):
        self.times = [0.0]
        self.l2sq = [self._l2sq(rho0)]
        self.gradsq = [self._gradsq(rho0)]

    @staticmethod
    def _l2sq(f):
        return float(TWO_PI**2 * np.sum(np.abs(f.coeffs) ** 2))

    @staticmethod
    def _gradsq(f):
        kmag2 = f.grid.arrays.kmag2
        return float(TWO_PI**2 * np.sum(kmag2 * np.abs(f.coeffs) ** 2))

    def __call__(self, step, state):
        self.times.append(state.t)
        self.l2sq.append(self._l2sq(state.rho))
        self.gradsq.append(self._gradsq(state.rho))

    def series(self):
        return (
            np.asarray(self.times),
            np.asarray(self.l2sq),
            np.asarray(self.gradsq),
        )


def fitted_mode_decay_exponent(traj: Trajectory, k1: int, k2: int) -> float:
    """-d/dt log |rho_hat(k)| from the first and last samples."""
    n = traj.states[0].grid.n
    a0 = abs(traj.states[0].rho.coeffs[k1 % n, k2 % n])
    a1 = abs(traj.states[-1].rho.coeffs[k1 % n, k2 % n])
    t0, t1 = traj.states[0].t, traj.states[-1].t
    if a0 == 0 or a1 == 0:
        raise ValueError("mode has no amplitude to fit")
    return -math.log(a1 / a0) / (t1 - t0)


def fitted_band_decay_rate(traj: Trajectory, family: LPFamily, j: int) -> float:
    """-d/dt log |band_j rho(t)|_2 by least squares over the samples."""
    times = traj.times
    vals = []
    for s in traj.states:
        vals.append(family.band_lp_norms(s.rho, 2.0)[j + 1])
    vals = np.asarray(vals)
    if np.any(vals <= 0):
        raise ValueError("band has no amplitude to fit")
    slope = np.polyfit(times, np.log(vals), 1)[0]
    return -float(slope)
