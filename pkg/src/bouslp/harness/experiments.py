"""Twin-run uniqueness, truncation-approximation and flow-composition
experiments over the solver."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from bouslp.flowmap import inverse_flow_map
from bouslp.gamma import GammaSpec
from bouslp.harness.checks import bgamma_from_sups, cumtrapz
from bouslp.harness.osgood import OsgoodProblem, fit_envelope_constant, osgood_integrate
from bouslp.harness.records import EstimateRecord
from bouslp.lp import LPFamily, truncate_low_pass
from bouslp.solver import SolverConfig, Trajectory, simulate
from bouslp.spectral import SpectralField, biot_savart, gradient

SPECTRAL_FLOOR = 1e-14


@dataclass(frozen=True)
class PerturbationSpec:
    target: str  # "omega" | "rho"
    band: int
    delta: float
    seed: int = 1

    def __post_init__(self):
        if self.target not in ("omega", "rho"):
            raise ValueError("perturbation target must be 'omega' or 'rho'")
        if self.delta != 0.0 and abs(self.delta) < SPECTRAL_FLOOR:
            raise ValueError(
                f"perturbation {self.delta} below the spectral floor {SPECTRAL_FLOOR}"
            )


def band_bump(family: LPFamily, band: int, seed: int) -> SpectralField:
    """A unit-sup random field supported on one dyadic band."""
    rng = np.random.default_rng(seed)
    grid = family.grid
    noise = rng.standard_normal((grid.n, grid.n))
    raw = SpectralField(grid, np.fft.fft2(noise) / grid.n**2)
    bump = family.delta(raw, band)
    coeffs = bump.coeffs.copy()
    coeffs[0, 0] = 0.0  # keep vorticity perturbations mean-free
    bump = SpectralField(grid, coeffs)
    peak = float(np.abs(bump.to_physical()).max())
    if peak == 0.0:
        raise ValueError(f"band {band} carries no lattice modes")
    return bump * (1.0 / peak)


def apply_perturbation(omega0, rho0, spec: PerturbationSpec, family: LPFamily):
    if spec.delta == 0.0:
        return omega0, rho0
    bump = band_bump(family, spec.band, spec.seed) * spec.delta
    if spec.target == "omega":
        return omega0 + bump, rho0
    return omega0, rho0 + bump


def _json_dump(path, payload):
    import json
    from pathlib import Path

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


@dataclass
class TwinRunResult:
    times: np.ndarray
    band_sum: np.ndarray  # sum_j |band_j v| + |band_j drho| per sample
    fvals: np.ndarray  # cumulative time integral of band_sum
    initial_gap: float  # band_sum at t = 0 (the slope of F at 0)
    fitted_constant: float | None
    eta_times: np.ndarray | None
    eta: np.ndarray | None
    tail_bound: np.ndarray  # reported separately from the truncated band sum
    perturbation: PerturbationSpec | None
    meta: dict = field(default_factory=dict)

    def dominated(self) -> bool:
        if self.eta is None:
            return bool(np.all(self.fvals == 0.0))
        env = np.interp(self.times, self.eta_times, self.eta)
        return bool(np.all(self.fvals <= env * (1.0 + 1e-9)))

    def to_dict(self):
        out = {
            "times": [float(v) for v in self.times],
            "band_sum": [float(v) for v in self.band_sum],
            "F": [float(v) for v in self.fvals],
            "initial_gap": float(self.initial_gap),
            "fitted_constant": self.fitted_constant,
            "tail_bound": [float(v) for v in self.tail_bound],
            "meta": self.meta,
        }
        if self.eta is not None:
            out["eta_times"] = [float(v) for v in self.eta_times]
            out["eta"] = [float(v) for v in self.eta]
        if self.perturbation is not None:
            out["perturbation"] = {
                "target": self.perturbation.target,
                "band": self.perturbation.band,
                "delta": self.perturbation.delta,
                "seed": self.perturbation.seed,
            }
        return out

    def save(self, path, config_hash: str = ""):
        """Write the twin-run artifact consumed by the report renderer."""
        payload = self.to_dict()
        payload["kind"] = "twin_run"
        payload["config_hash"] = config_hash
        _json_dump(path, payload)


def difference_band_series(traj1: Trajectory, traj2: Trajectory, family: LPFamily,
                           gamma: GammaSpec):
    """Per-sample band-sum of the run difference plus its geometric tail bound."""
    times = traj1.times
    if len(traj2.times) != len(times) or np.abs(traj2.times - times).max() > 1e-12:
        raise ValueError("twin trajectories must share sample times")
    sums = np.empty(len(times))
    tails = np.empty(len(times))
    nmax = family.j_max
    for i in range(len(times)):
        dw = traj1.states[i].omega - traj2.states[i].omega
        dr = traj1.states[i].rho - traj2.states[i].rho
        dv = biot_savart(dw, strict=False)
        v_sups = family.band_sup_norms((dv.u1, dv.u2))
        r_sups = family.band_sup_norms(dr)
        sums[i] = float(v_sups.sum() + r_sups.sum())
        grad_gap = gradient(dr)
        tail_norm = bgamma_from_sups(family.band_sup_norms(grad_gap), gamma)
        tails[i] = 2.0 ** (-nmax) * float(gamma(np.asarray(float(nmax)))) * tail_norm
    return times, sums, tails


def uniqueness_experiment(
    omega0: SpectralField,
    rho0: SpectralField,
    perturbation: PerturbationSpec,
    config: SolverConfig,
    family: LPFamily,
    gamma: GammaSpec,
    stride: int = 5,
) -> TwinRunResult:
    """Run the base and a band-perturbed twin; measure the difference growth
    F(t) and fit the smallest Osgood envelope dominating it."""
    if stride > 10:
        raise ValueError("difference quadrature needs stride <= 10")
    omega_p, rho_p = apply_perturbation(omega0, rho0, perturbation, family)
    base = simulate(omega0, rho0, config, stride=stride)
    twin = simulate(omega_p, rho_p, config, stride=stride)
    times, sums, tails = difference_band_series(base, twin, family, gamma)
    fvals = cumtrapz(sums, times)
    initial_gap = float(sums[0])

    fitted = None
    eta_t = eta_v = None
    if perturbation.delta != 0.0 and initial_gap > 0:
        fitted = fit_envelope_constant(times, fvals, initial_gap, gamma)
        prob = OsgoodProblem(gamma, fitted, initial_gap, float(times[-1]),
                             validate=False)
        eta_t, eta_v = osgood_integrate(prob, dt=float(times[-1]) / 400.0)
    return TwinRunResult(
        times=times, band_sum=sums, fvals=fvals, initial_gap=initial_gap,
        fitted_constant=fitted, eta_times=eta_t, eta=eta_v, tail_bound=tails,
        perturbation=perturbation,
        meta={"kappa": config.kappa, "grid_n": omega0.grid.n},
    )


@dataclass
class ApproximationResult:
    m_values: list[int]
    cutoffs: list[int]  # the lower index l of each consecutive pair
    iota: np.ndarray  # initial density band-sum gaps, per pair
    kappa_gap: np.ndarray  # initial velocity band-sum gaps, per pair
    sup_gap: np.ndarray  # sup_t band-sum difference over the run, per pair
    slope: float  # least-squares slope of log2 iota vs l
    bound_slope: float  # -1 + slope of log2 gamma(l)
    meta: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "m_values": self.m_values,
            "cutoffs": self.cutoffs,
            "iota": [float(v) for v in self.iota],
            "kappa_gap": [float(v) for v in self.kappa_gap],
            "sup_gap": [float(v) for v in self.sup_gap],
            "slope": float(self.slope),
            "bound_slope": float(self.bound_slope),
            "meta": self.meta,
        }

    def save(self, path, config_hash: str = ""):
        """Write the decay-table artifact consumed by the report renderer."""
        payload = self.to_dict()
        payload["kind"] = "approximation"
        payload["config_hash"] = config_hash
        _json_dump(path, payload)


def initial_band_gap(f1: SpectralField, f2: SpectralField, family: LPFamily) -> float:
    return float(family.band_sup_norms(f1 - f2).sum())


def approximation_experiment(
    omega_full: SpectralField,
    rho_full: SpectralField,
    m_values,
    config: SolverConfig,
    family: LPFamily,
    gamma: GammaSpec,
    stride: int = 10,
) -> ApproximationResult:
    """Evolve low-pass truncations of one dataset and measure how the gaps
    between consecutive truncation levels decay with the cutoff."""
    m_values = sorted(int(m) for m in m_values)
    if len(m_values) < 3:
        raise ValueError("need at least 3 truncation levels to fit a slope")
    if m_values[-1] > family.j_max:
        raise ValueError(f"max truncation level exceeds j_max={family.j_max}")

    runs = {}
    for m in m_values:
        w0 = truncate_low_pass(omega_full, m, family)
        r0 = truncate_low_pass(rho_full, m, family)
        runs[m] = simulate(w0, r0, config, stride=stride)

    cutoffs, iotas, kgaps, sgaps = [], [], [], []
    for l, m in zip(m_values, m_values[1:]):
        tl, tm = runs[l], runs[m]
        iota = initial_band_gap(tm.states[0].rho, tl.states[0].rho, family)
        v_l = biot_savart(tl.states[0].omega)
        v_m = biot_savart(tm.states[0].omega)
        kap = float(
            family.band_sup_norms((v_m.u1 - v_l.u1, v_m.u2 - v_l.u2)).sum()
        )
        _, sums, _ = difference_band_series(tm, tl, family, gamma)
        cutoffs.append(l)
        iotas.append(iota)
        kgaps.append(kap)
        sgaps.append(float(sums.max()))

    ls = np.asarray(cutoffs, float)
    iota_arr = np.asarray(iotas)
    if np.all(iota_arr > 0):
        slope = float(np.polyfit(ls, np.log2(iota_arr), 1)[0])
    else:
        slope = -math.inf  # truncation was already exact
    gamma_slope = float(np.polyfit(ls, np.log2(gamma(ls)), 1)[0])
    return ApproximationResult(
        m_values=m_values, cutoffs=cutoffs, iota=np.asarray(iotas),
        kappa_gap=np.asarray(kgaps), sup_gap=np.asarray(sgaps),
        slope=slope, bound_slope=-1.0 + gamma_slope,
        meta={"kappa": config.kappa, "grid_n": omega_full.grid.n,
              "gamma_name": gamma.name},
    )


def flow_composition_check(
    traj: Trajectory,
    f: SpectralField,
    family: LPFamily,
    gamma: GammaSpec,
    sample_pairs,
    meta: dict | None = None,
) -> EstimateRecord:
    """Transport a reference field along the inverse flow and compare the
    grown-index norm of the composition against the base norm of f."""
    base = bgamma_from_sups(family.band_sup_norms(f), gamma, "gamma")
    times, lhs, rhs = [], [], []
    for tau, t in sample_pairs:
        fm = inverse_flow_map(traj, tau, t)
        composed = fm.pullback(f)
        lhs.append(bgamma_from_sups(family.band_sup_norms(composed), gamma, "gamma1"))
        rhs.append(base)
        times.append(t)
    order = np.argsort(times)
    return EstimateRecord(
        check_id="flow_composition",
        times=[float(times[i]) for i in order],
        lhs=[float(lhs[i]) for i in order],
        rhs=[float(rhs[i]) for i in order],
        meta=meta or {},
    )
