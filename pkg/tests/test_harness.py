import math

import numpy as np
import pytest

from bouslp.gamma import get_gamma
from bouslp.harness.checks import (
    CHECKS,
    EnergySeriesObserver,
    cumtrapz,
    fitted_band_decay_rate,
    fitted_mode_decay_exponent,
    gradient_budget_rhs,
    run_checks,
    run_inequality_check,
)
from bouslp.harness.experiments import (
    PerturbationSpec,
    approximation_experiment,
    band_bump,
    flow_composition_check,
    uniqueness_experiment,
)
from bouslp.harness.records import (
    EstimateRecord,
    read_records_csv,
    summary_dict,
    write_records_csv,
)
from bouslp.initdata import single_mode, taylor_green, zero
from bouslp.lp import build_lp_family, random_prescribed_spectrum
from bouslp.solver import SolverConfig, simulate
from bouslp.spectral import Grid

from helpers import random_band_limited, single_mode_field


@pytest.fixture(scope="module")
def setup64():
    grid = Grid(64)
    return grid, build_lp_family(grid), get_gamma("log")


@pytest.fixture(scope="module")
def reference_traj(setup64):
    grid, fam, gamma = setup64
    w0 = taylor_green(grid, amplitude=0.5) + random_band_limited(
        grid, kmax=4, seed=11, amplitude=0.2
    )
    rho0 = random_band_limited(grid, kmax=4, seed=12, amplitude=0.3)
    cfg = SolverConfig(kappa=0.1, dt=2e-3, t_end=0.4)
    return simulate(w0, rho0, cfg, stride=10)


def test_record_validation():
    with pytest.raises(ValueError):
        EstimateRecord("x", [0.0, 0.0], [1.0, 1.0], [1.0, 1.0])
    with pytest.raises(ValueError):
        EstimateRecord("x", [0.0, 1.0], [-1.0, 1.0], [1.0, 1.0])
    rec = EstimateRecord("x", [0.0, 1.0], [0.5, 1.0], [1.0, 2.0])
    assert rec.empirical_constant == 0.5
    assert rec.ratios == [0.5, 0.5]


def test_record_zero_rhs_ratio():
    rec = EstimateRecord("x", [0.0, 1.0], [0.0, 1.0], [0.0, 0.0])
    assert rec.ratios[0] == 0.0
    assert rec.ratios[1] == math.inf


def test_csv_roundtrip(tmp_path):
    rec = EstimateRecord(
        "vorticity_transport_p0", [0.0, 0.1], [1.0, 1.1], [1.2, 1.3],
        meta={"grid_n": 64, "kappa": 0.1, "gamma_name": "log",
              "p0": 1.5, "p1": 4.0, "seed": 7},
    )
    path = tmp_path / "records.csv"
    write_records_csv(path, [rec], config_hash="abc123")
    groups = read_records_csv(path)
    rows = groups["vorticity_transport_p0"]
    assert len(rows) == 2
    assert rows[0]["lhs"] == 1.0
    assert rows[1]["ratio"] == pytest.approx(1.1 / 1.3)
    assert open(path).readline().strip() == "# config_hash=abc123"


def test_summary_dict_pass_fail():
    rec = EstimateRecord("x", [0.0, 1.0], [1.0, 2.0], [1.0, 1.0])
    summary = summary_dict([rec], calibration={"x": 1.0})
    assert not summary["all_passed"]  # ratio reaches 2 > 1 * 1.01
    summary = summary_dict([rec], calibration={"x": 2.0})
    assert summary["all_passed"]


def test_unknown_check_rejected(setup64, reference_traj):
    _, fam, gamma = setup64
    with pytest.raises(KeyError):
        run_inequality_check("no_such_check", reference_traj, fam, gamma)


def test_energy_check_heat_equality(setup64):
    # pure heat run: both sides agree to near machine precision
    grid, fam, gamma = setup64
    # trapezoid quadrature error scales with (dt kappa)^2; this dt makes the
    # equality case resolvable at 1e-10
    cfg = SolverConfig(kappa=0.1, dt=2.5e-4, t_end=0.25, buoyancy=False)
    obs = EnergySeriesObserver(zero(grid), single_mode(grid, 1, 0))
    traj = simulate(zero(grid), single_mode(grid, 1, 0), cfg, stride=10,
                    observers=[obs])
    rec = run_inequality_check(
        "density_energy", traj, fam, gamma, energy_series=obs.series()
    )
    drift = max(abs(l - r) / r for l, r in zip(rec.lhs, rec.rhs))
    assert drift <= 1e-10


def test_vorticity_transport_on_reference(setup64, reference_traj):
    _, fam, gamma = setup64
    for cid in ("vorticity_transport_p0", "vorticity_transport_p1"):
        rec = run_inequality_check(cid, reference_traj, fam, gamma)
        assert rec.empirical_constant <= 1.0 + 1e-3
        assert rec.lhs[0] > 0


def test_heat_band_decay_rates(setup64):
    grid, fam, gamma = setup64
    kappa = 0.15
    cfg = SolverConfig(kappa=kappa, dt=1e-3, t_end=0.2, buoyancy=False)
    # single mode |k| = 5 sits in bands 2 and 3; per-mode decay is exact
    traj = simulate(zero(grid), single_mode_field(grid, 5, 0), cfg, stride=10)
    exponent = fitted_mode_decay_exponent(traj, 5, 0)
    assert abs(exponent - kappa * 25.0) <= 1e-8 * (kappa * 25.0)

    # a whole-band field decays within the dyadic bracket
    j = 3
    band_field = band_bump(fam, j, seed=5)
    traj = simulate(zero(grid), band_field, cfg, stride=10)
    rate = fitted_band_decay_rate(traj, fam, j)
    assert kappa * 2.0 ** (2 * (j - 1)) <= rate <= kappa * 2.0 ** (2 * (j + 1))

    rec = run_inequality_check("heat_band_decay", traj, fam, gamma)
    assert rec.empirical_constant <= 1.0 + 1e-9


def test_gradient_budget_monotone_formula():
    # the envelope grows in t and in 1/kappa, directly from the formula
    t = np.linspace(0.0, 1.0, 50)
    for kappa in (0.05, 0.1, 0.2):
        alpha = (1.0 + kappa * t) / kappa
        vals = gradient_budget_rhs(alpha, t, 0.1, 0.05, 0.4)
        assert np.all(np.diff(vals) > 0)
    at_fixed_t = []
    for kappa in (0.2, 0.1, 0.05):
        alpha = (1.0 + kappa * 0.5) / kappa
        at_fixed_t.append(gradient_budget_rhs(alpha, 0.5, 0.1, 0.05, 0.4))
    assert at_fixed_t[0] < at_fixed_t[1] < at_fixed_t[2]


def test_gradient_budget_on_reference(setup64, reference_traj):
    _, fam, gamma = setup64
    rec = run_inequality_check("gradient_budget", reference_traj, fam, gamma)
    assert np.all(np.diff(rec.lhs) >= -1e-12)  # Theta nondecreasing
    assert rec.empirical_constant < math.inf


def test_run_checks_shares_context(setup64, reference_traj):
    _, fam, gamma = setup64
    ids = ["band_sup_l2", "diffusion_smoothing", "apriori_norms", "band_tail",
           "bony_remainder", "bony_paraproducts"]
    records = run_checks(ids, reference_traj, fam, gamma,
                         meta={"grid_n": 64, "kappa": 0.1})
    assert [r.check_id for r in records] == ids
    for rec in records:
        assert rec.empirical_constant < math.inf
        assert all(v >= 0 for v in rec.lhs)


def test_all_registered_checks_run(setup64, reference_traj):
    _, fam, gamma = setup64
    records = run_checks(sorted(CHECKS), reference_traj, fam, gamma)
    assert len(records) == len(CHECKS)


def test_cumtrapz_matches_numpy():
    t = np.array([0.0, 0.5, 1.0, 2.0])
    v = np.array([1.0, 2.0, 0.0, 4.0])
    out = cumtrapz(v, t)
    assert out[0] == 0.0
    assert out[-1] == pytest.approx(np.trapezoid(v, t))


# --- experiments ------------------------------------------------------------


def test_perturbation_validation(setup64):
    _, fam, _ = setup64
    with pytest.raises(ValueError):
        PerturbationSpec("omega", 2, 1e-15)
    with pytest.raises(ValueError):
        PerturbationSpec("pressure", 2, 1e-6)
    bump = band_bump(fam, 2, seed=3)
    sups = fam.band_sup_norms(bump)
    # mass confined to bands 1..3 (adjacent bands overlap the support)
    assert sups[3] > 0.5
    assert sups[0] == 0.0 and sups[1] == 0.0
    assert np.all(sups[5:] == 0.0)


def test_uniqueness_zero_perturbation(setup64):
    grid, fam, gamma = setup64
    w0 = taylor_green(grid, amplitude=0.4)
    rho0 = random_band_limited(grid, kmax=4, seed=21, amplitude=0.2)
    cfg = SolverConfig(kappa=0.1, dt=2e-3, t_end=0.1)
    result = uniqueness_experiment(
        w0, rho0, PerturbationSpec("omega", 2, 0.0), cfg, fam, gamma, stride=10
    )
    assert np.all(result.fvals == 0.0)
    assert result.initial_gap == 0.0
    assert result.dominated()


def test_uniqueness_envelope_dominates(setup64):
    grid, fam, gamma = setup64
    w0 = taylor_green(grid, amplitude=0.4)
    rho0 = random_band_limited(grid, kmax=4, seed=22, amplitude=0.2)
    cfg = SolverConfig(kappa=0.1, dt=2e-3, t_end=0.25)
    result = uniqueness_experiment(
        w0, rho0, PerturbationSpec("omega", 2, 1e-6), cfg, fam, gamma, stride=5
    )
    assert result.initial_gap > 0
    assert result.fitted_constant is not None
    assert result.dominated()
    assert np.all(result.tail_bound >= 0)


def test_uniqueness_smaller_delta_smaller_f(setup64):
    grid, fam, gamma = setup64
    w0 = taylor_green(grid, amplitude=0.4)
    rho0 = random_band_limited(grid, kmax=4, seed=23, amplitude=0.2)
    cfg = SolverConfig(kappa=0.1, dt=2e-3, t_end=0.15)
    results = [
        uniqueness_experiment(
            w0, rho0, PerturbationSpec("rho", 2, delta), cfg, fam, gamma, stride=10
        )
        for delta in (1e-5, 5e-6)
    ]
    f_big, f_small = results[0].fvals, results[1].fvals
    assert np.all(f_small[1:] < f_big[1:])


def test_approximation_band_limited_exact(setup64):
    grid, fam, gamma = setup64
    # data fully below every cutoff: truncation gaps vanish identically
    w0 = single_mode_field(grid, 2, 0, amplitude=0.5)
    rho0 = single_mode_field(grid, 0, 2, amplitude=0.5)
    cfg = SolverConfig(kappa=0.1, dt=2e-3, t_end=0.05)
    result = approximation_experiment(
        w0, rho0, [2, 3, 4], cfg, fam, gamma, stride=10
    )
    assert np.all(result.iota <= 1e-13)
    assert np.all(result.kappa_gap <= 1e-13)


def test_approximation_needs_three_levels(setup64):
    grid, fam, gamma = setup64
    w0 = single_mode_field(grid, 2, 0)
    cfg = SolverConfig(t_end=0.01)
    with pytest.raises(ValueError):
        approximation_experiment(w0, w0, [2, 3], cfg, fam, gamma)


def test_approximation_decay_table():
    grid = Grid(128)
    fam = build_lp_family(grid)
    gamma = get_gamma("log")
    w0 = random_prescribed_spectrum(grid, seed=31, decay=3.0, amplitude=0.5)
    rho0 = random_prescribed_spectrum(grid, seed=32, decay=3.0, amplitude=0.3)
    cfg = SolverConfig(kappa=0.1, dt=4e-3, t_end=0.08)
    result = approximation_experiment(
        w0, rho0, [3, 4, 5], cfg, fam, gamma, stride=10
    )
    assert np.all(np.diff(result.iota) < 0)  # gaps shrink with the cutoff
    assert np.all(np.diff(result.sup_gap) < 0)
    assert result.slope <= result.bound_slope + 0.3


def test_flow_composition_identity_and_growth(setup64, reference_traj):
    _, fam, gamma = setup64
    f = random_band_limited(reference_traj.states[0].grid, kmax=8, seed=41)
    pairs = [(0.0, 0.0), (0.0, 0.2), (0.0, 0.4)]
    rec = flow_composition_check(reference_traj, f, fam, gamma, pairs)
    # t = tau: the grown-index norm never exceeds the base norm
    assert rec.ratios[0] <= 1.0 + 1e-12
    assert max(rec.ratios) <= 5.0 * rec.ratios[0] + 1e-12


def test_flow_composition_translation_invariance(setup64):
    from test_flowmap import constant_velocity_trajectory

    grid, fam, gamma = setup64
    traj = constant_velocity_trajectory(grid, 0.8, -0.2, t_end=1.0, n_samples=9)
    f = random_band_limited(grid, kmax=3, seed=42)
    pairs = [(0.0, t) for t in (0.25, 0.5, 0.75, 1.0)]
    rec = flow_composition_check(traj, f, fam, gamma, pairs)
    ratios = rec.ratios
    # all band norms are translation invariant: ratio constant up to
    # bicubic interpolation error
    assert max(ratios) - min(ratios) <= 1e-2 * ratios[0]
