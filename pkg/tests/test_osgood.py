import math

import numpy as np
import pytest

from bouslp.gamma import GammaSpec, get_gamma
from bouslp.harness.osgood import (
    OsgoodProblem,
    fit_envelope_constant,
    osgood_integrate,
)


def constant_modulus(a):
    return np.ones_like(np.asarray(a, dtype=float))


def test_constant_modulus_closed_form():
    # eta' = 2 eta  ->  eta = delta exp(2t)
    prob = OsgoodProblem(constant_modulus, growth_constant=2.0, delta=1e-4,
                         t_end=1.0, validate=False)
    times, eta = osgood_integrate(prob, dt=1e-3)
    expected = 1e-4 * np.exp(2.0 * times)
    assert np.max(np.abs(eta - expected) / expected) <= 1e-8


def test_zero_delta_stays_zero():
    prob = OsgoodProblem(constant_modulus, 2.0, 0.0, 1.0, validate=False)
    _, eta = osgood_integrate(prob, dt=1e-2)
    assert np.all(eta == 0.0)


def test_step_halving_agreement():
    modulus = lambda a: np.maximum(1.0, np.asarray(a, dtype=float))
    prob = OsgoodProblem(modulus, 1.0, 1e-6, 1.0, validate=False)
    _, eta_coarse = osgood_integrate(prob, dt=1e-2)
    _, eta_fine = osgood_integrate(prob, dt=1e-3)
    final_c, final_f = eta_coarse[-1], eta_fine[-1]
    assert abs(final_c - final_f) / final_f <= 1e-6


def test_monotone_in_time():
    prob = OsgoodProblem(get_gamma("log"), 1.0, 1e-6, 1.0)
    _, eta = osgood_integrate(prob, dt=1e-2)
    assert np.all(np.diff(eta) >= 0.0)


def test_monotone_in_delta():
    finals = []
    for delta in (1e-4, 1e-6, 1e-8):
        prob = OsgoodProblem(get_gamma("log"), 1.0, delta, 1.0)
        _, eta = osgood_integrate(prob, dt=1e-2)
        finals.append(eta[-1])
    assert finals[0] > finals[1] > finals[2] > 0.0


def test_validated_problem_rejects_large_delta():
    # m1 = 0 for the log modulus, so delta must stay below 1/2
    with pytest.raises(ValueError):
        OsgoodProblem(get_gamma("log"), 1.0, 0.9, 1.0)


def test_validated_problem_requires_admissible_modulus():
    bad = GammaSpec("const", lambda a: np.ones_like(np.asarray(a, float)),
                    gamma_integral_diverges=True)
    with pytest.raises(ValueError):
        OsgoodProblem(bad, 1.0, 1e-4, 1.0)  # fails unboundedness in (i)


def test_domain_warning_above_half():
    prob = OsgoodProblem(constant_modulus, 5.0, 0.4, 1.0, validate=False)
    with pytest.warns(RuntimeWarning):
        osgood_integrate(prob, dt=1e-2)


def test_envelope_fit_dominates():
    # synthetic F comparable to a known eta: fit must dominate and be tight
    modulus = get_gamma("log")
    delta = 1e-5
    prob = OsgoodProblem(modulus, 0.7, delta, 0.5, validate=False)
    times, eta = osgood_integrate(prob, dt=1e-3)
    fitted = fit_envelope_constant(times, eta * 0.95, delta, modulus)
    assert fitted <= 0.75
    prob2 = OsgoodProblem(modulus, fitted, delta, 0.5, validate=False)
    _, env = osgood_integrate(prob2, dt=1e-3)
    assert np.all(env >= eta * 0.95 * (1 - 1e-9))


def test_rate_uses_log2_argument():
    prob = OsgoodProblem(get_gamma("lin"), 1.0, 2.0 ** (-10), 1.0, validate=False)
    # at eta = 2^-10 the modulus argument is 10, gamma_lin(10) = 12
    assert prob.rate(2.0 ** (-10)) == pytest.approx(12.0 * 2.0 ** (-10))


def test_invalid_inputs():
    with pytest.raises(ValueError):
        OsgoodProblem(constant_modulus, -1.0, 1e-4, 1.0, validate=False)
    with pytest.raises(ValueError):
        OsgoodProblem(constant_modulus, 1.0, -1e-4, 1.0, validate=False)
    prob = OsgoodProblem(constant_modulus, 1.0, 1e-4, 1.0, validate=False)
    with pytest.raises(ValueError):
        osgood_integrate(prob, dt=0.0)
    assert math.isfinite(prob.rate(1e-4))
