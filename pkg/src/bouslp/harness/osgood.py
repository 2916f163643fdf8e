"""The comparison ODE behind the uniqueness argument.

    eta'(t) = C * modulus(-log2 eta) * eta,   eta(0) = delta >= 0

with a modulus Pi: R -> [1, inf). When the inverse integral of the modulus
diverges, eta(., delta) collapses to zero as delta -> 0 (only the zero
solution emanates from zero data); the integrator below provides the
envelopes that twin-run differences are tested against.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from bouslp.gamma import GammaSpec, modulus_admissible


@dataclass
class OsgoodProblem:
    modulus: Callable  # GammaSpec or plain callable on floats
    growth_constant: float
    delta: float
    t_end: float
    validate: bool = True

    def __post_init__(self):
        if self.growth_constant <= 0:
            raise ValueError("growth constant must be > 0")
        if self.delta < 0:
            raise ValueError("delta must be >= 0")
        if self.validate:
            if not isinstance(self.modulus, GammaSpec):
                raise ValueError("validated problems need a GammaSpec modulus")
            ok, m1, detail = modulus_admissible(self.modulus)
            if not ok:
                raise ValueError(f"modulus fails admissibility: {detail}")
            self.m1 = m1
            ceiling = 2.0 ** (-(m1 + 1))
            if self.delta >= ceiling and self.delta > 0:
                raise ValueError(
                    f"delta={self.delta} outside validated range (0, {ceiling})"
                )
        else:
            self.m1 = None

    def rate(self, eta: float) -> float:
        arg = -math.log2(eta) if eta > 0 else math.inf
        mod = float(self.modulus(np.asarray(arg))) if eta > 0 else 1.0
        return self.growth_constant * mod * eta


def _rk4_step(rate, y, h):
    k1 = rate(y)
    k2 = rate(y + 0.5 * h * k1)
    k3 = rate(y + 0.5 * h * k2)
    k4 = rate(y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _advance(rate, y, h, rel_tol, depth=0):
    """One accepted interval of length h: halve until a full step and two
    half steps agree."""
    y_full = _rk4_step(rate, y, h)
    y_mid = _rk4_step(rate, y, 0.5 * h)
    y_half = _rk4_step(rate, y_mid, 0.5 * h)
    if abs(y_full - y_half) <= rel_tol * max(abs(y_half), 1e-300) or depth >= 24:
        return y_half
    left = _advance(rate, y, 0.5 * h, rel_tol, depth + 1)
    return _advance(rate, left, 0.5 * h, rel_tol, depth + 1)


def osgood_integrate(problem: OsgoodProblem, dt: float = 1e-3,
                     rel_tol: float = 1e-10):
    """Integrate the comparison ODE; returns (times, eta) arrays.

    RK4 with adaptive step halving, which refines automatically where the
    modulus is steep (small eta). Output is monotone nondecreasing; eta
    crossing 1/2 leaves the monotone range of -log2 and emits a warning.
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    n = int(round(problem.t_end / dt))
    times = np.linspace(0.0, n * dt, n + 1)
    eta = np.empty(n + 1)
    eta[0] = problem.delta
    if problem.delta == 0.0:
        eta[:] = 0.0
        return times, eta

    warned = False
    y = problem.delta
    for i in range(n):
        y = _advance(problem.rate, y, dt, rel_tol)
        if y > 0.5 and not warned:
            warnings.warn(
                "eta exceeded 1/2; the modulus argument -log2(eta) left its "
                "monotone range", RuntimeWarning, stacklevel=2,
            )
            warned = True
        eta[i + 1] = y
    return times, np.maximum.accumulate(eta)


def eta_at(problem: OsgoodProblem, t: float, dt: float = 1e-3) -> float:
    times, eta = osgood_integrate(
        OsgoodProblem(problem.modulus, problem.growth_constant, problem.delta,
                      t, validate=False), dt
    )
    return float(eta[-1])


def fit_envelope_constant(times, values, delta: float, modulus,
                          c_max: float = 1024.0, rel: float = 1e-3) -> float:
    """Smallest C with eta(t; C, delta) >= values(t) at every sample."""
    times = np.asarray(times, float)
    values = np.asarray(values, float)
    if delta <= 0:
        raise ValueError("envelope fit needs delta > 0")
    t_end = float(times[-1])
    dt = max(t_end / 400.0, 1e-6)

    def dominates(c):
        prob = OsgoodProblem(modulus, c, delta, t_end, validate=False)
        ts, eta = osgood_integrate(prob, dt)
        env = np.interp(times, ts, eta)
        return bool(np.all(env >= values * (1.0 - 1e-12)))

    lo, hi = 1e-6, 1e-2
    while not dominates(hi):
        hi *= 2.0
        if hi > c_max:
            raise RuntimeError(f"no envelope constant below {c_max}")
    while hi - lo > rel * hi:
        mid = 0.5 * (lo + hi)
        if dominates(mid):
            hi = mid
        else:
            lo = mid
    return hi
