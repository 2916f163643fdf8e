"""Time integration of the vorticity-density system on the torus.

    d_t omega + u . grad omega = d1 rho  (+ optional nu Laplacian)
    d_t rho   + u . grad rho   = kappa Laplacian rho
    u = biot_savart(omega)

Advection and the buoyancy source are integrated explicitly; the diffusion
of rho (and of omega when nu > 0) is applied exactly per mode through the
integrating factor exp(-kappa |k|^2 dt), so the scheme is unconditionally
stable in the stiff part. ``imex-rk2`` is the integrating-factor Heun
scheme (second order); ``imex-euler`` its first-order variant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from bouslp.spectral import (
    Grid,
    SpectralField,
    VelocityField,
    advect,
    biot_savart,
    dealias,
    spectral_derivative,
)

INTEGRATORS = ("imex-rk2", "imex-euler")


class CFLViolation(RuntimeError):
    def __init__(self, dt, suggested_dt):
        super().__init__(
            f"advective CFL violated at dt={dt:.3e}; suggested dt <= {suggested_dt:.3e}"
        )
        self.suggested_dt = suggested_dt


class BlowupDetected(RuntimeError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    kappa: float = 0.1
    nu: float = 0.0
    dt: float = 1e-3
    t_end: float = 1.0
    integrator: str = "imex-rk2"
    cfl_limit: float = 0.5
    buoyancy: bool = True  # diagnostic runs may decouple rho from omega

    def __post_init__(self):
        if self.kappa < 0:
            raise ValueError(f"kappa must be >= 0, got {self.kappa}")
        if self.nu < 0:
            raise ValueError(f"nu must be >= 0, got {self.nu}")
        if self.dt <= 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if self.t_end < 0:
            raise ValueError(f"t_end must be >= 0, got {self.t_end}")
        if self.integrator not in INTEGRATORS:
            raise ValueError(f"integrator must be one of {INTEGRATORS}")
        if self.cfl_limit <= 0:
            raise ValueError("cfl_limit must be > 0")


@dataclass(frozen=True)
class SimState:
    t: float
    omega: SpectralField
    rho: SpectralField

    @property
    def grid(self) -> Grid:
        return self.omega.grid


@dataclass
class Trajectory:
    states: list[SimState]
    config: SolverConfig
    # optional explicit velocity samples (diagnostics/synthetic flows);
    # when absent, velocities derive from omega via biot_savart
    velocities: Optional[list[VelocityField]] = None
    meta: dict = field(default_factory=dict)

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.states])

    @property
    def t_span(self) -> tuple[float, float]:
        return self.states[0].t, self.states[-1].t

    def velocity(self, index: int) -> VelocityField:
        if self.velocities is not None:
            return self.velocities[index]
        return biot_savart(self.states[index].omega)

    def __post_init__(self):
        times = [s.t for s in self.states]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("trajectory times must be strictly increasing")
        if times and times[0] != 0.0:
            raise ValueError("trajectories start at t = 0")


def _rhs(omega, rho, u, cfg):
    """Explicit tendencies (advection + buoyancy), dealiased."""
    n_omega = -advect(u, omega)
    if cfg.buoyancy:
        n_omega = n_omega + dealias(spectral_derivative(rho, 1))
    n_rho = -advect(u, rho)
    return n_omega, n_rho


def _diffusion_factors(grid: Grid, cfg: SolverConfig, dt: float):
    kmag2 = grid.arrays.kmag2
    e_rho = np.exp(-cfg.kappa * kmag2 * dt)
    e_omega = np.exp(-cfg.nu * kmag2 * dt) if cfg.nu > 0 else None
    return e_omega, e_rho


def cfl_dt(u: VelocityField, grid: Grid, cfl_limit: float) -> float:
    speed = u.max_speed()
    if speed == 0.0:
        return math.inf
    return cfl_limit * grid.dx / speed


def imex_step(
    state: SimState, u: VelocityField, config: SolverConfig, dt: float | None = None
) -> SimState:
    """Advance one step from ``state`` using velocity ``u`` at its time.

    Raises CFLViolation (with a usable dt) when the advective restriction
    fails, and BlowupDetected on non-finite fields.
    """
    if dt is None:
        dt = config.dt
    grid = state.grid
    allowed = cfl_dt(u, grid, config.cfl_limit)
    if dt > allowed:
        raise CFLViolation(dt, allowed)

    e_omega, e_rho = _diffusion_factors(grid, config, dt)
    w, r = state.omega, state.rho
    n_w, n_r = _rhs(w, r, u, config)

    def apply(coeffs, factor):
        return coeffs if factor is None else coeffs * factor

    if config.integrator == "imex-euler":
        w_new = apply(w.coeffs + dt * n_w.coeffs, e_omega)
        r_new = apply(r.coeffs + dt * n_r.coeffs, e_rho)
    else:  # integrating-factor Heun
        w_pred = SpectralField(grid, apply(w.coeffs + dt * n_w.coeffs, e_omega))
        r_pred = SpectralField(grid, apply(r.coeffs + dt * n_r.coeffs, e_rho))
        u_pred = biot_savart(w_pred)
        n_w2, n_r2 = _rhs(w_pred, r_pred, u_pred, config)
        w_new = apply(w.coeffs, e_omega) + 0.5 * dt * (
            apply(n_w.coeffs, e_omega) + n_w2.coeffs
        )
        r_new = apply(r.coeffs, e_rho) + 0.5 * dt * (
            apply(n_r.coeffs, e_rho) + n_r2.coeffs
        )

    if not (np.all(np.isfinite(w_new)) and np.all(np.isfinite(r_new))):
        raise BlowupDetected(f"non-finite field at t={state.t + dt:.6f}")
    return SimState(state.t + dt, SpectralField(grid, w_new), SpectralField(grid, r_new))


def simulate(
    omega0: SpectralField,
    rho0: SpectralField,
    config: SolverConfig,
    stride: int = 10,
    observers: Sequence[Callable[[int, SimState], None]] = (),
    store_velocities: bool = False,
) -> Trajectory:
    """Integrate to t_end, storing every ``stride``-th state (plus the last).

    Observers are called at every step with (step index, new state). On a
    CFL violation the step is subdivided into equal substeps that satisfy
    the restriction.
    """
    if omega0.grid.n != rho0.grid.n:
        raise ValueError("initial fields live on different grids")
    if abs(omega0.coeffs[0, 0]) > 1e-12 * max(1.0, np.abs(omega0.coeffs).max()):
        raise ValueError("initial vorticity must be mean-free")
    omega0 = dealias(omega0)
    rho0 = dealias(rho0)

    state = SimState(0.0, omega0, rho0)
    states = [state]
    velocities = [biot_savart(state.omega)] if store_velocities else None
    n_steps = int(round(config.t_end / config.dt))
    if abs(n_steps * config.dt - config.t_end) > 1e-9 * max(config.dt, config.t_end):
        n_steps = int(math.ceil(config.t_end / config.dt))

    for step in range(1, n_steps + 1):
        u = biot_savart(state.omega)
        try:
            state = imex_step(state, u, config)
        except CFLViolation as err:
            pieces = int(math.ceil(config.dt / err.suggested_dt))
            sub_dt = config.dt / pieces
            for _ in range(pieces):
                u = biot_savart(state.omega)
                state = imex_step(state, u, config, dt=sub_dt)
        for obs in observers:
            obs(step, state)
        if step % stride == 0 or step == n_steps:
            states.append(state)
            if store_velocities:
                velocities.append(biot_savart(state.omega))

    return Trajectory(states=states, config=config, velocities=velocities)


def twin_simulate(base: tuple, perturbed: tuple, config: SolverConfig, stride: int = 10):
    """Run two initial conditions under one config; returns both trajectories."""
    t1 = simulate(base[0], base[1], config, stride=stride)
    t2 = simulate(perturbed[0], perturbed[1], config, stride=stride)
    return t1, t2


def with_dt(config: SolverConfig, dt: float) -> SolverConfig:
    return replace(config, dt=dt)
