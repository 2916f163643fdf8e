import math

import numpy as np
import pytest

from bouslp.flowmap import (
    FlowMap,
    VelocitySampler,
    composition_identity_defect,
    forward_flow_map,
    inverse_flow_map,
)
from bouslp.initdata import taylor_green, zero
from bouslp.solver import SimState, SolverConfig, Trajectory, simulate
from bouslp.spectral import TWO_PI, Grid, SpectralField, VelocityField

from helpers import field_from, random_band_limited


def still_trajectory(grid, t_end=1.0, n_samples=5):
    cfg = SolverConfig(t_end=t_end)
    times = np.linspace(0.0, t_end, n_samples)
    states = [SimState(float(t), zero(grid), zero(grid)) for t in times]
    return Trajectory(states=states, config=cfg)


def constant_velocity_trajectory(grid, c1, c2, t_end=1.0, n_samples=5):
    cfg = SolverConfig(t_end=t_end)
    times = np.linspace(0.0, t_end, n_samples)
    states = [SimState(float(t), zero(grid), zero(grid)) for t in times]
    u1 = field_from(grid, lambda x1, x2: 0 * x1 + c1)
    u2 = field_from(grid, lambda x1, x2: 0 * x1 + c2)
    vel = [VelocityField(u1, u2) for _ in times]
    return Trajectory(states=states, config=cfg, velocities=vel)


def taylor_green_trajectory(grid, t_end=0.5, amplitude=1.0):
    cfg = SolverConfig(kappa=0.0, dt=2e-3, t_end=t_end)
    return simulate(taylor_green(grid, amplitude), zero(grid), cfg, stride=25)


def test_zero_velocity_identity_map():
    grid = Grid(32)
    traj = still_trajectory(grid)
    fm = inverse_flow_map(traj, 0.0, 0.8)
    a = grid.arrays
    assert np.abs(fm.points[:, :, 0] - a.x1).max() <= 1e-14
    assert np.abs(fm.points[:, :, 1] - a.x2).max() <= 1e-14


def test_constant_velocity_translation():
    grid = Grid(32)
    c1, c2 = 0.7, -0.3
    traj = constant_velocity_trajectory(grid, c1, c2)
    tau, t = 0.2, 0.9
    fm = inverse_flow_map(traj, tau, t)
    a = grid.arrays
    expected1 = (a.x1 - (t - tau) * c1) % TWO_PI
    expected2 = (a.x2 - (t - tau) * c2) % TWO_PI
    assert np.abs(fm.points[:, :, 0] - expected1).max() <= 1e-12
    assert np.abs(fm.points[:, :, 1] - expected2).max() <= 1e-12


def test_span_validation():
    grid = Grid(32)
    traj = still_trajectory(grid, t_end=1.0)
    with pytest.raises(ValueError):
        inverse_flow_map(traj, 0.5, 1.5)
    with pytest.raises(ValueError):
        inverse_flow_map(traj, -0.1, 0.5)


def test_taylor_green_fine_step_oracle():
    grid = Grid(64)
    traj = taylor_green_trajectory(grid, t_end=0.5)
    coarse = inverse_flow_map(traj, 0.0, 0.5, n_substeps=50)
    fine = inverse_flow_map(traj, 0.0, 0.5, n_substeps=500)
    diff = np.abs(coarse.points - fine.points)
    diff = np.minimum(diff, TWO_PI - diff)  # periodic distance
    assert diff.max() <= 1e-6


def test_volume_preservation_taylor_green():
    grid = Grid(128)
    traj = taylor_green_trajectory(grid, t_end=0.5)
    fm = inverse_flow_map(traj, 0.0, 0.5)
    jac = fm.jacobian_determinant()
    assert np.abs(jac - 1.0).max() <= 0.02


def test_composition_identity():
    grid = Grid(128)
    traj = taylor_green_trajectory(grid, t_end=0.3, amplitude=0.8)
    defect = composition_identity_defect(traj, 0.0, 0.3)
    assert defect <= 1e-4


def test_pullback_under_zero_velocity():
    grid = Grid(64)
    traj = still_trajectory(grid)
    fm = inverse_flow_map(traj, 0.0, 1.0)
    f = random_band_limited(grid, kmax=8, seed=3)
    back = fm.pullback(f)
    assert np.abs(back.to_physical() - f.to_physical()).max() <= 1e-11


def test_pullback_translation_shifts_field():
    grid = Grid(64)
    c = 0.5
    traj = constant_velocity_trajectory(grid, c, 0.0)
    fm = inverse_flow_map(traj, 0.0, 1.0)
    f = field_from(grid, lambda x1, x2: np.sin(x1))
    back = fm.pullback(f).to_physical()
    a = grid.arrays
    # f(X^-1 x) = sin(x1 - c); bicubic error ~ dx^4 on this grid
    assert np.abs(back - np.sin(a.x1 - c)).max() <= 3e-5


def test_forward_map_inverts_backward_map_for_translation():
    grid = Grid(32)
    traj = constant_velocity_trajectory(grid, 0.4, 0.9)
    fwd = forward_flow_map(traj, 0.0, 1.0)
    inv = inverse_flow_map(traj, 0.0, 1.0)
    a = grid.arrays
    x1b, x2b = inv.evaluate(fwd.points[:, :, 0], fwd.points[:, :, 1])
    assert np.abs((x1b - a.x1 + math.pi) % TWO_PI - math.pi).max() <= 1e-10


def test_sampler_time_interpolation_constant_flow():
    grid = Grid(32)
    traj = constant_velocity_trajectory(grid, 1.0, 0.0, n_samples=7)
    sampler = VelocitySampler(traj)
    for s in (0.0, 0.31, 0.77, 1.0):
        u1, u2 = sampler.grids_at(s)
        assert np.abs(u1 - 1.0).max() <= 1e-12
        assert np.abs(u2).max() <= 1e-12


def test_flowmap_displacement_unwrap():
    grid = Grid(32)
    traj = constant_velocity_trajectory(grid, 1.0, 0.0)
    fm = inverse_flow_map(traj, 0.0, 1.0)
    disp = fm.displacement()
    assert np.abs(disp[:, :, 0] + 1.0).max() <= 1e-12
    assert isinstance(fm, FlowMap)
