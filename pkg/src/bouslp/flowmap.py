"""Backward particle tracking: inverse flow maps along a trajectory.

Departure points solve dY/ds = u(Y, s) integrated backward from (x, t) to
time tau with classical RK4. Velocity is sampled by bicubic interpolation in
space (compiled kernel when available) and 4-point Lagrange interpolation in
time between stored trajectory samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from bouslp.interp import bicubic_periodic
from bouslp.solver import Trajectory
from bouslp.spectral import TWO_PI, Grid, SpectralField, gradient

DEFAULT_SUBSTEP = 0.01


class VelocitySampler:
    """Physical-space velocity u(x, s) interpolated from stored samples."""

    def __init__(self, traj: Trajectory):
        self.traj = traj
        self.times = traj.times
        if len(self.times) < 1:
            raise ValueError("empty trajectory")
        self._cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    def _sample(self, index: int):
        if index not in self._cache:
            u = self.traj.velocity(index)
            self._cache[index] = (u.u1.to_physical(), u.u2.to_physical())
        return self._cache[index]

    def grids_at(self, s: float):
        """Velocity grids at time s (cubic in time, clamped stencil)."""
        times = self.times
        if len(times) == 1:
            return self._sample(0)
        i = int(np.searchsorted(times, s) - 1)
        lo = min(max(i - 1, 0), max(len(times) - 4, 0))
        idx = range(lo, min(lo + 4, len(times)))
        ts = times[list(idx)]
        u1 = np.zeros_like(self._sample(lo)[0])
        u2 = np.zeros_like(u1)
        for a, ia in enumerate(idx):
            w = 1.0
            for b in range(len(ts)):
                if b != a:
                    w *= (s - ts[b]) / (ts[a] - ts[b])
            p1, p2 = self._sample(ia)
            u1 += w * p1
            u2 += w * p2
        return u1, u2

    def at_points(self, px, py, s: float):
        u1g, u2g = self.grids_at(s)
        return (
            bicubic_periodic(u1g, px, py, TWO_PI),
            bicubic_periodic(u2g, px, py, TWO_PI),
        )


@dataclass
class FlowMap:
    """Grid-sampled map x -> X(x) between two trajectory times."""

    grid: Grid
    points: np.ndarray  # (n, n, 2), image of each grid node
    span: tuple[float, float]  # (tau, t)

    def displacement(self) -> np.ndarray:
        """Periodically unwrapped X(x) - x (valid while |disp| < pi)."""
        a = self.grid.arrays
        d = self.points.copy()
        d[:, :, 0] -= a.x1
        d[:, :, 1] -= a.x2
        return (d + math.pi) % TWO_PI - math.pi

    def jacobian_determinant(self) -> np.ndarray:
        """det of the map's Jacobian, from spectral gradients of the
        displacement (1 everywhere for a volume-preserving map)."""
        disp = self.displacement()
        grid = self.grid
        d1 = SpectralField.from_physical(grid, disp[:, :, 0])
        d2 = SpectralField.from_physical(grid, disp[:, :, 1])
        d11, d12 = (g.to_physical() for g in gradient(d1))
        d21, d22 = (g.to_physical() for g in gradient(d2))
        return (1.0 + d11) * (1.0 + d22) - d12 * d21

    def evaluate(self, px, py) -> tuple[np.ndarray, np.ndarray]:
        """Map arbitrary points by interpolating the displacement field."""
        disp = self.displacement()
        dx = bicubic_periodic(disp[:, :, 0], px, py, TWO_PI)
        dy = bicubic_periodic(disp[:, :, 1], px, py, TWO_PI)
        return (px + dx) % TWO_PI, (py + dy) % TWO_PI

    def pullback(self, f: SpectralField) -> SpectralField:
        """f composed with this map, projected back onto the grid."""
        vals = bicubic_periodic(
            f.to_physical(), self.points[:, :, 0], self.points[:, :, 1], TWO_PI
        )
        return SpectralField.from_physical(self.grid, vals)


def _integrate(sampler: VelocitySampler, grid: Grid, s_from: float, s_to: float,
               n_substeps: int | None):
    a = grid.arrays
    y1 = a.x1.copy()
    y2 = a.x2.copy()
    span = s_to - s_from
    if span == 0.0:
        return np.stack([y1, y2], axis=-1)
    if n_substeps is None:
        n_substeps = max(4, int(math.ceil(abs(span) / DEFAULT_SUBSTEP)))
    h = span / n_substeps
    s = s_from
    for _ in range(n_substeps):
        k1x, k1y = sampler.at_points(y1, y2, s)
        k2x, k2y = sampler.at_points(y1 + 0.5 * h * k1x, y2 + 0.5 * h * k1y, s + 0.5 * h)
        k3x, k3y = sampler.at_points(y1 + 0.5 * h * k2x, y2 + 0.5 * h * k2y, s + 0.5 * h)
        k4x, k4y = sampler.at_points(y1 + h * k3x, y2 + h * k3y, s + h)
        y1 = y1 + (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        y2 = y2 + (h / 6.0) * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        s += h
    return np.stack([y1 % TWO_PI, y2 % TWO_PI], axis=-1)


def _check_span(traj: Trajectory, tau: float, t: float):
    t0, t1 = traj.t_span
    eps = 1e-12 * max(1.0, abs(t1))
    if not (t0 - eps <= tau <= t + eps and t <= t1 + eps):
        raise ValueError(f"need {t0} <= tau <= t <= {t1}, got tau={tau}, t={t}")


def inverse_flow_map(traj: Trajectory, tau: float, t: float,
                     n_substeps: int | None = None) -> FlowMap:
    """Departure points: where the particle now at x (time t) sat at time tau."""
    _check_span(traj, tau, t)
    grid = traj.states[0].grid
    sampler = VelocitySampler(traj)
    pts = _integrate(sampler, grid, t, tau, n_substeps)
    return FlowMap(grid=grid, points=pts, span=(tau, t))


def forward_flow_map(traj: Trajectory, tau: float, t: float,
                     n_substeps: int | None = None) -> FlowMap:
    """Arrival points: where the particle at x (time tau) sits at time t."""
    _check_span(traj, tau, t)
    grid = traj.states[0].grid
    sampler = VelocitySampler(traj)
    pts = _integrate(sampler, grid, tau, t, n_substeps)
    return FlowMap(grid=grid, points=pts, span=(tau, t))


def composition_identity_defect(traj: Trajectory, tau: float, t: float,
                                n_substeps: int | None = None) -> float:
    """sup |X^-1(t;tau) o X(t;tau) - id| with periodic distance."""
    inv = inverse_flow_map(traj, tau, t, n_substeps)
    fwd = forward_flow_map(traj, tau, t, n_substeps)
    bx, by = inv.evaluate(fwd.points[:, :, 0], fwd.points[:, :, 1])
    a = inv.grid.arrays
    dx = (bx - a.x1 + math.pi) % TWO_PI - math.pi
    dy = (by - a.x2 + math.pi) % TWO_PI - math.pi
    return float(np.sqrt(dx**2 + dy**2).max())
