"""Pseudo-spectral integrator for the projected momentum equation on the
torus: u_t = -P[(u.grad)u] + nu Lap u, advanced by classical RK4 on the
nonlinear term with the viscous factor exp(-nu |k|^2 dt) applied exactly.

The nonlinear term is evaluated in divergence form -ik_j (u_i u_j)^ with
same-grid products; because every state is truncated to |k|_inf <= kmax
= floor(n/3), the products are alias-free after truncation (the 2/3
rule), and the Leray projection keeps each stage divergence-free.
Internally the state lives in the half-spectrum rfft layout; snapshots
are materialized as full-cube fields.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.fft as _fft

from .generators import random_divfree, shear_mode, taylor_green
from .spectral import Grid, Trajectory, VelocityField, fft_workers

__all__ = ["SolverConfig", "step", "simulate", "INITIAL_CONDITIONS"]


def _initial_random(grid: Grid, seed: int) -> VelocityField:
    # decaying profile across the shells the grid can hold
    amps = [0.0] + [2.0 ** (-0.5 * q) for q in range(1, 4)]
    return random_divfree(grid, amps, seed)


INITIAL_CONDITIONS = {
    "taylor-green": lambda grid, seed: taylor_green(grid),
    "shear": lambda grid, seed: shear_mode(grid),
    "random": _initial_random,
}


@dataclass
class SolverConfig:
    grid: Grid
    nu: float
    dt: float
    t_end: float
    snapshot_stride: int = 1
    init: str = "taylor-green"
    seed: int = 0
    cfl_limit: float = 0.5

    def __post_init__(self) -> None:
        if self.nu <= 0:
            raise ValueError(f"viscosity must be positive, got {self.nu}")
        if self.dt <= 0:
            raise ValueError(f"time step must be positive, got {self.dt}")
        if self.t_end <= 0:
            raise ValueError(f"end time must be positive, got {self.t_end}")
        if self.snapshot_stride < 1:
            raise ValueError("snapshot stride must be >= 1")
        if self.init not in INITIAL_CONDITIONS:
            raise ValueError(
                f"unknown initial condition {self.init!r}; "
                f"choices: {sorted(INITIAL_CONDITIONS)}"
            )


class _Workspace:
    """Grid-derived arrays in the rfft half-spectrum layout."""

    def __init__(self, grid: Grid, nu: float, dt: float):
        n = grid.n
        k = np.fft.fftfreq(n, d=1.0 / n)
        self.n = n
        self.kx = k[:, None, None]
        self.ky = k[None, :, None]
        self.kz = np.abs(k[: n // 2 + 1])[None, None, :]
        self.k2 = self.kx**2 + self.ky**2 + self.kz**2
        self.k2safe = np.where(self.k2 == 0.0, 1.0, self.k2)
        ka = np.abs(k)
        self.mask = (
            (ka[:, None, None] <= grid.kmax)
            & (ka[None, :, None] <= grid.kmax)
            & (ka[: n // 2 + 1][None, None, :] <= grid.kmax)
        )
        self.half_decay = np.exp(-nu * self.k2 * dt / 2.0)
        self.full_decay = self.half_decay**2

    def nonlinear(self, vhat: np.ndarray) -> np.ndarray:
        """-P[ ik_j (u_i u_j)^ ], dealiased: the projected advection term."""
        w = fft_workers()
        n = self.n
        u = _fft.irfftn(vhat, s=(n, n, n), axes=(1, 2, 3), workers=w) * n**3
        prods = np.empty((6, n, n, n))
        prods[0] = u[0] * u[0]
        prods[1] = u[1] * u[1]
        prods[2] = u[2] * u[2]
        prods[3] = u[0] * u[1]
        prods[4] = u[0] * u[2]
        prods[5] = u[1] * u[2]
        phat = _fft.rfftn(prods, axes=(1, 2, 3), workers=w) / n**3
        phat *= self.mask
        out = np.empty_like(vhat)
        out[0] = -1j * (self.kx * phat[0] + self.ky * phat[3] + self.kz * phat[4])
        out[1] = -1j * (self.kx * phat[3] + self.ky * phat[1] + self.kz * phat[5])
        out[2] = -1j * (self.kx * phat[4] + self.ky * phat[5] + self.kz * phat[2])
        div = (self.kx * out[0] + self.ky * out[1] + self.kz * out[2]) / self.k2safe
        out[0] -= self.kx * div
        out[1] -= self.ky * div
        out[2] -= self.kz * div
        return out

    def max_speed(self, vhat: np.ndarray) -> float:
        n = self.n
        u = _fft.irfftn(vhat, s=(n, n, n), axes=(1, 2, 3), workers=fft_workers()) * n**3
        return float(np.sqrt(np.sum(u**2, axis=0)).max())


def _to_half(fld: VelocityField) -> np.ndarray:
    n = fld.grid.n
    return np.ascontiguousarray(fld.coeffs[:, :, :, : n // 2 + 1])


def _to_full(grid: Grid, vhat: np.ndarray, time: float) -> VelocityField:
    n = grid.n
    full = np.zeros((3, n, n, n), dtype=np.complex128)
    full[:, :, :, : n // 2 + 1] = vhat
    flip = (-np.arange(n)) % n
    kz_rest = np.arange(n // 2 + 1, n)
    full[:, :, :, kz_rest] = np.conj(
        vhat[:, flip[:, None, None], flip[None, :, None], (n - kz_rest)[None, None, :]]
    )
    # the half-spectrum kz = 0 and kz = n/2 planes already carry their own
    # conjugate symmetry; enforce it so round trips are exact
    sym = 0.5 * (full[:, :, :, 0] + np.conj(full[:, flip][:, :, flip][:, :, :, 0]))
    full[:, :, :, 0] = sym
    return VelocityField(grid, full, time)


def _rk4_step(vhat: np.ndarray, ws: _Workspace, dt: float) -> np.ndarray:
    e_half = ws.half_decay
    e_full = ws.full_decay
    n1 = ws.nonlinear(vhat)
    n2 = ws.nonlinear(e_half * (vhat + (dt / 2.0) * n1))
    n3 = ws.nonlinear(e_half * vhat + (dt / 2.0) * n2)
    n4 = ws.nonlinear(e_full * vhat + dt * e_half * n3)
    return e_full * (vhat + (dt / 6.0) * n1) + (dt / 6.0) * (
        2.0 * e_half * n2 + 2.0 * e_half * n3 + n4
    )


def step(fld: VelocityField, nu: float, dt: float) -> VelocityField:
    """One integrating-factor RK4 step; input must be divergence-free and
    dealiased.  Raises on NaN/Inf blow-up."""
    ws = _Workspace(fld.grid, nu, dt)
    vhat = _rk4_step(_to_half(fld), ws, dt)
    if not np.all(np.isfinite(vhat)):
        raise RuntimeError("time step produced non-finite coefficients")
    t0 = 0.0 if fld.time is None else fld.time
    return _to_full(fld.grid, vhat, t0 + dt)


def simulate(config: SolverConfig, sink=None) -> Trajectory | None:
    """Integrate from t = 0 to t_end, emitting snapshots every
    snapshot_stride steps (the initial and final states always included).

    With sink=None the snapshots are accumulated into a Trajectory; pass
    sink=callable(time, field) to stream them instead (returns None).
    Deterministic: same config, same trajectory, bit for bit.
    """
    grid = config.grid
    ws = _Workspace(grid, config.nu, config.dt)
    fld0 = INITIAL_CONDITIONS[config.init](grid, config.seed)
    vhat = _to_half(fld0)
    n_steps = round(config.t_end / config.dt)
    if not math.isclose(n_steps * config.dt, config.t_end, rel_tol=1e-9):
        n_steps = math.ceil(config.t_end / config.dt)
    snapshots: list[tuple[float, VelocityField]] = []

    def emit(i_step: int) -> None:
        t = i_step * config.dt
        fld = _to_full(grid, vhat, t)
        if sink is None:
            snapshots.append((t, fld))
        else:
            sink(t, fld)

    emit(0)
    for i in range(1, n_steps + 1):
        speed = ws.max_speed(vhat)
        cfl = config.dt * grid.kmax * speed
        if cfl > config.cfl_limit:
            warnings.warn(
                f"CFL number {cfl:.3f} exceeds {config.cfl_limit} at step {i}",
                stacklevel=2,
            )
        vhat = _rk4_step(vhat, ws, config.dt)
        if not np.all(np.isfinite(vhat)):
            raise RuntimeError(
                f"instability: non-finite coefficients at step {i} "
                f"(t = {i * config.dt:.6g}); reduce dt or increase nu"
            )
        if i % config.snapshot_stride == 0 or i == n_steps:
            emit(i)
    if sink is None:
        return Trajectory(nu=config.nu, snapshots=snapshots)
    return None
