"""Periodic divergence-free vector fields on the torus [0, 2pi)^3.

Fields are held as Fourier coefficients u_hat(k) on the full integer
lattice with |k_i| <= n/2, in standard FFT ordering, normalized so that

    u(x) = sum_k u_hat(k) exp(i k.x).

Everything downstream (dyadic shells, flux, solver) works on this
representation.  All operations are pure: they never mutate their inputs.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np
import scipy.fft as _fft

TWO_PI = 2.0 * math.pi
VOLUME = TWO_PI**3


def fft_workers() -> int:
    """Worker count for FFT calls, capped by ONSAGER_THREADS (default 1)."""
    raw = os.environ.get("ONSAGER_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass(frozen=True)
class Grid:
    """Uniform n^3 grid on [0, 2pi)^3 with the 2/3-rule dealias cutoff."""

    n: int
    kmax: int

    @property
    def spacing(self) -> float:
        return TWO_PI / self.n

    @property
    def cell_volume(self) -> float:
        return (TWO_PI / self.n) ** 3

    def wavenumbers(self) -> np.ndarray:
        """Integer frequencies along one axis in FFT ordering."""
        return np.fft.fftfreq(self.n, d=1.0 / self.n).astype(np.int64)

    def k_components(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        k = self.wavenumbers()
        return (
            k[:, None, None].astype(np.float64),
            k[None, :, None].astype(np.float64),
            k[None, None, :].astype(np.float64),
        )

    def k_norm(self) -> np.ndarray:
        """|k| (Euclidean) on the full lattice, shape (n, n, n)."""
        kx, ky, kz = self.k_components()
        return np.sqrt(kx**2 + ky**2 + kz**2)

    def k_squared(self) -> np.ndarray:
        kx, ky, kz = self.k_components()
        return kx**2 + ky**2 + kz**2

    def dealias_mask(self) -> np.ndarray:
        """True where |k|_inf <= kmax, shape (n, n, n)."""
        k = np.abs(self.wavenumbers())
        return (
            (k[:, None, None] <= self.kmax)
            & (k[None, :, None] <= self.kmax)
            & (k[None, None, :] <= self.kmax)
        )


def make_grid(n: int) -> Grid:
    """Build a Grid; n must be even and at least 8 so kmax = floor(n/3) >= 2."""
    if not isinstance(n, (int, np.integer)):
        raise ValueError(f"grid size must be an integer, got {n!r}")
    n = int(n)
    if n % 2 != 0:
        raise ValueError(f"grid size must be even, got {n}")
    if n < 8:
        raise ValueError(f"grid size must be >= 8, got {n}")
    return Grid(n=n, kmax=n // 3)


@dataclass(frozen=True)
class VelocityField:
    """Velocity field as complex coefficients, shape (3, n, n, n).

    Invariants (enforced by the constructors in this package, relied on
    everywhere): conjugate symmetry (field is real), k.u_hat(k) = 0 after
    projection, and u_hat = 0 outside the dealias cube.
    """

    grid: Grid
    coeffs: np.ndarray
    time: float | None = None

    def __post_init__(self) -> None:
        expected = (3, self.grid.n, self.grid.n, self.grid.n)
        if self.coeffs.shape != expected:
            raise ValueError(
                f"coefficient shape {self.coeffs.shape} does not match grid {expected}"
            )

    def with_coeffs(self, coeffs: np.ndarray, time: float | None = None) -> "VelocityField":
        return VelocityField(self.grid, coeffs, self.time if time is None else time)

    def energy(self) -> float:
        """Kinetic energy ||u||_2^2 / 2 (Parseval)."""
        return 0.5 * l2_norm_sq(self)


@dataclass
class Trajectory:
    """Time-ordered snapshots of one flow at viscosity nu > 0."""

    nu: float
    snapshots: list[tuple[float, VelocityField]] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.nu <= 0:
            raise ValueError(f"viscosity must be positive, got {self.nu}")
        times = [t for t, _ in self.snapshots]
        if any(t1 <= t0 for t0, t1 in zip(times, times[1:])):
            raise ValueError("snapshot times must be strictly increasing")
        grids = {f.grid for _, f in self.snapshots}
        if len(grids) > 1:
            raise ValueError("all snapshots must share one grid")

    @property
    def times(self) -> np.ndarray:
        return np.array([t for t, _ in self.snapshots])

    def iter_snapshots(self):
        yield from self.snapshots

    def __len__(self) -> int:
        return len(self.snapshots)


def zero_field(grid: Grid, time: float | None = None) -> VelocityField:
    return VelocityField(grid, np.zeros((3, grid.n, grid.n, grid.n), dtype=np.complex128), time)


def to_physical(fld: VelocityField) -> np.ndarray:
    """Real samples u(x_j) on the grid, shape (3, n, n, n)."""
    n = fld.grid.n
    out = _fft.ifftn(fld.coeffs, axes=(1, 2, 3), workers=fft_workers()) * n**3
    return np.ascontiguousarray(out.real)

def from_physical(grid: Grid, samples: np.ndarray, time: float | None = None) -> VelocityField:
    """Coefficients of real grid samples; inverse of to_physical."""
    expected = (3, grid.n, grid.n, grid.n)
    if samples.shape != expected:
        raise ValueError(f"sample shape {samples.shape} does not match grid {expected}")
    coeffs = _fft.fftn(samples.astype(np.float64), axes=(1, 2, 3), workers=fft_workers())
    coeffs /= grid.n**3
    return VelocityField(grid, coeffs, time)


def leray_project(fld: VelocityField) -> VelocityField:
    """Remove the gradient part: u_hat(k) -= k (k.u_hat)/|k|^2 for k != 0.

    Idempotent; leaves the mean mode untouched; output satisfies
    k.u_hat(k) = 0 for every k.
    """
    kx, ky, kz = fld.grid.k_components()
    k2 = kx**2 + ky**2 + kz**2
    k2safe = np.where(k2 == 0.0, 1.0, k2)
    div = kx * fld.coeffs[0] + ky * fld.coeffs[1] + kz * fld.coeffs[2]
    div /= k2safe
    out = fld.coeffs.copy()
    out[0] -= kx * div
    out[1] -= ky * div
    out[2] -= kz * div
    return fld.with_coeffs(out)


def dealias(fld: VelocityField) -> VelocityField:
    """Zero every coefficient with |k|_inf > kmax."""
    mask = fld.grid.dealias_mask()
    return fld.with_coeffs(fld.coeffs * mask)


def is_dealiased(fld: VelocityField, tol: float = 1e-13) -> bool:
    mask = fld.grid.dealias_mask()
    outside = np.abs(fld.coeffs[:, ~mask])
    if outside.size == 0:
        return True
    scale = np.abs(fld.coeffs).max()
    return float(outside.max()) <= tol * max(scale, 1.0)


def divergence_residual(fld: VelocityField) -> float:
    """max_k |k.u_hat(k)| / max(|u_hat|, tiny) -- 0 for divergence-free fields."""
    kx, ky, kz = fld.grid.k_components()
    div = np.abs(kx * fld.coeffs[0] + ky * fld.coeffs[1] + kz * fld.coeffs[2])
    scale = np.abs(fld.coeffs).max()
    if scale == 0.0:
        return 0.0
    return float(div.max() / scale)


def l2_norm_sq(fld: VelocityField) -> float:
    """||u||_2^2 via Parseval: (2pi)^3 sum |u_hat|^2."""
    return VOLUME * float(np.sum(np.abs(fld.coeffs) ** 2))


def grad_l2_norm_sq(fld: VelocityField) -> float:
    """||grad u||_2^2 = (2pi)^3 sum |k|^2 |u_hat|^2."""
    k2 = fld.grid.k_squared()
    return VOLUME * float(np.sum(k2 * np.abs(fld.coeffs) ** 2))


def lp_norm(fld: VelocityField, p: float) -> float:
    """L^p norm of |u(x)| (pointwise Euclidean norm) over [0, 2pi)^3.

    p < inf: uniform-grid quadrature ((2pi/n)^3 sum |u|^p)^(1/p);
    p = inf: max over grid points.  Raises for p < 1.
    """
    if p < 1:
        raise ValueError(f"L^p norm requires p >= 1, got {p}")
    if p == 2:
        return math.sqrt(l2_norm_sq(fld))
    samples = to_physical(fld)
    mag = np.sqrt(np.sum(samples**2, axis=0))
    if math.isinf(p):
        return float(mag.max())
    return float((fld.grid.cell_volume * np.sum(mag**p)) ** (1.0 / p))
