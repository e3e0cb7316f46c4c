"""Energy-flux diagnostics: the through-scale flux of the advective
term, the truncated and full energy balances, the shell-sum flux
estimate, and the shell interpolation bounds.

The flux through wavenumber lambda_q is

    flux(q) = integral of tr( (u (x) u)_{<=q} . grad u_{<=q} ) dx,

with (.)_{<=q} the smooth low-pass at lambda_{q+1} and the sign exactly
as in the truncated balance

    1/2 ||u_{<=q}(t)||_2^2 = 1/2 ||u_{<=q}(t0)||_2^2
        + int_{t0}^t ( -nu ||grad u_{<=q}||_2^2 + flux(q) ) ds.

The tensor u (x) u is formed pointwise on a 3/2-padded grid, so its
coefficients are exact for dealiased fields; the contraction is summed
spectrally (Parseval).  A direct convolution-sum reference path is kept
for small grids as the independent oracle.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
import scipy.fft as _fft
import scipy.signal

from .dyadic import DEFAULT_CUTOFF, decompose, lambda_q, low_pass, shell_count, shell_lp_norms
from .spectral import (
    VOLUME,
    Grid,
    VelocityField,
    fft_workers,
    grad_l2_norm_sq,
    is_dealiased,
    l2_norm_sq,
)

__all__ = [
    "FluxReport",
    "energy_flux",
    "energy_flux_reference",
    "flux_estimate_rhs",
    "flux_bound_ratio",
    "holder_shell_bound",
    "bernstein_shell_bound",
    "truncated_balance",
    "energy_balance_residual",
    "flux_time_integrals",
    "flux_report",
    "write_flux_report_csv",
    "write_flux_summary_csv",
]


def _require_dealiased(fld: VelocityField) -> None:
    if not is_dealiased(fld):
        raise ValueError("field carries energy beyond the dealias cutoff")


def _padded_tensor_hat(fld: VelocityField) -> np.ndarray:
    """Coefficients of u_i u_j (6 unique entries, order 11,22,33,12,13,23),
    exact via pointwise products on the 3/2-padded grid, truncated back to
    the base lattice."""
    w = fft_workers()
    n = fld.grid.n
    m = 3 * n // 2
    half = n // 2
    pad = np.zeros((3, m, m, m), dtype=np.complex128)
    sl = np.r_[0:half, m - half : m]
    src = np.r_[0:half, n - half : n]
    pad[np.ix_(range(3), sl, sl, sl)] = fld.coeffs[np.ix_(range(3), src, src, src)]
    u = _fft.ifftn(pad, axes=(1, 2, 3), workers=w).real * m**3
    prods = np.empty((6, m, m, m))
    prods[0] = u[0] * u[0]
    prods[1] = u[1] * u[1]
    prods[2] = u[2] * u[2]
    prods[3] = u[0] * u[1]
    prods[4] = u[0] * u[2]
    prods[5] = u[1] * u[2]
    phat = _fft.fftn(prods, axes=(1, 2, 3), workers=w) / m**3
    out = np.zeros((6, n, n, n), dtype=np.complex128)
    out[np.ix_(range(6), src, src, src)] = phat[np.ix_(range(6), sl, sl, sl)]
    return out


_TENSOR_INDEX = {
    (0, 0): 0, (1, 1): 1, (2, 2): 2,
    (0, 1): 3, (1, 0): 3,
    (0, 2): 4, (2, 0): 4,
    (1, 2): 5, (2, 1): 5,
}


def energy_flux(fld: VelocityField, q: int, _tensor_hat: np.ndarray | None = None) -> float:
    """Flux of kinetic energy through wavenumber lambda_q (sign as in the
    truncated balance: positive feeds the resolved low modes)."""
    _require_dealiased(fld)
    grid = fld.grid
    that = _padded_tensor_hat(fld) if _tensor_hat is None else _tensor_hat
    theta = np.asarray(DEFAULT_CUTOFF(grid.k_norm() / lambda_q(q + 1)))
    kx, ky, kz = grid.k_components()
    kvec = (kx, ky, kz)
    uhat_low = fld.coeffs * theta
    total = 0.0
    for i in range(3):
        for j in range(3):
            t_ij = that[_TENSOR_INDEX[(i, j)]] * theta
            grad_ij = 1j * kvec[i] * uhat_low[j]
            total += float(np.sum(t_ij * np.conj(grad_ij)).real)
    return VOLUME * total


def triad_tensor(fld: VelocityField) -> tuple[np.ndarray, dict]:
    """Centered coefficient cube (-kmax..kmax) and the u_i u_j tensor
    coefficients on -2kmax..2kmax by direct convolution summation.

    The slow exact path behind energy_flux_reference; exposed so a sweep
    over q can reuse the convolutions."""
    grid = fld.grid
    kmax = grid.kmax
    width = 2 * kmax + 1
    freqs = grid.wavenumbers()
    sel = np.r_[0 : kmax + 1, grid.n - kmax : grid.n]
    dense = np.zeros((3, width, width, width), dtype=np.complex128)
    order = np.argsort(freqs[sel])
    for c in range(3):
        cube = fld.coeffs[c][np.ix_(sel, sel, sel)]
        dense[c] = cube[np.ix_(order, order, order)]
    conv = {}
    for i in range(3):
        for j in range(i, 3):
            conv[(i, j)] = scipy.signal.convolve(dense[i], dense[j], method="direct")
    return dense, conv


def energy_flux_reference(fld: VelocityField, q: int, _triad=None) -> float:
    """Direct convolution-sum evaluation of the same flux (no large FFT):
    the tensor coefficients come from the full triad sum over the dealias
    cube.  O(kmax^6) work; refuses grids beyond n = 16."""
    _require_dealiased(fld)
    grid = fld.grid
    if grid.n > 16:
        raise ValueError("reference flux is for n <= 16 only")
    kmax = grid.kmax
    dense, conv = triad_tensor(fld) if _triad is None else _triad
    kline = np.arange(-2 * kmax, 2 * kmax + 1, dtype=np.float64)
    knorm = np.sqrt(
        kline[:, None, None] ** 2 + kline[None, :, None] ** 2 + kline[None, None, :] ** 2
    )
    theta_t = np.asarray(DEFAULT_CUTOFF(knorm / lambda_q(q + 1)))
    kline_u = np.arange(-kmax, kmax + 1, dtype=np.float64)
    knorm_u = np.sqrt(
        kline_u[:, None, None] ** 2
        + kline_u[None, :, None] ** 2
        + kline_u[None, None, :] ** 2
    )
    theta_u = np.asarray(DEFAULT_CUTOFF(knorm_u / lambda_q(q + 1)))
    kvec_u = (
        kline_u[:, None, None],
        kline_u[None, :, None],
        kline_u[None, None, :],
    )
    mid = slice(kmax, 3 * kmax + 1)  # central -kmax..kmax window of the tensor cube
    total = 0.0
    for i in range(3):
        for j in range(3):
            key = (min(i, j), max(i, j))
            t_ij = (conv[key] * theta_t)[mid, mid, mid]
            grad_ij = 1j * kvec_u[i] * (dense[j] * theta_u)
            total += float(np.sum(t_ij * np.conj(grad_ij)).real)
    return VOLUME * total


def flux_estimate_rhs(shell_l3_norms: np.ndarray, q: int, q_offset: int = -1) -> float:
    """Shell-sum bound for |flux(q)|:

        [ sum_{r<q} lambda_r^{2/3} ||u_r||_3^2 2^{-4|r-q|/3} ]^{3/2}
      + [ sum_{r>=q} lambda_r^{2/3} ||u_r||_3^2 2^{-2|r-q|/3} ]^{3/2}

    shell_l3_norms[i] is ||u_r||_3 for r = q_offset + i (default: the
    decompose() layout starting at r = -1).
    """
    norms = np.asarray(shell_l3_norms, dtype=np.float64)
    if np.any(norms < 0):
        raise ValueError("shell norms must be nonnegative")
    r = np.arange(q_offset, q_offset + norms.size)
    lam_r = 2.0**r
    lam_gap = 2.0 ** np.abs(r - q)
    terms = lam_r ** (2.0 / 3.0) * norms**2
    below = r < q
    low = float(np.sum(terms[below] * lam_gap[below] ** (-4.0 / 3.0)) ** 1.5)
    high = float(np.sum(terms[~below] * lam_gap[~below] ** (-2.0 / 3.0)) ** 1.5)
    return low + high


def flux_bound_ratio(fld: VelocityField, q: int, _tensor_hat: np.ndarray | None = None,
                     _shell_norms: np.ndarray | None = None) -> float:
    """|flux(q)| / flux_estimate_rhs; NaN when both sides vanish.

    A zero estimate with nonzero flux cannot happen for a genuine
    decomposition and is raised as an internal inconsistency.
    """
    flux = energy_flux(fld, q, _tensor_hat=_tensor_hat)
    norms = _shell_norms
    if norms is None:
        norms = shell_lp_norms(decompose(fld), 3.0)
    rhs = flux_estimate_rhs(norms, q)
    if rhs == 0.0:
        if abs(flux) < 1e-12:
            return math.nan
        raise RuntimeError(
            f"flux estimate vanished but flux(q={q}) = {flux:.3e}; "
            "this indicates an implementation bug"
        )
    return abs(flux) / rhs


def holder_shell_bound(norm2: float, norm_p: float, p: float) -> float:
    """Interpolation bound ||u_r||_3^3 <= ||u_r||_2^{(2p-6)/(p-2)} ||u_r||_p^{p/(p-2)},
    exact at p = 3; requires p >= 3."""
    if p < 3:
        raise ValueError(f"interpolation between 2 and p needs p >= 3, got {p}")
    if norm2 < 0 or norm_p < 0:
        raise ValueError("norms must be nonnegative")
    if math.isinf(p):
        return norm2**2 * norm_p
    return norm2 ** ((2 * p - 6) / (p - 2)) * norm_p ** (p / (p - 2))


@dataclass(frozen=True)
class ShellBound:
    value: float
    lambda_exponent: float
    exponent_nonnegative: bool
    constant: float


def bernstein_shell_bound(norm2: float, norm_p: float, p: float, beta: float,
                          r: int, constant: float = 8.0) -> ShellBound:
    """Frequency-localized bound

        ||u_r||_3^3 <= C ||u_r||_2^{3-beta} ||u_r||_p^{beta}
                       lambda_r^{3/2 + 3 beta/p - 3 beta/2},

    with C the supplied single-shell norm-inequality constant raised to
    the number of applications the derivation needs (p/(p-2) - beta of
    them after interpolation for p >= 3; three direct ones for p < 3).
    The lambda exponent is nonnegative exactly when 2/p + 1/beta >= 1,
    which is reported alongside the value.
    """
    if p < 1:
        raise ValueError(f"need p >= 1, got {p}")
    if not 0 < beta <= 3:
        raise ValueError(f"need 0 < beta <= 3, got {beta}")
    ip = 0.0 if math.isinf(p) else 1.0 / p
    exponent = 1.5 + 3.0 * beta * ip - 1.5 * beta
    if p >= 3:
        applications = max(0.0, p / (p - 2) - beta) if not math.isinf(p) else max(0.0, 1.0 - beta)
    else:
        applications = 3.0
    c = constant**applications
    value = c * norm2 ** (3.0 - beta) * norm_p**beta * lambda_q(r) ** exponent
    return ShellBound(
        value=value,
        lambda_exponent=exponent,
        exponent_nonnegative=bool(2.0 * ip + 1.0 / beta >= 1.0 - 1e-15),
        constant=c,
    )


def _balance_terms(trajectory, q: int | None):
    """Per-snapshot (t, energy-term, dissipation, flux) for the balance at
    shell q (q = None: full balance, un-halved convention, zero flux)."""
    times = []
    energies = []
    dissipations = []
    fluxes = []
    for t, fld in trajectory.iter_snapshots():
        if q is None:
            low = fld
            factor = 1.0
        else:
            low = low_pass(fld, q)
            factor = 0.5
        times.append(t)
        energies.append(factor * l2_norm_sq(low))
        dissipations.append(
            (2.0 * factor) * trajectory.nu * grad_l2_norm_sq(low)
        )
        fluxes.append(0.0 if q is None else energy_flux(fld, q))
    return (
        np.array(times),
        np.array(energies),
        np.array(dissipations),
        np.array(fluxes),
    )


@dataclass(frozen=True)
class BalanceResidual:
    """Truncated (or full) energy-balance bookkeeping over a trajectory."""

    q: int | None
    times: np.ndarray
    energy: np.ndarray
    dissipation: np.ndarray
    flux: np.ndarray
    interval_residual: np.ndarray
    cumulative_residual: np.ndarray

    def max_relative(self, scale: float | None = None) -> float:
        """Largest cumulative residual relative to the initial energy term."""
        ref = self.energy[0] if scale is None else scale
        if ref == 0.0:
            return float(np.max(self.cumulative_residual))
        return float(np.max(self.cumulative_residual) / ref)


def _balance(trajectory, q: int | None) -> BalanceResidual:
    times, energy, diss, flux = _balance_terms(trajectory, q)
    if times.size < 2:
        raise ValueError("balance needs at least 2 snapshots")
    rhs_rate = -diss + flux
    dt = np.diff(times)
    increments = 0.5 * dt * (rhs_rate[1:] + rhs_rate[:-1])
    interval = np.abs(np.diff(energy) - increments)
    cumulative = np.abs(energy - (energy[0] + np.concatenate([[0.0], np.cumsum(increments)])))
    return BalanceResidual(
        q=q,
        times=times,
        energy=energy,
        dissipation=diss,
        flux=flux,
        interval_residual=interval,
        cumulative_residual=cumulative,
    )


def truncated_balance(trajectory, q: int) -> BalanceResidual:
    """Residuals of the halved truncated balance at shell q, with the time
    integral by trapezoid over the snapshots."""
    return _balance(trajectory, q)


def energy_balance_residual(trajectory) -> BalanceResidual:
    """Residuals of the full balance ||u(t)||^2 + 2 nu int ||grad u||^2
    = ||u(t0)||^2 (un-halved convention, no truncation)."""
    return _balance(trajectory, None)


def flux_time_integrals(trajectory, q_range=None) -> tuple[np.ndarray, np.ndarray]:
    """(q values, trapezoid integral of |flux(q)| over the trajectory).

    A trend report: decay under q refinement is the observable stand-in
    for the vanishing-flux limit, which no finite computation can settle.
    """
    snaps = list(trajectory.iter_snapshots())
    if len(snaps) < 2:
        raise ValueError("need at least 2 snapshots")
    grid = snaps[0][1].grid
    if q_range is None:
        q_range = range(0, shell_count(grid) + 1)
    qs = np.array(list(q_range))
    times = np.array([t for t, _ in snaps])
    values = np.empty((len(snaps), qs.size))
    for i, (_, fld) in enumerate(snaps):
        that = _padded_tensor_hat(fld)
        for j, q in enumerate(qs):
            values[i, j] = abs(energy_flux(fld, int(q), _tensor_hat=that))
    integrals = np.trapezoid(values, times, axis=0)
    return qs, integrals


@dataclass(frozen=True)
class FluxReport:
    """Per-(time, shell) flux bookkeeping plus per-shell time integrals."""

    times: np.ndarray
    qs: np.ndarray
    flux: np.ndarray          # (n_times, n_q)
    dissipation: np.ndarray   # nu ||grad u_{<=q}||_2^2
    energy: np.ndarray        # 1/2 ||u_{<=q}||_2^2
    residual: np.ndarray      # cumulative truncated-balance residual
    int_abs_flux: np.ndarray  # per q


def flux_report(trajectory, q_range=None) -> FluxReport:
    snaps = list(trajectory.iter_snapshots())
    if len(snaps) < 2:
        raise ValueError("need at least 2 snapshots")
    grid = snaps[0][1].grid
    if q_range is None:
        q_range = range(0, shell_count(grid) + 1)
    qs = np.array(list(q_range))
    times = np.array([t for t, _ in snaps])
    n_t, n_q = times.size, qs.size
    flux = np.empty((n_t, n_q))
    diss = np.empty((n_t, n_q))
    energy = np.empty((n_t, n_q))
    for i, (_, fld) in enumerate(snaps):
        that = _padded_tensor_hat(fld)
        for j, q in enumerate(qs):
            low = low_pass(fld, int(q))
            flux[i, j] = energy_flux(fld, int(q), _tensor_hat=that)
            diss[i, j] = trajectory.nu * grad_l2_norm_sq(low)
            energy[i, j] = 0.5 * l2_norm_sq(low)
    dt = np.diff(times)[:, None]
    increments = 0.5 * dt * ((-diss + flux)[1:] + (-diss + flux)[:-1])
    cumulative = energy - (energy[0] + np.vstack([np.zeros(n_q), np.cumsum(increments, axis=0)]))
    residual = np.abs(cumulative)
    int_abs = np.trapezoid(np.abs(flux), times, axis=0)
    return FluxReport(
        times=times,
        qs=qs,
        flux=flux,
        dissipation=diss,
        energy=energy,
        residual=residual,
        int_abs_flux=int_abs,
    )


def write_flux_report_csv(report: FluxReport, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "q", "flux", "dissipation", "energy", "residual"])
        for i, t in enumerate(report.times):
            for j, q in enumerate(report.qs):
                writer.writerow(
                    [f"{t:.17g}", int(q)]
                    + [
                        f"{v:.17g}"
                        for v in (
                            report.flux[i, j],
                            report.dissipation[i, j],
                            report.energy[i, j],
                            report.residual[i, j],
                        )
                    ]
                )


def write_flux_summary_csv(report: FluxReport, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["q", "lambda_q", "int_abs_flux"])
        for j, q in enumerate(report.qs):
            writer.writerow(
                [int(q), f"{lambda_q(int(q)):.17g}", f"{report.int_abs_flux[j]:.17g}"]
            )
