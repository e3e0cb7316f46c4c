"""Synthetic divergence-free fields: smooth benchmarks, seeded random
band fields, and spatially concentrated (intermittent) shell fields.

All generators are deterministic in their seed and return fields that
satisfy the stored invariants exactly: conjugate symmetry, zero
divergence, zero coefficients outside the dealias cube.
"""

from __future__ import annotations

import math

import numpy as np

from .dyadic import lambda_q, low_pass, shell_count
from .heuristics import intermittency_estimate
from .spectral import (
    TWO_PI,
    Grid,
    VelocityField,
    dealias,
    from_physical,
    leray_project,
    lp_norm,
    to_physical,
    zero_field,
)

__all__ = [
    "taylor_green",
    "shear_mode",
    "random_divfree",
    "intermittent_field",
]


def taylor_green(grid: Grid, time: float | None = None) -> VelocityField:
    """u = (sin x1 cos x2 cos x3, -cos x1 sin x2 cos x3, 0).

    Exactly divergence-free, mean-free, band-limited to |k_i| <= 1, with
    energy ||u||_2^2 = (2pi)^3 / 4.
    """
    n = grid.n
    x = np.arange(n) * grid.spacing
    x1 = x[:, None, None]
    x2 = x[None, :, None]
    x3 = x[None, None, :]
    samples = np.empty((3, n, n, n))
    samples[0] = np.sin(x1) * np.cos(x2) * np.cos(x3)
    samples[1] = -np.cos(x1) * np.sin(x2) * np.cos(x3)
    samples[2] = 0.0
    return from_physical(grid, samples, time)


def shear_mode(grid: Grid, wavenumber: int = 3, amplitude: float = math.sqrt(2.0),
               time: float | None = None) -> VelocityField:
    """Single shear mode u = (0, amplitude * cos(wavenumber * x1), 0).

    The nonlinear term vanishes identically, so under viscosity nu the
    exact evolution is amplitude * exp(-nu * wavenumber^2 * t).
    """
    if not 1 <= wavenumber <= grid.kmax:
        raise ValueError(f"wavenumber {wavenumber} outside 1..{grid.kmax}")
    fld = zero_field(grid, time)
    fld.coeffs[1, wavenumber, 0, 0] = 0.5 * amplitude
    fld.coeffs[1, -wavenumber, 0, 0] = 0.5 * amplitude
    return fld


def _band_mask(grid: Grid, lo: float, hi: float, lo_inclusive: bool = False,
               hi_inclusive: bool = False) -> np.ndarray:
    """Lattice points with lo < |k| < hi inside the dealias cube."""
    knorm = grid.k_norm()
    lower = knorm >= lo if lo_inclusive else knorm > lo
    upper = knorm <= hi if hi_inclusive else knorm < hi
    return lower & upper & grid.dealias_mask()


def _random_band_coeffs(grid: Grid, mask: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Conjugate-symmetric random coefficients supported on the masked band."""
    n = grid.n
    phases = rng.standard_normal((3, n, n, n)) + 1j * rng.standard_normal((3, n, n, n))
    coeffs = np.where(mask[None], phases, 0.0)
    # symmetrize: u_hat(-k) = conj(u_hat(k)); the band excludes Nyquist rows
    flipped = coeffs[:, ::-1, ::-1, ::-1]
    flipped = np.roll(flipped, (1, 1, 1), axis=(1, 2, 3))
    return 0.5 * (coeffs + np.conj(flipped))


def random_divfree(grid: Grid, spectrum, seed: int) -> VelocityField:
    """Random divergence-free field with prescribed per-shell amplitudes.

    spectrum[q] is the target L^2 norm of the piece generated for shell q
    (q = 0, 1, ...).  Each piece is an independent random field supported
    on the lattice band (3/4) lambda_q < |k| < lambda_{q+1} (the full
    support of the shell-q multiplier, so decomposition spreads a bump at
    q into shells q-1..q+1), projected divergence-free and scaled so its
    own L^2 norm equals spectrum[q] exactly.  The pieces are summed;
    overlapping bands make the combined shell norms match the profile
    only up to the random cross terms.

    Deterministic in seed; raises if a nonzero amplitude is requested for
    a band with no representable lattice point.
    """
    spectrum = np.asarray(spectrum, dtype=np.float64)
    if spectrum.ndim != 1:
        raise ValueError("spectrum must be a 1-d sequence of shell amplitudes")
    if np.any(spectrum < 0):
        raise ValueError("shell amplitudes must be nonnegative")
    rng = np.random.default_rng(seed)
    total = np.zeros((3, grid.n, grid.n, grid.n), dtype=np.complex128)
    for q, amp in enumerate(spectrum):
        # draw per shell even when amp == 0 so seeds stay aligned
        mask = _band_mask(grid, 0.75 * lambda_q(q), lambda_q(q + 1))
        if amp == 0.0:
            continue
        if not mask.any():
            raise ValueError(
                f"shell {q} has no lattice support inside the dealias cutoff "
                f"kmax={grid.kmax}"
            )
        piece = leray_project(VelocityField(grid, _random_band_coeffs(grid, mask, rng)))
        norm = lp_norm(piece, 2)
        if norm == 0.0:
            raise ValueError(f"degenerate random draw for shell {q}")
        total += piece.coeffs * (amp / norm)
    return VelocityField(grid, total)


def _bump_profile(rho: np.ndarray) -> np.ndarray:
    """Smooth compactly supported bump: exp(1 - 1/(1 - rho^2)) for rho < 1."""
    out = np.zeros_like(rho)
    inside = rho < 1.0
    r2 = rho[inside] ** 2
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - r2))
    return out


def _bump_union_mask(grid: Grid, spikes_hat: np.ndarray, radius: float) -> np.ndarray:
    """min(1, sum of smooth bumps) on the grid, via FFT convolution of the
    centers' spike train with the radial bump kernel (periodic)."""
    import scipy.fft as _fft

    n = grid.n
    x = np.arange(n) * grid.spacing
    dist = np.minimum(x, TWO_PI - x)  # periodic distance to the origin
    rho = np.sqrt(
        dist[:, None, None] ** 2 + dist[None, :, None] ** 2 + dist[None, None, :] ** 2
    ) / radius
    kernel_hat = _fft.rfftn(_bump_profile(rho))
    mask = _fft.irfftn(spikes_hat * kernel_hat, s=(n, n, n))
    return np.clip(mask, 0.0, 1.0)


def _spike_train_hat(grid: Grid, centers: np.ndarray) -> np.ndarray:
    """rfftn of unit spikes at the centers rounded to grid cells."""
    import scipy.fft as _fft

    n = grid.n
    idx = np.mod(np.round(centers / grid.spacing).astype(int), n)
    spikes = np.zeros((n, n, n))
    np.add.at(spikes, (idx[:, 0], idx[:, 1], idx[:, 2]), 1.0)
    return _fft.rfftn(spikes)


def _carrier_mode(grid: Grid, q: int, rng: np.random.Generator) -> VelocityField:
    """Helical conjugate-pair mode with |k| on the shell-q plateau: |u(x)| const."""
    lo, hi = lambda_q(q), 1.5 * lambda_q(q)
    mask = _band_mask(grid, lo, hi, lo_inclusive=True, hi_inclusive=True)
    candidates = np.argwhere(mask)
    if candidates.size == 0:
        raise ValueError(f"shell {q} not representable on the grid (kmax={grid.kmax})")
    freqs = grid.wavenumbers()
    idx = candidates[rng.integers(len(candidates))]
    k = np.array([freqs[idx[0]], freqs[idx[1]], freqs[idx[2]]], dtype=np.float64)
    # orthonormal pair perpendicular to k
    ref = np.array([1.0, 0.0, 0.0]) if abs(k[0]) < max(abs(k[1]), abs(k[2])) else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(k, ref)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(k, e1)
    e2 /= np.linalg.norm(e2)
    theta = rng.uniform(0.0, TWO_PI)
    pol = (math.cos(theta) * e1 + math.sin(theta) * e2) + 1j * (
        -math.sin(theta) * e1 + math.cos(theta) * e2
    )
    fld = zero_field(grid)
    fld.coeffs[:, idx[0], idx[1], idx[2]] = pol
    fld.coeffs[:, -idx[0] % grid.n, -idx[1] % grid.n, -idx[2] % grid.n] = np.conj(pol)
    return fld


def _band_limit_to_shells(fld: VelocityField, q: int) -> VelocityField:
    """Hard truncation to lattice modes whose shells are exactly q-1..q+1."""
    lo = lambda_q(q - 1)
    hi = 0.75 * lambda_q(q + 2)
    mask = _band_mask(fld.grid, lo, hi, lo_inclusive=True, hi_inclusive=True)
    return fld.with_coeffs(fld.coeffs * mask[None])


def _lattice_centers(m_per_axis: int, count: int, rng: np.random.Generator,
                     jitter: float) -> np.ndarray:
    """count bump centers on a jittered m^3 lattice over [0, 2pi)^3."""
    cell = TWO_PI / m_per_axis
    ix = np.arange(m_per_axis)
    gx, gy, gz = np.meshgrid(ix, ix, ix, indexing="ij")
    pts = np.stack([gx, gy, gz], axis=-1).reshape(-1, 3).astype(np.float64)
    pts = (pts + 0.5) * cell
    pts += rng.uniform(0.0, cell, size=3)[None, :]  # global offset
    if jitter > 0:
        pts += rng.uniform(-jitter, jitter, size=pts.shape)
    order = rng.permutation(len(pts))
    return np.mod(pts[order[:count]], TWO_PI)


def _build_concentrated(grid: Grid, q: int, radius: float, spikes_hat: np.ndarray,
                        carrier_samples: np.ndarray) -> VelocityField:
    mask = _bump_union_mask(grid, spikes_hat, radius)
    fld = from_physical(grid, carrier_samples * mask[None])
    fld = _band_limit_to_shells(dealias(fld), q)
    fld = leray_project(fld)
    norm = lp_norm(fld, 2)
    if norm == 0.0:
        raise ValueError("concentration construction collapsed to zero")
    return fld.with_coeffs(fld.coeffs / norm)


def intermittent_field(grid: Grid, q: int, d: float, seed: int) -> VelocityField:
    """Divergence-free field of unit L^2 norm, spectrally supported in
    shells q-1..q+1, concentrated on ~lambda_q^{d-3} of the volume.

    A helical carrier mode on the shell-q plateau is multiplied by a
    union of ceil(lambda_q^d) smooth bumps on a jittered lattice, then
    band-limited and projected.  Because the band limitation smears sharp
    bumps, the bump radius is calibrated by bisection against the
    concentration estimator until the field reports dimension d at shell
    q (or the closest value the band allows).  Deterministic in seed.
    """
    if not 0.0 <= d <= 3.0:
        raise ValueError(f"intermittency dimension must be in [0, 3], got {d}")
    big_q = shell_count(grid)
    if not 1 <= q <= big_q - 1:
        raise ValueError(f"shell index {q} outside 1..{big_q - 1}")
    lam = lambda_q(q)
    rng = np.random.default_rng(seed)
    carrier_samples = to_physical(_carrier_mode(grid, q, rng))
    count = int(math.ceil(lam**d))
    m_per_axis = max(1, int(round(count ** (1.0 / 3.0))))
    while m_per_axis**3 < count:
        m_per_axis += 1
    cell = TWO_PI / m_per_axis
    # nominal radius from the volume-fraction target, then bisect on a
    # multiplicative factor; the estimator itself is the oracle
    vol_target = TWO_PI**3 * lam ** (d - 3.0)
    r_nominal = (vol_target / count * 3.0 / (4.0 * math.pi)) ** (1.0 / 3.0)
    jitter = max(0.0, 0.5 * (cell - 2.0 * r_nominal)) * 0.5
    centers = _lattice_centers(m_per_axis, count, rng, jitter)
    spikes_hat = _spike_train_hat(grid, centers)

    def realized(factor: float) -> tuple[float, VelocityField]:
        fld = _build_concentrated(grid, q, factor * r_nominal, spikes_hat, carrier_samples)
        return intermittency_estimate(fld, q, clip=False), fld

    lo_f, hi_f = 0.25, 8.0
    d_lo, fld_lo = realized(lo_f)
    d_hi, fld_hi = realized(hi_f)
    if d <= d_lo:
        return fld_lo
    if d >= d_hi:
        return fld_hi
    best = fld_lo
    for _ in range(24):
        mid = math.sqrt(lo_f * hi_f)
        d_mid, best = realized(mid)
        if abs(d_mid - d) < 0.01:
            break
        if d_mid < d:
            lo_f = mid
        else:
            hi_f = mid
    return best
