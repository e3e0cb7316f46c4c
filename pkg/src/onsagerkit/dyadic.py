"""Littlewood-Paley machinery: smooth dyadic cutoffs, shell projections,
Besov norms, and the frequency-localized norm-inequality diagnostic.

The radial cutoff chi is 1 on [0, 3/4], 0 on [1, inf), and joins the two
plateaus with the classical exp(-1/s) partition bump, so every multiplier
here is C-infinity in the frequency variable.  Dyadic scales are
lambda_q = 2^q; shell q >= 0 carries the multiplier

    phi_q(xi) = chi(xi / lambda_{q+1}) - chi(xi / lambda_q),

and shell q = -1 carries chi itself (on the integer lattice that is the
mean mode).  The telescoping identity

    chi(xi) + sum_{r=0..q} phi_r(xi) = chi(xi / lambda_{q+1})

is exact up to float cancellation and is what makes reconstruction and
low-pass consistency essentially exact.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .spectral import Grid, VelocityField, lp_norm

__all__ = [
    "CutoffProfile",
    "DyadicShells",
    "BesovSpec",
    "cutoff_eval",
    "phi_q_eval",
    "lambda_q",
    "shell_count",
    "shell_project",
    "decompose",
    "low_pass",
    "besov_norm",
    "bernstein_check",
    "write_shell_spectrum",
]


def lambda_q(q: int | np.ndarray) -> float | np.ndarray:
    """The dyadic number 2^q."""
    return 2.0 ** np.asarray(q, dtype=np.float64) if isinstance(q, np.ndarray) else 2.0**q


def _bump(s: np.ndarray) -> np.ndarray:
    """exp(-1/s) for s > 0, 0 otherwise; the standard smooth junction."""
    out = np.zeros_like(s)
    pos = s > 0.0
    out[pos] = np.exp(-1.0 / s[pos])
    return out


@dataclass(frozen=True)
class CutoffProfile:
    """Radial low-pass profile: 1 on [0, 3/4], 0 on [1, inf), smooth between.

    plateau_end and support_end are fixed by the shell conventions used
    throughout; they are fields only so the profile is self-describing.
    """

    plateau_end: float = 0.75
    support_end: float = 1.0

    def __call__(self, xi) -> np.ndarray | float:
        x = np.asarray(xi, dtype=np.float64)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        if np.any(x < 0.0):
            raise ValueError("cutoff argument must be nonnegative")
        s = (x - self.plateau_end) / (self.support_end - self.plateau_end)
        g1 = _bump(1.0 - s)
        g0 = _bump(s)
        with np.errstate(invalid="ignore"):
            mid = g1 / np.where(g0 + g1 == 0.0, 1.0, g0 + g1)
        out = np.where(s <= 0.0, 1.0, np.where(s >= 1.0, 0.0, mid))
        return float(out[0]) if scalar else out.reshape(np.shape(xi))


DEFAULT_CUTOFF = CutoffProfile()


def cutoff_eval(profile: CutoffProfile, xi) -> np.ndarray | float:
    """chi(xi)."""
    return profile(xi)


def phi_q_eval(profile: CutoffProfile, q: int, xi) -> np.ndarray | float:
    """phi_q(xi) = chi(xi / lambda_{q+1}) - chi(xi / lambda_q), q >= 0."""
    if q < 0:
        raise ValueError(f"phi_q is defined for q >= 0, got q={q}")
    x = np.asarray(xi, dtype=np.float64)
    if np.any(x < 0.0):
        raise ValueError("cutoff argument must be nonnegative")
    return profile(x / lambda_q(q + 1)) - profile(x / lambda_q(q))


def shell_count(grid: Grid) -> int:
    """Largest shell index Q = ceil(log2(kmax)) + 1 kept for the grid."""
    return math.ceil(math.log2(grid.kmax)) + 1


@lru_cache(maxsize=None)
def _shell_multipliers(grid: Grid) -> np.ndarray:
    """Multiplier bank, shape (Q + 2, n, n, n); index 0 is shell q = -1."""
    knorm = grid.k_norm()
    big_q = shell_count(grid)
    bank = np.empty((big_q + 2, grid.n, grid.n, grid.n))
    bank[0] = DEFAULT_CUTOFF(knorm)
    for q in range(big_q + 1):
        bank[q + 1] = DEFAULT_CUTOFF(knorm / lambda_q(q + 1)) - DEFAULT_CUTOFF(
            knorm / lambda_q(q)
        )
    return bank


@lru_cache(maxsize=None)
def _lowpass_multiplier(grid: Grid, q: int) -> np.ndarray:
    return np.asarray(DEFAULT_CUTOFF(grid.k_norm() / lambda_q(q + 1)))


@dataclass(frozen=True)
class BesovSpec:
    """Besov space parameters (s, p, q): lambda_r^s-weighted L^p shell
    norms aggregated in l^q over the shells."""

    s: float
    p: float
    q: float

    def __post_init__(self) -> None:
        if self.p < 1 or self.q < 1:
            raise ValueError(f"Besov integrability exponents must be >= 1, got {self}")


@dataclass(frozen=True)
class DyadicShells:
    """The family u_q, q = -1..Q, with sum_q u_q = u on dealiased fields."""

    base: VelocityField
    shells: tuple[VelocityField, ...]

    @property
    def q_range(self) -> range:
        return range(-1, len(self.shells) - 1)

    def shell(self, q: int) -> VelocityField:
        return self.shells[q + 1]

    def lambdas(self) -> np.ndarray:
        return 2.0 ** np.arange(-1, len(self.shells) - 1, dtype=np.float64)


def shell_project(fld: VelocityField, q: int) -> VelocityField:
    """Frequency shell u_q: multiplier phi_q(|k|) (q >= 0) or chi(|k|) (q = -1)."""
    big_q = shell_count(fld.grid)
    if not -1 <= q <= big_q:
        raise ValueError(f"shell index {q} outside -1..{big_q}")
    mult = _shell_multipliers(fld.grid)[q + 1]
    return fld.with_coeffs(fld.coeffs * mult)


def decompose(fld: VelocityField) -> DyadicShells:
    """All shells of the field; reconstruction sum_q u_q = u is exact on
    the dealiased support up to float cancellation."""
    bank = _shell_multipliers(fld.grid)
    shells = tuple(fld.with_coeffs(fld.coeffs * bank[i]) for i in range(bank.shape[0]))
    return DyadicShells(base=fld, shells=shells)


def low_pass(fld: VelocityField, q: int) -> VelocityField:
    """u_{<=q} = sum_{r<=q} u_r, realized as the multiplier chi(|k|/lambda_{q+1})."""
    if q < -1:
        raise ValueError(f"low-pass index must be >= -1, got {q}")
    big_q = shell_count(fld.grid)
    if q >= big_q:
        return fld.with_coeffs(fld.coeffs.copy())
    return fld.with_coeffs(fld.coeffs * _lowpass_multiplier(fld.grid, q))


def shell_lp_norms(shells: DyadicShells, p: float) -> np.ndarray:
    """||u_r||_p for r = -1..Q as one array."""
    return np.array([lp_norm(s, p) for s in shells.shells])


def besov_norm(fld: VelocityField, spec: BesovSpec) -> float:
    """l^q aggregation over shells of lambda_r^s ||u_r||_p.

    The q = -1 block enters with weight 1 (a convention; irrelevant for
    s = 0 and for mean-free fields).
    """
    shells = decompose(fld)
    norms = shell_lp_norms(shells, spec.p)
    weights = shells.lambdas() ** spec.s
    weights[0] = 1.0
    terms = weights * norms
    if math.isinf(spec.q):
        return float(terms.max()) if terms.size else 0.0
    return float(np.sum(terms**spec.q) ** (1.0 / spec.q))


def bernstein_check(fld: VelocityField, q: int, s: float, r: float) -> float:
    """Ratio ||u_q||_r / (lambda_q^{3(1/s - 1/r)} ||u_q||_s) for a single-shell field.

    The caller supplies the shell already isolated; q only sets lambda_q.
    Returns NaN for a zero shell (no ratio to measure).
    """
    if r < s:
        raise ValueError(f"need r >= s, got s={s}, r={r}")
    norm_s = lp_norm(fld, s)
    if norm_s == 0.0:
        return math.nan
    inv_s = 0.0 if math.isinf(s) else 1.0 / s
    inv_r = 0.0 if math.isinf(r) else 1.0 / r
    return lp_norm(fld, r) / (lambda_q(q) ** (3.0 * (inv_s - inv_r)) * norm_s)


def write_shell_spectrum(fld: VelocityField, path, p: float = 4.0) -> None:
    """CSV of per-shell norms: q, lambda_q, ||u_q||_2, ||u_q||_3, ||u_q||_p, ||u_q||_inf."""
    shells = decompose(fld)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["q", "lambda_q", "l2", "l3", f"l{p:g}", "linf"])
        for q in shells.q_range:
            sh = shells.shell(q)
            writer.writerow(
                [q, f"{lambda_q(q):.17g}"]
                + [f"{lp_norm(sh, e):.17g}" for e in (2.0, 3.0, p, math.inf)]
            )
