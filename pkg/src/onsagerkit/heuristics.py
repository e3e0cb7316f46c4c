"""Back-of-envelope intermittency machinery: the blow-up exponent algebra,
worst-dimension logic, the dyadic cascade model, and the intermittency
dimension estimator.

The cascade is a deliberately crude model: all energy sits in one dyadic
shell, hops to the next at rate Energy/Flux with Flux = lambda^{(5-d)/2}
E^{3/2}, and the energy stays of order one across shells.  Nothing here
claims to track real dynamics; it reproduces scaling exponents only.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._rational import as_rational, from_reciprocal, is_infinite, reciprocal
from .dyadic import lambda_q, shell_project
from .spectral import TWO_PI, VelocityField, lp_norm

WORST_ZERO = "0"
WORST_ONE_MINUS = "one-minus"

# ||u||_inf / ||u||_2 of a single conjugate-pair Fourier mode with aligned
# phases; the full-volume reference point of the estimator (d = 3).
FULL_VOLUME_RATIO = math.sqrt(2.0) / TWO_PI**1.5


def f_exponent(alpha, p, d) -> Fraction | float:
    """Blow-up exponent f(alpha, p, d) = (2 alpha + (1 - 2/p)(3 - d)) / (d - 5).

    Exact when the inputs are exact; p = inf is allowed.
    """
    dv = float(d)
    if not 0.0 <= dv <= 3.0:
        raise ValueError(f"intermittency dimension must be in [0, 3], got {d}")
    if float(p) < 1:
        raise ValueError(f"need p >= 1, got {p}")
    try:
        ip = reciprocal(p)
        a = as_rational(alpha)
        dd = as_rational(d)
        return (2 * a + (1 - 2 * ip) * (3 - dd)) / (dd - 5)
    except (TypeError, ValueError):
        ipf = 0.0 if is_infinite(p) else 1.0 / float(p)
        return (2.0 * float(alpha) + (1.0 - 2.0 * ipf) * (3.0 - dv)) / (dv - 5.0)


def worst_d(alpha, p) -> str:
    """Which intermittency dimension lets the norm blow up slowest.

    "0" when alpha > 1 - 2/p, "one-minus" when alpha <= 1 - 2/p (on the
    boundary f is d-independent and the label follows the optimal_beta
    branch convention).
    """
    if float(p) < 1:
        raise ValueError(f"need p >= 1, got {p}")
    ip = reciprocal(p)
    a = as_rational(alpha)
    return WORST_ZERO if a > 1 - 2 * ip else WORST_ONE_MINUS


def optimal_beta(alpha, p) -> Fraction | float:
    """Best time-integrability exponent beta = -1/f at the worst dimension.

    1/beta = alpha/2 + 1/2 - 1/p          for alpha <= 1 - 2/p,
    1/beta = (2/5) alpha + 3/5 - 6/(5p)   for alpha >  1 - 2/p.

    Returns inf when 1/beta = 0.  The two branches agree on the split line.
    """
    if float(p) < 1:
        raise ValueError(f"need p >= 1, got {p}")
    ip = reciprocal(p)
    a = as_rational(alpha)
    if a <= 1 - 2 * ip:
        inv_beta = a / 2 + Fraction(1, 2) - ip
    else:
        inv_beta = Fraction(2, 5) * a + Fraction(3, 5) - Fraction(6, 5) * ip
    if inv_beta < 0:
        raise ValueError(f"optimal 1/beta is negative for alpha={alpha}, p={p}")
    return from_reciprocal(inv_beta)


def linear_vs_nonlinear(lam: float, energy: float, d: float) -> tuple[float, float]:
    """Heuristic sizes (L, N) = (lambda^2 E, lambda^{(5-d)/2} E^{3/2})."""
    if lam < 1:
        raise ValueError(f"need lambda >= 1, got {lam}")
    if energy <= 0:
        raise ValueError(f"need positive energy, got {energy}")
    return lam**2 * energy, lam ** ((5.0 - d) / 2.0) * energy**1.5


@dataclass(frozen=True)
class CascadeRun:
    """Scaling history of the single-shell cascade model."""

    d: float
    e0: float
    alpha: float
    p: float
    shell_index: np.ndarray
    lambdas: np.ndarray
    transfer_time: np.ndarray
    arrival_time: np.ndarray
    remaining_time: np.ndarray
    h_norm: np.ndarray
    besov_norm: np.ndarray
    enstrophy_partial: np.ndarray
    blowup_time: float
    enstrophy_diverges: bool


def cascade_simulate(
    d: float,
    e0: float = 1.0,
    start_shell: int = 0,
    n_shells: int = 40,
    alpha: float = 1.0,
    p: float = 2.0,
) -> CascadeRun:
    """Run the shell-hopping cascade: T_n = E/(lambda_n^{(5-d)/2} E^{3/2}).

    The blow-up time is the closed geometric sum over all shells >= the
    start, so remaining_time is exact.  Norm histories carry the scaling
    lambda^alpha sqrt(E) (Sobolev) and lambda^{alpha+(1-2/p)(3-d)/2} sqrt(E)
    (Besov); the enstrophy column accumulates lambda_n^2 E T_n.
    """
    if not 0.0 <= d < 3.0:
        raise ValueError(f"cascade requires 0 <= d < 3, got {d}")
    if e0 <= 0:
        raise ValueError(f"need positive initial energy, got {e0}")
    if n_shells < 2:
        raise ValueError("need at least 2 shells")
    n = np.arange(start_shell, start_shell + n_shells)
    lam = 2.0**n
    rate_exp = (5.0 - d) / 2.0
    transfer = e0**-0.5 * lam**-rate_exp
    # remaining time to blow-up as the exact geometric tail sum_{m>=n} T_m
    # (subtracting cumulative from total would cancel catastrophically)
    remaining = transfer / (1.0 - 2.0**-rate_exp)
    blowup = float(remaining[0])
    arrival = blowup - remaining
    ipf = 0.0 if is_infinite(p) else 1.0 / float(p)
    h_norm = lam**alpha * math.sqrt(e0)
    besov = lam ** (alpha + (1.0 - 2.0 * ipf) * (3.0 - d) / 2.0) * math.sqrt(e0)
    enstrophy_inc = lam**2 * e0 * transfer
    enstrophy = np.cumsum(enstrophy_inc)
    diverges = bool(enstrophy_inc[-1] >= enstrophy_inc[-2] * (1.0 - 1e-12))
    return CascadeRun(
        d=d,
        e0=e0,
        alpha=alpha,
        p=p,
        shell_index=n,
        lambdas=lam,
        transfer_time=transfer,
        arrival_time=arrival,
        remaining_time=remaining,
        h_norm=h_norm,
        besov_norm=besov,
        enstrophy_partial=enstrophy,
        blowup_time=blowup,
        enstrophy_diverges=diverges,
    )


def fit_loglog_slope(x: np.ndarray, y: np.ndarray, tail: int = 10) -> float:
    """Least-squares slope of log y against log x over the last `tail` points."""
    x = np.asarray(x, dtype=np.float64)[-tail:]
    y = np.asarray(y, dtype=np.float64)[-tail:]
    if x.size < 2:
        raise ValueError("need at least 2 points for a slope")
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def intermittency_estimate(fld: VelocityField, q: int, clip: bool = True) -> float:
    """Effective dimension of the set carrying shell q's energy.

    Derived from the concentration ratio ||u_q||_inf / ||u_q||_2 against
    the full-volume single-mode baseline: a field spread over the whole
    torus reports d = 3, a field packed into lambda_q^{-3} of the volume
    reports d = 0.  Scale-invariant.  Raises on a zero shell.
    """
    uq = shell_project(fld, q)
    norm2 = lp_norm(uq, 2)
    if norm2 == 0.0:
        raise ValueError(f"shell {q} is empty; intermittency undefined")
    ratio = lp_norm(uq, math.inf) / norm2
    d = 3.0 - 2.0 * math.log(ratio / FULL_VOLUME_RATIO) / math.log(lambda_q(q))
    if clip:
        return float(min(3.0, max(0.0, d)))
    return float(d)


def write_cascade_csv(run: CascadeRun, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "n",
                "lambda_n",
                "T_n",
                "cumulative_t",
                "remaining_t",
                "H_alpha_norm",
                "Besov_norm",
                "enstrophy_partial_sum",
            ]
        )
        for i in range(run.shell_index.size):
            writer.writerow(
                [run.shell_index[i]]
                + [
                    f"{v:.17g}"
                    for v in (
                        run.lambdas[i],
                        run.transfer_time[i],
                        run.arrival_time[i],
                        run.remaining_time[i],
                        run.h_norm[i],
                        run.besov_norm[i],
                        run.enstrophy_partial[i],
                    )
                ]
            )
