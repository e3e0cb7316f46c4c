"""The (beta, p, alpha) landscape: minimal spatial-regularity formulas,
the interpolation derivation behind them, region classification, and the
hypothesis checkers that bundle a parameter gate with a measured
trajectory norm.

All region and boundary logic runs in exact rational arithmetic (the
boundaries are rational lines and adjacent branch formulas must agree
exactly there); floats only enter through measured norms.  Infinite
exponents are handled via reciprocals, 1/inf = 0.

A passing verdict means "the parameter hypotheses hold and the sampled
norm is finite at this resolution" -- the energy-equality conclusion is a
label attached to the criterion, never a claim verified from samples.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._rational import as_rational, from_reciprocal, reciprocal
from .dyadic import BesovSpec
from .timenorms import NormSeries, TimeSpaceSpec, membership

__all__ = [
    "RegionPoint",
    "CriterionSpec",
    "CriterionVerdict",
    "REGION_LABELS",
    "minimal_alpha",
    "minimal_alpha_via_interpolation",
    "classify_region",
    "criterion_spec",
    "check_weak_onsager",
    "check_type2",
    "check_classical",
    "type1_derive",
    "check_type1_rate",
    "rates_compare",
    "write_regions_csv",
]

REGION_LABELS = (
    "classical-1",
    "classical-2",
    "classical-3",
    "theorem-1.1-improved",
    "theorem-1.3-extended",
    "outside",
)


@dataclass(frozen=True)
class RegionPoint:
    """A (1/beta, 1/p) point with its region label and minimal alpha."""

    inv_beta: Fraction
    inv_p: Fraction
    label: str
    minimal_alpha: Fraction | None

    def __post_init__(self) -> None:
        if self.inv_beta < 0 or self.inv_p < 0:
            raise ValueError("reciprocal exponents must be nonnegative")
        if self.label not in REGION_LABELS:
            raise ValueError(f"unknown region label {self.label!r}")
        if self.label != "outside" and not 0 <= self.inv_p <= 1:
            raise ValueError("1/p must lie in [0, 1] for classified points")


def _invs(beta, p) -> tuple[Fraction, Fraction]:
    ib = reciprocal(beta)
    ip = reciprocal(p)
    if ib < 0 or ip < 0:
        raise ValueError(f"exponents must be positive, got beta={beta}, p={p}")
    return ib, ip


def minimal_alpha(beta, p) -> Fraction:
    """Minimal spatial regularity exponent, exact piecewise form:

        2/beta + 2/p - 1        beta >= 3, p >= beta
        1/beta + 3/p - 1        beta >= 3, p <= beta
        5/(2 beta) + 3/p - 3/2  beta <= 3, 1/beta + 2/p >= 1
        2/beta + 2/p - 1        beta <= 3, 1/beta + 2/p <= 1

    Adjacent branches agree on every shared boundary.
    """
    ib, ip = _invs(beta, p)
    if ip > 1:
        raise ValueError(f"need p >= 1, got p={p}")
    if ib <= Fraction(1, 3):  # beta >= 3
        if ip <= ib:  # p >= beta
            return 2 * ib + 2 * ip - 1
        return ib + 3 * ip - 1
    # beta <= 3 (the beta == math.inf case lands above)
    if ib + 2 * ip >= 1:
        return Fraction(5, 2) * ib + 3 * ip - Fraction(3, 2)
    return 2 * ib + 2 * ip - 1


# constraint labels for the interpolation route, in reporting precedence
_CONSTRAINTS = ("3/beta", "3-6/beta", "3-6/p")


def minimal_alpha_via_interpolation(beta, p) -> tuple[Fraction, str]:
    """Minimal alpha by minimizing (3/p + 2/beta - 3/2) + 1/(6x) subject to
    1/x >= max(3 - 6/p, 3 - 6/beta, 3/beta).

    Exact-rationally equal to minimal_alpha wherever defined.  The second
    return value names the active constraint.  Requires beta >= 1: the
    time-interpolation step needs a normed L^beta, so the map is
    undefined below beta = 1.
    """
    ib, ip = _invs(beta, p)
    if ib > 1:
        raise ValueError(
            f"interpolation route needs beta >= 1 (normed time space), got beta={beta}"
        )
    if ip > 1:
        raise ValueError(f"need p >= 1, got p={p}")
    bounds = {
        "3/beta": 3 * ib,
        "3-6/beta": 3 - 6 * ib,
        "3-6/p": 3 - 6 * ip,
    }
    inv_x = max(bounds.values())
    if inv_x <= 0:
        raise ValueError(f"infeasible interpolation weights for beta={beta}, p={p}")
    active = next(name for name in _CONSTRAINTS if bounds[name] == inv_x)
    alpha = (3 * ip + 2 * ib - Fraction(3, 2)) + inv_x / 6
    return alpha, active


def classify_region(beta, p) -> RegionPoint:
    """Assign the point to the strongest criterion that covers it.

    Precedence: the weak-in-time improvement where it applies (strict
    gates 1 <= beta < p and 2/p + 1/beta < 1), then the beta < 1
    extension (2/p + 1/beta >= 1 with beta below the normed range), then
    the three classical cells with their printed closed boundaries.
    Points with p < 1 fall outside every criterion.
    """
    ib, ip = _invs(beta, p)
    alpha = minimal_alpha(beta, p) if ip <= 1 else None
    if ip <= 1:
        if ib <= 1 and 2 * ip + ib < 1 and ip < ib:
            # 1 <= beta < p and 2/p + 1/beta < 1
            return RegionPoint(ib, ip, "theorem-1.1-improved", alpha)
        if ib > 1:
            # 0 < beta < 1 (2/p + 1/beta >= 1 is then automatic)
            return RegionPoint(ib, ip, "theorem-1.3-extended", alpha)
        if ib + 2 * ip <= 1 and ip <= ib:
            return RegionPoint(ib, ip, "classical-1", alpha)
        if ib + 2 * ip >= 1 and Fraction(1, 3) <= ib <= 1:
            return RegionPoint(ib, ip, "classical-2", alpha)
        if ib <= Fraction(1, 3) and ib <= ip:
            return RegionPoint(ib, ip, "classical-3", alpha)
    return RegionPoint(ib, ip, "outside", alpha)


@dataclass(frozen=True)
class CriterionSpec:
    """A named (beta, p) condition: parameter gates plus the time-space
    class whose norm witnesses it."""

    criterion_id: str
    beta: float
    p: float
    weak: bool
    besov: BesovSpec
    hypotheses: dict[str, bool]

    @property
    def hypotheses_ok(self) -> bool:
        return all(self.hypotheses.values())


@dataclass(frozen=True)
class CriterionVerdict:
    """Outcome of testing a trajectory against a criterion."""

    criterion_id: str
    hypotheses: dict[str, bool]
    hypotheses_ok: bool
    norm_value: float | None
    norm_finite: bool
    margin: float
    satisfied: bool


def _besov_exponent(criterion_id: str, ib: Fraction, ip: Fraction) -> Fraction:
    if criterion_id in ("theorem-1.1", "classical-1"):
        return 2 * ib + 2 * ip - 1
    if criterion_id in ("theorem-1.3", "classical-2"):
        return Fraction(5, 2) * ib + 3 * ip - Fraction(3, 2)
    if criterion_id == "classical-3":
        return ib + 3 * ip - 1
    raise ValueError(f"unknown criterion {criterion_id!r}")


def criterion_spec(criterion_id: str, beta, p) -> CriterionSpec:
    """Parameter gates and witness space for one named criterion.

    theorem-1.1 carries two gates for the time exponent: the theorem's
    own "beta >= 1" and the weaker "beta > 0" under which the flux trend
    alone is still meaningful; both are reported.
    """
    ib, ip = _invs(beta, p)
    if ip > 1:
        raise ValueError(f"need p >= 1, got p={p}")
    s = _besov_exponent(criterion_id, ib, ip)
    weak = criterion_id == "theorem-1.1"
    if criterion_id == "theorem-1.1":
        hypotheses = {
            "beta >= 1": ib <= 1,
            "beta < p": ip < ib,
            "2/p + 1/beta < 1": 2 * ip + ib < 1,
            "flux-trend gate p > beta > 0": ip < ib,
        }
    elif criterion_id == "theorem-1.3":
        hypotheses = {
            "p >= 1": ip <= 1,
            "0 < beta <= 3": ib >= Fraction(1, 3),
            "2/p + 1/beta >= 1": 2 * ip + ib >= 1,
        }
    elif criterion_id == "classical-1":
        hypotheses = {
            "1/beta + 2/p <= 1": ib + 2 * ip <= 1,
            "p >= beta": ip <= ib,
        }
    elif criterion_id == "classical-2":
        hypotheses = {
            "1/beta + 2/p >= 1": ib + 2 * ip >= 1,
            "1 <= beta <= 3": Fraction(1, 3) <= ib <= 1,
        }
    elif criterion_id == "classical-3":
        hypotheses = {
            "beta >= 3": ib <= Fraction(1, 3),
            "1 <= p <= beta": ip >= ib,
        }
    else:
        raise ValueError(f"unknown criterion {criterion_id!r}")
    return CriterionSpec(
        criterion_id=criterion_id,
        beta=float(from_reciprocal(ib)),
        p=float(from_reciprocal(ip)),
        weak=weak,
        besov=BesovSpec(s=float(s), p=float(from_reciprocal(ip)), q=math.inf),
        hypotheses=hypotheses,
    )


def _boundary_margin(criterion_id: str, beta, p) -> Fraction:
    """Signed distance of 2/p + 1/beta from the unit line, oriented so
    positive means strictly inside the criterion's region."""
    ib, ip = _invs(beta, p)
    gap = 2 * ip + ib - 1
    return -gap if criterion_id in ("theorem-1.1", "classical-1") else gap


def _check(trajectory, criterion_id: str, beta, p) -> CriterionVerdict:
    spec = criterion_spec(criterion_id, beta, p)
    result = membership(
        trajectory, TimeSpaceSpec(beta=spec.beta, weak=spec.weak, besov=spec.besov)
    )
    return CriterionVerdict(
        criterion_id=criterion_id,
        hypotheses=spec.hypotheses,
        hypotheses_ok=spec.hypotheses_ok,
        norm_value=result.value,
        norm_finite=result.finite_at_resolution,
        margin=float(_boundary_margin(criterion_id, beta, p)),
        satisfied=spec.hypotheses_ok and result.finite_at_resolution,
    )


def check_weak_onsager(trajectory, beta, p) -> CriterionVerdict:
    """Weak-in-time condition: u in weak-L^beta of B^{2/beta+2/p-1}_{p,inf},
    gated by 1 <= beta < p and 2/p + 1/beta < 1 (strict)."""
    return _check(trajectory, "theorem-1.1", beta, p)


def check_type2(trajectory, beta, p) -> CriterionVerdict:
    """Strong-in-time condition on B^{5/(2 beta)+3/p-3/2}_{p,inf}, gated by
    1 <= p, 0 < beta <= 3, 2/p + 1/beta >= 1; quasinorm path for beta < 1."""
    return _check(trajectory, "theorem-1.3", beta, p)


def check_classical(trajectory, which: int, beta, p) -> CriterionVerdict:
    """Classical cells 1..3 with their printed closed boundaries."""
    if which not in (1, 2, 3):
        raise ValueError(f"classical criterion index must be 1..3, got {which}")
    return _check(trajectory, f"classical-{which}", beta, p)


def type1_derive(p) -> tuple[Fraction | float, Fraction, Fraction]:
    """Parameters of the self-similar-rate pipeline for p > 4:

    beta = 2p/(p-2), alpha = 2/beta + 2/p - 1 (identically 0), and the
    rate exponent theta = 1/2 - 1/p (= 1/beta).  The derived (beta, p)
    always satisfies the weak-in-time gates: beta < p iff p > 4 and
    2/p + 1/beta = 1/2 + 1/p < 1.
    """
    ip = reciprocal(p)
    if not ip < Fraction(1, 4):
        raise ValueError(f"rate pipeline requires p > 4, got p={p}")
    inv_beta = Fraction(1, 2) - ip
    beta = from_reciprocal(inv_beta)
    alpha = 2 * inv_beta + 2 * ip - 1
    assert alpha == 0
    theta = Fraction(1, 2) - ip
    return beta, alpha, theta


def check_type1_rate(series: NormSeries, big_t: float, p,
                     threshold: float = math.inf) -> tuple[float, bool]:
    """Fitted constant sup_i f_i (T - t_i)^{1/2 - 1/p} and whether it stays
    at or below the caller's threshold.  All sample times must precede T."""
    ip = reciprocal(p)
    if not ip < Fraction(1, 4):
        raise ValueError(f"rate check requires p > 4, got p={p}")
    if np.any(series.times >= big_t):
        raise ValueError("all sample times must lie strictly before the blowup time")
    exponent = 0.5 - float(ip)
    constant = float(np.max(series.values * (big_t - series.times) ** exponent))
    return constant, constant <= threshold


def rates_compare(p) -> tuple[Fraction, Fraction]:
    """(rate-pipeline exponent 1/2 - 1/p, critical-scaling exponent
    1/2 - 3/(2p)); the first dominates for every finite p > 3."""
    ip = reciprocal(p)
    if not ip < Fraction(1, 3):
        raise ValueError(f"rate comparison requires p > 3, got p={p}")
    return Fraction(1, 2) - ip, Fraction(1, 2) - Fraction(3, 2) * ip


def write_regions_csv(path, grid_points: int = 200,
                      inv_beta_max: Fraction = Fraction(5, 4),
                      inv_p_max: Fraction = Fraction(5, 4)) -> None:
    """Machine-readable region map: inv_beta, inv_p, label, minimal_alpha
    on a uniform rational grid over [0, inv_beta_max] x [0, inv_p_max].

    The default ranges extend past 1 on both axes so the map shows the
    beta < 1 extension and the p < 1 exterior.
    """
    if grid_points < 2:
        raise ValueError("need at least a 2x2 grid")
    ib_vals = [as_rational(inv_beta_max) * i / (grid_points - 1) for i in range(grid_points)]
    ip_vals = [as_rational(inv_p_max) * i / (grid_points - 1) for i in range(grid_points)]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["inv_beta", "inv_p", "label", "minimal_alpha"])
        for ib in ib_vals:
            beta = from_reciprocal(ib)
            for ip in ip_vals:
                point = classify_region(beta, from_reciprocal(ip))
                alpha = "" if point.minimal_alpha is None else f"{float(point.minimal_alpha):.17g}"
                writer.writerow([f"{float(ib):.17g}", f"{float(ip):.17g}", point.label, alpha])
