"""Time-direction function-space machinery: distribution functions,
weak-Lebesgue quasinorms, L^beta-in-time norms (including the quasinorm
range 0 < beta < 1), and super-level exceptional sets.

Convention: a sampled series is read as the left-constant step function
f(s) = f_i on [t_i, t_{i+1}) for measure-type quantities (super-level
sets of a step function are exact interval unions), and integrated by
the trapezoid rule for beta-integrals.  The mismatch between the two
readings vanishes with sampling density.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .dyadic import BesovSpec, besov_norm, lambda_q

__all__ = [
    "NormSeries",
    "TimeSpaceSpec",
    "MembershipResult",
    "distribution_function",
    "weak_quasinorm",
    "time_norm",
    "exceptional_set",
    "membership",
    "besov_series",
    "read_series_csv",
    "write_series_csv",
]


@dataclass(frozen=True)
class NormSeries:
    """Nonnegative scalar samples f_i >= 0 at strictly increasing times."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        t = np.asarray(self.times, dtype=np.float64)
        v = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)
        if t.ndim != 1 or v.ndim != 1 or t.size != v.size:
            raise ValueError("times and values must be 1-d arrays of equal length")
        if t.size < 2:
            raise ValueError("a series needs at least 2 samples")
        if np.any(np.diff(t) <= 0):
            raise ValueError("times must be strictly increasing")
        if np.any(v < 0):
            raise ValueError("series values must be nonnegative")

    @property
    def span(self) -> float:
        return float(self.times[-1] - self.times[0])

    def scaled(self, c: float) -> "NormSeries":
        return NormSeries(self.times, c * self.values)


@dataclass(frozen=True)
class TimeSpaceSpec:
    """L^beta (or weak-L^beta) in time of a Besov norm in space."""

    beta: float
    weak: bool
    besov: BesovSpec

    def __post_init__(self) -> None:
        if self.beta <= 0:
            raise ValueError(f"time exponent must be positive, got {self.beta}")


def _interval_lengths(series: NormSeries) -> np.ndarray:
    """Length carried by each sample under the left-constant reading.

    The final sample holds on a zero-length interval; it still counts as
    an achieved value for threshold scans.
    """
    dt = np.diff(series.times)
    return np.concatenate([dt, [0.0]])


def distribution_function(series: NormSeries, t: float) -> float:
    """Measure of the strict super-level set |{s : f(s) > t}|."""
    if t < 0:
        raise ValueError(f"threshold must be nonnegative, got {t}")
    lengths = _interval_lengths(series)
    return float(lengths[series.values > t].sum())


def weak_quasinorm(series: NormSeries, beta: float) -> float:
    """sup_{t>0} t * |{f >= t}|^{1/beta}, scanned over the achieved values.

    For a step function the supremum of t |{f > t}|^{1/beta} is attained
    in the limit t -> v^- at sample values v, i.e. at v |{f >= v}|^{1/beta};
    scanning the order statistics is exact.
    """
    if beta <= 0:
        raise ValueError(f"need beta > 0, got {beta}")
    lengths = _interval_lengths(series)
    order = np.argsort(series.values)
    v = series.values[order]
    # measure of {f >= v_i}: suffix sums over the sorted values
    suffix = np.cumsum(lengths[order][::-1])[::-1]
    positive = v > 0
    if not positive.any():
        return 0.0
    return float(np.max(v[positive] * suffix[positive] ** (1.0 / beta)))


def time_norm(series: NormSeries, beta: float) -> float:
    """(integral of f^beta dt)^{1/beta} by trapezoid; max sample for beta = inf.

    For 0 < beta < 1 this is the usual quasinorm (deliberately the same
    formula; no convexity correction).
    """
    if beta <= 0:
        raise ValueError(f"need beta > 0, got {beta}")
    if math.isinf(beta):
        return float(series.values.max())
    return float(np.trapezoid(series.values**beta, series.times) ** (1.0 / beta))


def exceptional_set(series: NormSeries, q: int, beta: float) -> tuple[list[tuple[float, float]], float]:
    """Intervals where f >= lambda_q^{2/beta}, and their total measure.

    If M = weak_quasinorm(series, beta), the measure is at most
    M^beta lambda_q^{-2} (immediate from the definitions).
    """
    if q < 0:
        raise ValueError(f"need shell index q >= 0, got {q}")
    if beta <= 0:
        raise ValueError(f"need beta > 0, got {beta}")
    threshold = lambda_q(q) ** (2.0 / beta)
    above = series.values >= threshold
    intervals: list[tuple[float, float]] = []
    start = None
    for i, flag in enumerate(above):
        if flag and start is None:
            start = series.times[i]
        if not flag and start is not None:
            intervals.append((float(start), float(series.times[i])))
            start = None
    if start is not None:
        intervals.append((float(start), float(series.times[-1])))
    measure = sum(b - a for a, b in intervals)
    return intervals, float(measure)


@dataclass(frozen=True)
class MembershipResult:
    value: float
    finite_at_resolution: bool
    spec: TimeSpaceSpec
    n_samples: int


def besov_series(trajectory, spec: BesovSpec) -> NormSeries:
    """t -> Besov norm of u(t) over the trajectory's snapshots."""
    times = []
    values = []
    grid = None
    for t, fld in trajectory.iter_snapshots():
        if grid is None:
            grid = fld.grid
        elif fld.grid != grid:
            raise ValueError("trajectory snapshots use inconsistent grids")
        times.append(t)
        values.append(besov_norm(fld, spec))
    return NormSeries(np.array(times), np.array(values))


def membership(trajectory, spec: TimeSpaceSpec) -> MembershipResult:
    """Size of the trajectory in the requested time-space class.

    The verdict is reportorial: finiteness of the continuum norm cannot
    be decided from finitely many samples, so `finite_at_resolution`
    only states that the sampled value is finite.
    """
    series = besov_series(trajectory, spec.besov)
    if spec.weak:
        value = weak_quasinorm(series, spec.beta)
    else:
        value = time_norm(series, spec.beta)
    return MembershipResult(
        value=value,
        finite_at_resolution=bool(np.isfinite(value)),
        spec=spec,
        n_samples=len(series.times),
    )


def write_series_csv(series: NormSeries, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "value"])
        for t, v in zip(series.times, series.values):
            writer.writerow([f"{t:.17g}", f"{v:.17g}"])


def read_series_csv(path) -> NormSeries:
    times = []
    values = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if [h.strip() for h in header[:2]] != ["t", "value"]:
            raise ValueError(f"expected header 't,value', got {header!r}")
        for row in reader:
            if not row:
                continue
            times.append(float(row[0]))
            values.append(float(row[1]))
    return NormSeries(np.array(times), np.array(values))
