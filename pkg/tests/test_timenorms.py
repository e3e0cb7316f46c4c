import math

import numpy as np
import pytest

from onsagerkit.dyadic import BesovSpec
from onsagerkit.generators import shear_mode
from onsagerkit.spectral import Trajectory, make_grid
from onsagerkit.timenorms import (
    NormSeries,
    TimeSpaceSpec,
    distribution_function,
    exceptional_set,
    membership,
    read_series_csv,
    time_norm,
    weak_quasinorm,
    write_series_csv,
)


def inverse_sqrt_series(n=10000, smin=1e-8):
    s = np.logspace(math.log10(smin), 0.0, n)
    return NormSeries(s, s**-0.5)


def random_smooth_series(seed, n=512):
    """Positive, slowly varying random series on [0, 1]."""
    rng = np.random.default_rng(seed)
    t = np.linspace(0.0, 1.0, n)
    coef = rng.standard_normal(6)
    vals = np.ones_like(t)
    for m, c in enumerate(coef, start=1):
        vals = vals + (c / m) * np.sin(math.pi * m * t + rng.uniform(0, 2 * math.pi))
    return NormSeries(t, np.abs(vals) + 0.1)


class TestNormSeries:
    def test_validation(self):
        with pytest.raises(ValueError):
            NormSeries(np.array([0.0, 0.0]), np.array([1.0, 1.0]))
        with pytest.raises(ValueError):
            NormSeries(np.array([0.0, 1.0]), np.array([1.0, -1.0]))
        with pytest.raises(ValueError):
            NormSeries(np.array([0.0]), np.array([1.0]))


class TestDistributionFunction:
    def test_constant(self):
        ser = NormSeries(np.linspace(0.0, 2.0, 11), np.full(11, 3.0))
        assert distribution_function(ser, 2.9) == pytest.approx(2.0)
        assert distribution_function(ser, 3.0) == 0.0

    def test_inverse_sqrt(self):
        ser = inverse_sqrt_series()
        for t in (1.0, 2.0, 5.0):
            assert distribution_function(ser, t) == pytest.approx(t**-2, rel=0.02)

    def test_empty_superlevel(self):
        ser = NormSeries(np.array([0.0, 1.0]), np.array([1.0, 2.0]))
        assert distribution_function(ser, 10.0) == 0.0

    def test_monotone_and_right_continuous(self):
        ser = random_smooth_series(0)
        ts = np.linspace(0.0, ser.values.max() * 1.1, 50)
        vals = [distribution_function(ser, t) for t in ts]
        assert all(b <= a for a, b in zip(vals, vals[1:]))
        for v in ser.values[::100]:
            assert distribution_function(ser, v) == pytest.approx(
                distribution_function(ser, v + 1e-12), abs=1e-12
            )


class TestWeakQuasinorm:
    def test_constant(self):
        ser = NormSeries(np.linspace(0.0, 2.0, 5), np.full(5, 3.0))
        for beta in (0.5, 1.0, 2.0):
            assert weak_quasinorm(ser, beta) == pytest.approx(3.0 * 2.0 ** (1 / beta))

    def test_inverse_power_reference(self):
        assert weak_quasinorm(inverse_sqrt_series(), 2.0) == pytest.approx(1.0, rel=0.05)
        s = np.logspace(-8, 0, 10000)
        ser3 = NormSeries(s, s ** (-1.0 / 3.0))
        assert weak_quasinorm(ser3, 3.0) == pytest.approx(1.0, rel=0.05)

    def test_zero_series(self):
        ser = NormSeries(np.array([0.0, 1.0]), np.zeros(2))
        assert weak_quasinorm(ser, 2.0) == 0.0

    def test_scale_equivariance(self):
        ser = random_smooth_series(1)
        a = weak_quasinorm(ser, 1.5)
        b = weak_quasinorm(ser.scaled(7.0), 1.5)
        assert b == pytest.approx(7.0 * a, rel=1e-12)


class TestTimeNorm:
    def test_constant(self):
        ser = NormSeries(np.linspace(0.0, 2.0, 9), np.full(9, 3.0))
        for beta in (0.5, 1.0, 3.0):
            assert time_norm(ser, beta) == pytest.approx(3.0 * 2.0 ** (1 / beta))
        assert time_norm(ser, math.inf) == 3.0

    def test_linear_integral(self):
        t = np.linspace(0.0, 1.0, 10000)
        ser = NormSeries(t, t)
        assert time_norm(ser, 1.0) == pytest.approx(0.5, abs=1e-6)

    def test_quasinorm_branch(self):
        # beta = 1/2: (integral of s^{-1/4})^2 = (4/3)^2
        ser = inverse_sqrt_series()
        assert time_norm(ser, 0.5) == pytest.approx((4.0 / 3.0) ** 2, rel=0.01)

    def test_rejects_nonpositive_beta(self):
        ser = NormSeries(np.array([0.0, 1.0]), np.array([1.0, 1.0]))
        with pytest.raises(ValueError):
            time_norm(ser, 0.0)


class TestExceptionalSet:
    def test_inverse_sqrt_threshold(self):
        # f = s^{-1/2}, beta = 2: E_q = [0, lambda_q^{-2}]
        ser = inverse_sqrt_series()
        for q in (2, 3):
            intervals, measure = exceptional_set(ser, q, 2.0)
            lam = 2.0**q
            assert len(intervals) == 1
            assert measure * lam**2 == pytest.approx(1.0, rel=0.02)

    def test_bounded_series_empty(self):
        ser = NormSeries(np.array([0.0, 1.0, 2.0]), np.array([1.0, 1.5, 1.2]))
        intervals, measure = exceptional_set(ser, 5, 2.0)  # threshold 32
        assert intervals == [] and measure == 0.0

    def test_constant_at_threshold_full_interval(self):
        lam_q = 2.0**3
        thr = lam_q ** (2.0 / 2.0)
        ser = NormSeries(np.linspace(0.0, 5.0, 11), np.full(11, thr))
        intervals, measure = exceptional_set(ser, 3, 2.0)
        assert intervals == [(0.0, 5.0)]
        assert measure == pytest.approx(5.0)

    def test_measure_bound_from_weak_norm(self):
        for seed in range(20):
            ser = random_smooth_series(seed)
            for beta in (1.0, 2.0):
                m = weak_quasinorm(ser, beta)
                for q in range(0, 4):
                    _, measure = exceptional_set(ser, q, beta)
                    assert measure <= m**beta * 2.0 ** (-2 * q) * (1 + 1e-12)


class TestCrossInequalities:
    def test_chebyshev_consistency(self):
        # time_norm(f, beta)^beta >= t^beta lambda_f(t) on smooth series
        for seed in range(100):
            ser = random_smooth_series(seed)
            for beta in (1.0, 2.0):
                tn = time_norm(ser, beta) ** beta
                for t in np.linspace(0.0, ser.values.max(), 7)[1:]:
                    assert tn >= t**beta * distribution_function(ser, t) * (1 - 1e-9)

    def test_weak_below_strong(self):
        for seed in range(100):
            ser = random_smooth_series(seed + 500)
            for beta in (1.0, 1.5, 3.0):
                assert weak_quasinorm(ser, beta) <= time_norm(ser, beta) * (1 + 1e-9)


class TestMembership:
    def test_zero_trajectory(self, grid16):
        from onsagerkit.spectral import zero_field

        snaps = [(0.0, zero_field(grid16, 0.0)), (1.0, zero_field(grid16, 1.0))]
        traj = Trajectory(nu=0.1, snapshots=snaps)
        spec = TimeSpaceSpec(beta=3.0, weak=False, besov=BesovSpec(0.0, 3.0, math.inf))
        result = membership(traj, spec)
        assert result.value == 0.0
        assert result.finite_at_resolution

    def test_shear_decay_closed_form(self, grid16):
        # ||u(t)||_{B^0_{3,inf}} = sqrt(2) e^{-9 nu t} ||cos 3x||_3
        nu = 0.1
        times = np.linspace(0.0, 1.0, 201)
        snaps = []
        for t in times:
            fld = shear_mode(grid16, time=t)
            snaps.append((float(t), fld.with_coeffs(fld.coeffs * math.exp(-9 * nu * t))))
        traj = Trajectory(nu=nu, snapshots=snaps)
        spec = TimeSpaceSpec(beta=3.0, weak=False, besov=BesovSpec(0.0, 3.0, math.inf))
        result = membership(traj, spec)
        c3 = ((2 * math.pi) ** 2 * 8.0 / 3.0) ** (1.0 / 3.0)
        a = 27 * nu
        expected = math.sqrt(2) * c3 * ((1 - math.exp(-a)) / a) ** (1.0 / 3.0)
        assert result.value == pytest.approx(expected, rel=0.01)

    def test_homogeneity(self, grid16):
        nu = 0.2
        snaps = [(float(t), shear_mode(grid16, time=float(t))) for t in (0.0, 0.5, 1.0)]
        traj = Trajectory(nu=nu, snapshots=snaps)
        scaled = Trajectory(
            nu=nu, snapshots=[(t, f.with_coeffs(3.0 * f.coeffs)) for t, f in snaps]
        )
        spec = TimeSpaceSpec(beta=2.0, weak=True, besov=BesovSpec(0.25, 4.0, math.inf))
        a = membership(traj, spec).value
        b = membership(scaled, spec).value
        assert b == pytest.approx(3.0 * a, rel=1e-12)


def test_series_csv_round_trip(tmp_path):
    ser = random_smooth_series(3)
    path = tmp_path / "series.csv"
    write_series_csv(ser, path)
    back = read_series_csv(path)
    assert np.array_equal(back.times, ser.times)
    assert np.array_equal(back.values, ser.values)
    assert path.read_text().splitlines()[0] == "t,value"
