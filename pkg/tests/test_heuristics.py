import math
from fractions import Fraction as F

import numpy as np
import pytest

from onsagerkit.heuristics import (
    WORST_ONE_MINUS,
    WORST_ZERO,
    cascade_simulate,
    f_exponent,
    fit_loglog_slope,
    intermittency_estimate,
    linear_vs_nonlinear,
    optimal_beta,
    worst_d,
    write_cascade_csv,
)
from onsagerkit.spectral import zero_field


class TestFExponent:
    def test_sobolev_scaling_point(self):
        assert f_exponent(F(5, 6), 2, 0) == F(-1, 3)

    def test_enstrophy_rate(self):
        assert f_exponent(1, 2, 0) == F(-2, 5)

    def test_p_two_kills_dimension_dependence(self):
        vals = {f_exponent(F(1, 2), 2, d) for d in (F(0), F(1), F(2), F(3))}
        # factor (1 - 2/p) vanishes: f = 2 alpha / (d - 5), still d-dependent
        # through the denominator only
        assert len(vals) == 4
        for d in (0, 1, 2):
            assert f_exponent(F(1, 2), 2, d) == F(1) / (d - 5)

    def test_derivative_sign_matches_rule(self):
        rng = np.random.default_rng(11)
        h = 1e-6
        for _ in range(1000):
            alpha = rng.uniform(0.0, 2.0)
            p = rng.uniform(1.0, 20.0)
            d = rng.uniform(0.1, 2.9)
            df = (f_exponent(alpha, p, d + h) - f_exponent(alpha, p, d - h)) / (2 * h)
            rule = 1.0 - 2.0 / p - alpha
            if abs(rule) > 1e-3:
                assert math.copysign(1.0, df) == math.copysign(1.0, rule)

    def test_rejects_bad_dimension(self):
        with pytest.raises(ValueError):
            f_exponent(1, 2, 4)


class TestWorstDimension:
    def test_low_regularity_prefers_one_minus(self):
        assert worst_d(0, 4) == WORST_ONE_MINUS

    def test_high_regularity_prefers_zero(self):
        assert worst_d(F(5, 6), 2) == WORST_ZERO

    def test_optimal_beta_values(self):
        assert optimal_beta(0, 4) == F(4)
        assert optimal_beta(F(5, 6), 2) == F(3)

    def test_branch_continuity(self):
        for p in (F(3), F(4), F(7), F(100)):
            alpha = 1 - 2 / p
            low = alpha / 2 + F(1, 2) - 1 / p
            high = F(2, 5) * alpha + F(3, 5) - F(6, 5) / p
            assert low == high
            assert optimal_beta(alpha, p) == 1 / low

    def test_infinite_beta_at_zero_exponent(self):
        # alpha = 0, p = 2: 1/beta = 0
        assert optimal_beta(0, 2) == math.inf


class TestLinearVsNonlinear:
    def test_dominance_above_one(self):
        lam = 2.0**10
        lin, non = linear_vs_nonlinear(lam, 1.0, 2.0)
        assert lin / non == pytest.approx(lam**0.5, rel=1e-12)

    def test_balance_at_one(self):
        lin, non = linear_vs_nonlinear(2.0**7, 1.0, 1.0)
        assert lin == pytest.approx(non, rel=1e-12)

    def test_nonlinear_wins_at_zero(self):
        lam = 2.0**10
        lin, non = linear_vs_nonlinear(lam, 1.0, 0.0)
        assert lin / non == pytest.approx(lam**-0.5, rel=1e-12)


class TestCascade:
    @pytest.mark.parametrize(
        "alpha,d", [(1.0, 0.0), (1.0, 0.5), (5.0 / 6.0, 0.0)]
    )
    def test_sobolev_history_slope(self, alpha, d):
        run = cascade_simulate(d=d, alpha=alpha, p=2.0, n_shells=40)
        slope = fit_loglog_slope(run.remaining_time, run.h_norm)
        assert slope == pytest.approx(2 * alpha / (d - 5), rel=0.02)

    def test_scale_vs_remaining_time_slope(self):
        run = cascade_simulate(d=0.0, alpha=1.0, p=2.0)
        slope = fit_loglog_slope(run.remaining_time, run.lambdas)
        assert slope == pytest.approx(-2.0 / 5.0, rel=0.02)

    @pytest.mark.parametrize("d,diverges", [(0.0, False), (0.9, False), (1.0, True), (2.0, True)])
    def test_enstrophy_divergence_flag(self, d, diverges):
        run = cascade_simulate(d=d, alpha=1.0, p=2.0, n_shells=60)
        assert run.enstrophy_diverges is diverges
        increments = np.concatenate(
            [[run.enstrophy_partial[0]], np.diff(run.enstrophy_partial)]
        )
        if diverges:
            # partial sums grow without bound: increments never shrink
            assert np.all(increments[1:] >= increments[:-1] * (1 - 1e-12))
            assert run.enstrophy_partial[-1] >= 0.9 * run.shell_index.size * increments[0]
        else:
            # geometric decay: partial sums stay below the closed-form limit
            ratio = 2.0 ** ((d - 1.0) / 2.0)
            assert np.all(increments[1:] <= increments[:-1])
            assert run.enstrophy_partial[-1] <= increments[0] / (1 - ratio) * (1 + 1e-9)

    def test_blowup_time_closed_form(self):
        run = cascade_simulate(d=0.0, alpha=1.0, p=2.0, e0=4.0, start_shell=2)
        expected = 4.0**-0.5 * 4.0**-2.5 / (1.0 - 2.0**-2.5)
        assert run.blowup_time == pytest.approx(expected, rel=1e-12)

    def test_p_two_besov_equals_sobolev(self):
        run = cascade_simulate(d=0.7, alpha=0.8, p=2.0)
        assert np.array_equal(run.besov_norm, run.h_norm)

    def test_besov_history_exponent(self):
        d, alpha, p = 0.5, 1.0, math.inf
        run = cascade_simulate(d=d, alpha=alpha, p=p)
        slope = fit_loglog_slope(run.remaining_time, run.besov_norm)
        assert slope == pytest.approx((2 * alpha + (3 - d)) / (d - 5), rel=0.02)

    def test_rejects_d_at_three(self):
        with pytest.raises(ValueError):
            cascade_simulate(d=3.0)

    def test_csv_schema(self, tmp_path):
        run = cascade_simulate(d=1.0, alpha=1.0, p=4.0, n_shells=5)
        path = tmp_path / "cascade.csv"
        write_cascade_csv(run, path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == (
            "n,lambda_n,T_n,cumulative_t,remaining_t,H_alpha_norm,"
            "Besov_norm,enstrophy_partial_sum"
        )
        assert len(lines) == 6


class TestIntermittencyEstimate:
    def test_single_mode_reports_three(self, grid16):
        fld = zero_field(grid16)
        fld.coeffs[1, 3, 0, 0] = 0.5
        fld.coeffs[1, -3, 0, 0] = 0.5
        assert intermittency_estimate(fld, 1) == pytest.approx(3.0, abs=0.05)

    def test_scale_invariance(self, grid64):
        from onsagerkit.generators import intermittent_field

        fld = intermittent_field(grid64, q=4, d=1.0, seed=0)
        a = intermittency_estimate(fld, 4)
        b = intermittency_estimate(fld.with_coeffs(25.0 * fld.coeffs), 4)
        assert a == pytest.approx(b, rel=1e-12)

    def test_zero_shell_rejected(self, grid16):
        with pytest.raises(ValueError):
            intermittency_estimate(zero_field(grid16), 2)
