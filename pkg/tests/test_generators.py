import math

import numpy as np
import pytest

from onsagerkit.dyadic import decompose, shell_count
from onsagerkit.generators import (
    intermittent_field,
    random_divfree,
    shear_mode,
    taylor_green,
)
from onsagerkit.heuristics import intermittency_estimate
from onsagerkit.spectral import (
    TWO_PI,
    divergence_residual,
    is_dealiased,
    l2_norm_sq,
    lp_norm,
    make_grid,
)


class TestTaylorGreen:
    def test_divergence_free(self, grid32):
        assert divergence_residual(taylor_green(grid32)) <= 1e-14

    def test_energy(self, grid32):
        assert l2_norm_sq(taylor_green(grid32)) == pytest.approx(TWO_PI**3 / 4, rel=1e-12)

    def test_mean_mode_zero(self, grid16):
        tg = taylor_green(grid16)
        assert np.abs(tg.coeffs[:, 0, 0, 0]).max() <= 1e-16

    def test_band_limited_to_unit_modes(self, grid16):
        tg = taylor_green(grid16)
        k = np.abs(grid16.wavenumbers())
        outside = (
            (k[:, None, None] > 1) | (k[None, :, None] > 1) | (k[None, None, :] > 1)
        )
        assert np.abs(tg.coeffs[:, outside]).max() <= 1e-16


class TestShearMode:
    def test_exact_coefficients(self, grid16):
        fld = shear_mode(grid16)
        assert fld.coeffs[1, 3, 0, 0] == pytest.approx(math.sqrt(2) / 2)
        assert divergence_residual(fld) == 0.0

    def test_energy(self, grid16):
        assert l2_norm_sq(shear_mode(grid16)) == pytest.approx(TWO_PI**3, rel=1e-13)

    def test_rejects_unrepresentable_wavenumber(self, grid16):
        with pytest.raises(ValueError):
            shear_mode(grid16, wavenumber=9)


class TestRandomDivfree:
    def test_zero_profile(self, grid16):
        fld = random_divfree(grid16, [0.0, 0.0], seed=0)
        assert np.abs(fld.coeffs).max() == 0.0

    def test_deterministic(self, grid16):
        a = random_divfree(grid16, [0.0, 1.0, 0.5], seed=42)
        b = random_divfree(grid16, [0.0, 1.0, 0.5], seed=42)
        assert np.array_equal(a.coeffs, b.coeffs)

    def test_single_band_exact_norm_and_shells(self, grid32):
        fld = random_divfree(grid32, [0.0, 0.0, 0.7], seed=1)
        assert lp_norm(fld, 2) == pytest.approx(0.7, rel=1e-12)
        energies = np.array([l2_norm_sq(s) for s in decompose(fld).shells])
        # profile at q=2 spreads into shells 1..3 only (cutoff overlap)
        populated = {q for q in range(-1, shell_count(grid32) + 1)
                     if energies[q + 1] > 1e-20}
        assert populated <= {1, 2, 3}
        assert 2 in populated

    def test_invariants(self, grid32):
        fld = random_divfree(grid32, [0.0, 1.0, 0.5, 0.25], seed=9)
        assert divergence_residual(fld) <= 1e-12
        assert is_dealiased(fld)

    def test_rejects_band_beyond_grid(self, grid16):
        # shell 4 plateau starts at 16 > kmax = 5
        with pytest.raises(ValueError):
            random_divfree(grid16, [0.0, 0.0, 0.0, 0.0, 1.0], seed=0)

    def test_rejects_negative_amplitudes(self, grid16):
        with pytest.raises(ValueError):
            random_divfree(grid16, [-1.0], seed=0)


class TestIntermittentField:
    def test_full_volume_ratio_at_d3(self, grid64):
        fld = intermittent_field(grid64, q=4, d=3.0, seed=0)
        ratio = lp_norm(fld, math.inf) / lp_norm(fld, 2)
        baseline = TWO_PI**-1.5
        assert baseline / 2 <= ratio <= baseline * 2

    def test_divergence_free_any_d(self, grid64):
        for d in (0.0, 1.5, 3.0):
            fld = intermittent_field(grid64, q=4, d=d, seed=1)
            assert divergence_residual(fld) <= 1e-12
            assert is_dealiased(fld)

    def test_spectral_support_three_shells(self, grid64):
        fld = intermittent_field(grid64, q=4, d=1.0, seed=2)
        energies = np.array([l2_norm_sq(s) for s in decompose(fld).shells])
        total = energies.sum()
        for q in range(-1, shell_count(grid64) + 1):
            if q not in (3, 4, 5):
                assert energies[q + 1] <= 1e-24 * total

    def test_round_trip_d0(self, grid64):
        fld = intermittent_field(grid64, q=4, d=0.0, seed=3)
        assert abs(intermittency_estimate(fld, 4) - 0.0) <= 0.3

    def test_round_trip_d2(self, grid64):
        fld = intermittent_field(grid64, q=4, d=2.0, seed=3)
        assert abs(intermittency_estimate(fld, 4) - 2.0) <= 0.3

    def test_deterministic(self, grid64):
        a = intermittent_field(grid64, q=4, d=1.0, seed=7)
        b = intermittent_field(grid64, q=4, d=1.0, seed=7)
        assert np.array_equal(a.coeffs, b.coeffs)

    def test_unit_norm(self, grid64):
        fld = intermittent_field(grid64, q=4, d=2.0, seed=5)
        assert lp_norm(fld, 2) == pytest.approx(1.0, rel=1e-12)

    def test_rejects_bad_parameters(self, grid64):
        with pytest.raises(ValueError):
            intermittent_field(grid64, q=4, d=3.5, seed=0)
        with pytest.raises(ValueError):
            intermittent_field(grid64, q=40, d=1.0, seed=0)

    def test_shell_too_fine_for_small_grid(self):
        grid = make_grid(8)
        with pytest.raises(ValueError):
            intermittent_field(grid, q=3, d=1.0, seed=0)
