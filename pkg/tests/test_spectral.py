import math

import numpy as np
import pytest

from onsagerkit.spectral import (
    TWO_PI,
    VelocityField,
    divergence_residual,
    from_physical,
    grad_l2_norm_sq,
    l2_norm_sq,
    leray_project,
    lp_norm,
    make_grid,
    to_physical,
    zero_field,
)

from conftest import broadband_field


class TestMakeGrid:
    def test_kmax_values(self):
        assert make_grid(64).kmax == 21
        assert make_grid(8).kmax == 2
        assert make_grid(48).kmax == 16

    @pytest.mark.parametrize("n", [7, 9, 6, 4, 0, -8])
    def test_rejects_bad_sizes(self, n):
        with pytest.raises(ValueError):
            make_grid(n)

    def test_rejects_non_integer(self):
        with pytest.raises(ValueError):
            make_grid(16.0)


class TestTransforms:
    def test_single_mode_synthesis(self, grid16):
        fld = zero_field(grid16)
        fld.coeffs[1, 3, 0, 0] = 0.5
        fld.coeffs[1, -3, 0, 0] = 0.5
        samples = to_physical(fld)
        x1 = np.arange(grid16.n) * grid16.spacing
        expected = np.cos(3 * x1)[:, None, None] * np.ones((1, grid16.n, grid16.n))
        assert np.abs(samples[0]).max() < 1e-15
        assert np.abs(samples[2]).max() < 1e-15
        assert np.abs(samples[1] - expected).max() < 1e-14

    def test_zero_coefficients_zero_samples(self, grid16):
        assert np.abs(to_physical(zero_field(grid16))).max() == 0.0

    def test_round_trip(self, grid32):
        fld = broadband_field(grid32, seed=5)
        back = from_physical(grid32, to_physical(fld))
        scale = np.abs(fld.coeffs).max()
        assert np.abs(back.coeffs - fld.coeffs).max() <= 1e-12 * scale

    def test_size_mismatch_rejected(self, grid16):
        with pytest.raises(ValueError):
            from_physical(grid16, np.zeros((3, 8, 8, 8)))


class TestLerayProjection:
    def test_kills_pure_gradient(self, grid16):
        # gradient field: u_hat(k) = i k g(k)
        rng = np.random.default_rng(0)
        g_scalar = rng.standard_normal((16, 16, 16)) + 1j * rng.standard_normal((16, 16, 16))
        kx, ky, kz = grid16.k_components()
        fld = zero_field(grid16)
        fld.coeffs[0] = 1j * kx * g_scalar
        fld.coeffs[1] = 1j * ky * g_scalar
        fld.coeffs[2] = 1j * kz * g_scalar
        out = leray_project(fld)
        assert np.abs(out.coeffs).max() <= 1e-13 * np.abs(fld.coeffs).max()

    def test_identity_on_divergence_free(self, grid32):
        fld = broadband_field(grid32, seed=7)
        out = leray_project(fld)
        assert np.abs(out.coeffs - fld.coeffs).max() <= 1e-14 * np.abs(fld.coeffs).max()

    def test_output_divergence_free_and_idempotent(self, grid16, rng):
        raw = rng.standard_normal((3, 16, 16, 16)) + 1j * rng.standard_normal((3, 16, 16, 16))
        fld = VelocityField(grid16, raw)
        once = leray_project(fld)
        twice = leray_project(once)
        assert divergence_residual(once) <= 1e-13
        assert np.abs(twice.coeffs - once.coeffs).max() <= 1e-14 * np.abs(once.coeffs).max()

    def test_l2_nonincreasing(self, grid16, rng):
        raw = rng.standard_normal((3, 16, 16, 16)) + 1j * rng.standard_normal((3, 16, 16, 16))
        fld = VelocityField(grid16, raw)
        assert l2_norm_sq(leray_project(fld)) <= l2_norm_sq(fld) * (1 + 1e-14)


class TestLpNorm:
    @pytest.mark.parametrize("p", [1.0, 2.0, 3.0, 7.5, math.inf])
    def test_constant_field(self, grid16, p):
        fld = zero_field(grid16)
        fld.coeffs[0, 0, 0, 0] = -1.75
        expected = 1.75 if math.isinf(p) else 1.75 * TWO_PI ** (3.0 / p)
        assert lp_norm(fld, p) == pytest.approx(expected, rel=1e-13)

    def test_cosine_mode_l2(self, grid16):
        fld = zero_field(grid16)
        fld.coeffs[1, 3, 0, 0] = 0.5
        fld.coeffs[1, -3, 0, 0] = 0.5
        assert lp_norm(fld, 2) == pytest.approx(TWO_PI**1.5 / math.sqrt(2), rel=1e-13)

    def test_zero_field(self, grid16):
        for p in (1, 2, math.inf):
            assert lp_norm(zero_field(grid16), p) == 0.0

    def test_rejects_p_below_one(self, grid16):
        with pytest.raises(ValueError):
            lp_norm(zero_field(grid16), 0.5)

    def test_volume_normalized_monotonicity(self, grid16):
        # Hoelder on the normalized torus: (2pi)^(-3/p) ||u||_p nondecreasing
        for seed in range(3):
            fld = broadband_field(grid16, seed=seed)
            ps = [1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 10.0, math.inf]
            vals = [
                lp_norm(fld, p) * (1.0 if math.isinf(p) else TWO_PI ** (-3.0 / p))
                for p in ps
            ]
            assert all(b >= a * (1 - 1e-12) for a, b in zip(vals, vals[1:]))

    def test_parseval_consistency(self, grid16):
        fld = broadband_field(grid16, seed=9)
        direct = math.sqrt(grid16.cell_volume * np.sum(np.sum(to_physical(fld) ** 2, axis=0)))
        assert lp_norm(fld, 2) == pytest.approx(direct, rel=1e-12)


def test_grad_norm_matches_mode_arithmetic(grid16):
    fld = zero_field(grid16)
    fld.coeffs[1, 3, 0, 0] = 0.5
    fld.coeffs[1, -3, 0, 0] = 0.5
    # ||grad u||^2 = |k|^2 ||u||^2 for a single-|k| field
    assert grad_l2_norm_sq(fld) == pytest.approx(9.0 * l2_norm_sq(fld), rel=1e-13)
