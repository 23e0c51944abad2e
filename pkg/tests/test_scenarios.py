"""
Initial-condition families.
"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from errors import BandLimitError, ScenarioError
from scenarios import (
    FieldSpec,
    ScenarioSpec,
    build,
    describe,
    gaussian_blob,
    random_band_field,
    time_reversed,
)
from norms import spectral_l2_norm
from spectral import Grid, band_limit, to_physical

TWO_PI = 2.0 * np.pi


def spec(omega0: FieldSpec, theta0: FieldSpec, n: int = 32, seed: int = 0) -> ScenarioSpec:
    return ScenarioSpec("test", omega0, theta0, n=n, seed=seed)


class TestBuild:

    def test_rest_single_mode(self):
        state = build(spec(FieldSpec("rest"), FieldSpec("single_mode", kx=1, ky=2)))
        assert np.all(state.omega.coeffs == 0)
        assert state.t == 0.0
        X, Y = state.grid.points()
        np.testing.assert_allclose(to_physical(state.theta).values, np.cos(TWO_PI * (X + 2 * Y)), atol=1e-14)

    def test_shear_at_collocation_points(self):
        state = build(spec(FieldSpec("shear", amplitude=1.0, m=1), FieldSpec("single_mode")))
        _, Y = state.grid.points()
        np.testing.assert_allclose(to_physical(state.omega).values, np.cos(TWO_PI * Y), atol=1e-14)

    def test_taylor_green_vorticity(self):
        state = build(spec(FieldSpec("taylor_green", amplitude=0.5, m=2), FieldSpec("checkerboard")))
        X, Y = state.grid.points()
        expected = -8 * np.pi ** 2 * 4 * 0.5 * np.sin(2 * TWO_PI * X) * np.sin(2 * TWO_PI * Y)
        np.testing.assert_allclose(to_physical(state.omega).values, expected, atol=1e-11)

    def test_taylor_green_perturbation_size(self):
        plain = build(spec(FieldSpec("taylor_green"), FieldSpec("single_mode"), n=64))
        perturbed = build(spec(FieldSpec("taylor_green", perturbation=0.1, k_lo=2, k_hi=6),
                               FieldSpec("single_mode"), n=64))
        ratio = spectral_l2_norm(perturbed.omega - plain.omega) / spectral_l2_norm(plain.omega)
        assert ratio == pytest.approx(0.1, rel=1e-12)

    @given(seed=st.integers(min_value=0, max_value=2**32 - 1))
    @settings(max_examples=10, deadline=None)
    def test_random_band_is_deterministic(self, seed):
        s = spec(FieldSpec("random_band", k_lo=2, k_hi=6), FieldSpec("random_band", k_lo=1, k_hi=4), seed=seed)
        a, b = build(s), build(s)
        assert np.array_equal(a.omega.coeffs, b.omega.coeffs)
        assert np.array_equal(a.theta.coeffs, b.theta.coeffs)
        assert not np.array_equal(a.omega.coeffs, a.theta.coeffs)

    def test_random_band_shell_and_norm(self, grid64):
        w = random_band_field(grid64, np.random.default_rng(1), 3.0, 7.0, slope=2.0, amplitude=0.7)
        kmag = grid64.lattice.kmag
        support = np.abs(w.coeffs) > 1e-14
        assert kmag[support].min() >= 3.0 and kmag[support].max() <= 7.0
        assert spectral_l2_norm(w) == pytest.approx(0.7, rel=1e-12)

    @pytest.mark.parametrize("slope", [0.0, 2.0])
    def test_random_band_is_resolution_independent(self, slope):
        coarse = random_band_field(Grid(32), np.random.default_rng(4), 2.0, 6.0, slope)
        fine = random_band_field(Grid(128), np.random.default_rng(4), 2.0, 6.0, slope)
        ks = np.arange(-7, 8)
        a = coarse.coeffs[np.ix_(ks % 32, ks % 32)]
        b = fine.coeffs[np.ix_(ks % 128, ks % 128)]
        assert np.allclose(a, b, rtol=0.0, atol=1e-14)
        assert spectral_l2_norm(fine) == pytest.approx(spectral_l2_norm(coarse), rel=1e-12)

    def test_random_band_scenario_refines(self):
        s = spec(FieldSpec("random_band", k_lo=2, k_hi=6), FieldSpec("checkerboard"), seed=3)
        coarse, fine = build(s), build(ScenarioSpec("test", s.omega0, s.theta0, n=64, seed=3))
        assert spectral_l2_norm(fine.omega) == pytest.approx(spectral_l2_norm(coarse.omega), rel=1e-12)
        ks = np.arange(-6, 7)
        assert np.allclose(coarse.omega.coeffs[np.ix_(ks % 32, ks % 32)],
                           fine.omega.coeffs[np.ix_(ks % 64, ks % 64)], rtol=0.0, atol=1e-14)

    def test_gaussian_blob_truncation(self):
        state = build(spec(FieldSpec("rest"), FieldSpec("gaussian_blob", sigma=0.05), n=64))
        assert band_limit(state.theta) <= 16
        assert abs(state.theta.mean_mode) == 0.0
        _, error = gaussian_blob(Grid(64), FieldSpec("gaussian_blob", sigma=0.05))
        assert 0.0 < error < 0.1
        _, wide = gaussian_blob(Grid(64), FieldSpec("gaussian_blob", sigma=0.15))
        assert wide < error

    def test_unknown_family(self):
        with pytest.raises(ScenarioError, match="vortex"):
            build(spec(FieldSpec("vortex"), FieldSpec("single_mode")))
        with pytest.raises(ScenarioError):
            build(spec(FieldSpec("rest"), FieldSpec("shear")))

    def test_band_limit_violation(self):
        with pytest.raises(BandLimitError):
            build(spec(FieldSpec("shear", m=9), FieldSpec("single_mode")))
        with pytest.raises(BandLimitError):
            build(spec(FieldSpec("rest"), FieldSpec("random_band", k_lo=4, k_hi=12)))

    @pytest.mark.parametrize("field", [
        FieldSpec("shear", m=0),
        FieldSpec("taylor_green", perturbation=-1.0),
        FieldSpec("random_band", k_lo=5, k_hi=2),
    ])
    def test_bad_parameters(self, field):
        with pytest.raises(ScenarioError):
            build(spec(field, FieldSpec("single_mode")))

    def test_single_mode_needs_wavevector(self):
        with pytest.raises(ScenarioError):
            build(spec(FieldSpec("rest"), FieldSpec("single_mode", kx=0, ky=0)))


class TestHelpers:

    def test_describe(self):
        s = spec(FieldSpec("shear"), FieldSpec("gaussian_blob", sigma=0.1), n=64)
        info = describe(s, build(s))
        assert info["linf_omega0"] == pytest.approx(1.0)
        assert info["enstrophy0"] == pytest.approx(0.25, rel=1e-12)
        assert "gaussian_truncation_error" in info
        assert info["omega0"]["family"] == "shear"

    def test_time_reversed(self):
        state = build(spec(FieldSpec("shear"), FieldSpec("single_mode")))
        reversed_state = time_reversed(state)
        assert np.array_equal(reversed_state.omega.coeffs, -state.omega.coeffs)
        assert reversed_state.theta is state.theta

    def test_spec_round_trip_to_dict(self):
        s = spec(FieldSpec("shear", m=2), FieldSpec("checkerboard"))
        data = s.to_dict()
        assert data["omega0"]["m"] == 2
        assert data["n"] == 32
        assert s.step_control().cfl == 0.4
