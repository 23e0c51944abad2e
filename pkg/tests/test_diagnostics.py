"""
Diagnostic records, conserved quantities and the rate identities.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_field, sample
from diagnostics import (
    FIELD_NAMES,
    DiagnosticRecord,
    diagnose,
    energy,
    enstrophy,
    gradient_rate,
    jacobian_identity_residual,
    mixing_rate,
    resolved_fraction,
    velocity_gradient,
    velocity_gradient_riesz,
)
from dynamics import FlowState, step
from errors import ParameterError, RecordError
from norms import BmoConfig, gradient_l2_norm
from scenarios import time_reversed
from spectral import Grid, invert_laplacian

TWO_PI = 2.0 * np.pi

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def random_state(grid: Grid, seed: int) -> FlowState:
    return FlowState(random_field(grid, seed), random_field(grid, seed + 1))


class TestRecord:

    def make(self, **overrides) -> DiagnosticRecord:
        values = {name: 1.0 for name in FIELD_NAMES}
        values.update(overrides)
        return DiagnosticRecord(**values)

    def test_dict_round_trip(self):
        record = self.make(t=0.25, bmo_omega=0.1)
        assert DiagnosticRecord.from_dict(record.to_dict()) == record
        assert list(record.to_dict()) == list(FIELD_NAMES)

    def test_missing_field(self):
        data = self.make().to_dict()
        del data["bmo_omega"]
        with pytest.raises(RecordError, match="bmo_omega"):
            DiagnosticRecord.from_dict(data)

    @pytest.mark.parametrize("bad", ["abc", None, float("nan"), float("inf")])
    def test_bad_values(self, bad):
        data = self.make().to_dict()
        data["energy"] = bad
        with pytest.raises(RecordError):
            DiagnosticRecord.from_dict(data)

    def test_not_a_mapping(self):
        with pytest.raises(RecordError):
            DiagnosticRecord.from_dict([1, 2, 3])


class TestConservedQuantities:

    def test_shear_values(self, grid32):
        omega = sample(grid32, lambda X, Y: np.cos(TWO_PI * Y))
        assert enstrophy(omega) == pytest.approx(0.25, rel=1e-12)
        assert energy(omega) == pytest.approx(1.0 / (16 * np.pi ** 2), rel=1e-12)

    def test_resolved_fraction(self, grid64):
        low = sample(grid64, lambda X, Y: np.cos(TWO_PI * X))
        high = sample(grid64, lambda X, Y: np.cos(TWO_PI * 18 * X))
        assert resolved_fraction(low) < 1e-20
        assert resolved_fraction(high) == pytest.approx(1.0)
        assert resolved_fraction(low * 0.0) == 0.0


class TestVelocityGradient:

    @given(seed=seeds)
    @settings(max_examples=20, deadline=None)
    def test_riesz_path_agrees(self, seed):
        omega = random_field(Grid(64), seed)
        direct = velocity_gradient(omega)
        composed = velocity_gradient_riesz(omega)
        scale = max(np.abs(g.coeffs).max() for g in direct.values())
        for key in direct:
            assert np.abs(direct[key].coeffs - composed[key].coeffs).max() <= 1e-12 * scale

    def test_trace_free(self, grid64):
        g = velocity_gradient(random_field(grid64, 3))
        assert np.abs((g["du_dx"] + g["dv_dy"]).coeffs).max() < 1e-12


class TestDiagnose:

    @given(seed=seeds)
    @settings(max_examples=10, deadline=None)
    def test_record_orderings(self, seed):
        grid = Grid(32)
        record = diagnose(random_state(grid, seed), BmoConfig.default(grid))
        assert 0 < record.hm1_theta <= record.hm12_theta <= record.l2_theta * (1 + 1e-12)
        assert record.bmo_omega <= record.linf_omega
        assert record.grad_v_bmo <= record.grad_v_linf
        assert all(getattr(record, name) >= 0 for name in FIELD_NAMES)

    def test_single_mode_values(self, grid32):
        omega = sample(grid32, lambda X, Y: np.cos(TWO_PI * Y))
        theta = sample(grid32, lambda X, Y: np.cos(TWO_PI * X))
        record = diagnose(FlowState(omega, theta, 0.5), BmoConfig.default(grid32))
        assert record.t == 0.5
        assert record.hm1_theta == pytest.approx(1 / math.sqrt(2), rel=1e-12)
        assert record.l2_theta == pytest.approx(1 / math.sqrt(2), rel=1e-12)
        assert record.grad_l2_theta == pytest.approx(math.sqrt(2) * math.pi, rel=1e-12)
        assert record.linf_omega == pytest.approx(1.0)
        # du/dy = -cos(2 pi y), the only nonzero entry.
        assert record.grad_v_linf == pytest.approx(1.0)


class TestRateIdentities:

    @given(seed=seeds)
    @settings(max_examples=20, deadline=None)
    def test_mixing_rate_paths_agree(self, seed):
        direct, via = mixing_rate(random_state(Grid(64), seed))
        assert direct == pytest.approx(via, rel=1e-10, abs=1e-14)

    @given(seed=seeds, which=st.sampled_from(["theta", "omega"]))
    @settings(max_examples=20, deadline=None)
    def test_gradient_rate_paths_agree(self, seed, which):
        direct, via = gradient_rate(random_state(Grid(64), seed), which)
        assert direct == pytest.approx(via, rel=1e-10, abs=1e-12)

    def test_gradient_rate_rejects_unknown_field(self, grid32):
        with pytest.raises(ParameterError):
            gradient_rate(random_state(grid32, 0), "psi")

    def test_mixing_rate_matches_trajectory(self, grid32):
        state = random_state(grid32, 42)
        dt = 1e-4

        def grad_phi_sq(s: FlowState) -> float:
            return gradient_l2_norm(invert_laplacian(s.theta)) ** 2

        forward = step(state, dt)
        backward = step(time_reversed(state), dt)
        fd = (grad_phi_sq(forward) - grad_phi_sq(backward)) / (2 * dt)
        direct, _ = mixing_rate(state)
        assert fd == pytest.approx(direct, rel=1e-5)

    def test_static_flow_has_zero_rates(self, grid32):
        state = FlowState(random_field(grid32, 1) * 0.0, random_field(grid32, 2))
        assert mixing_rate(state) == (0.0, 0.0)

    def test_jacobian_identity_residual(self):
        grid = Grid(256)
        for seed in range(50):
            omega = random_field(grid, 2 * seed, k_hi=32)
            phi = random_field(grid, 2 * seed + 1, k_hi=32)
            assert jacobian_identity_residual(omega, phi) < 1e-8
