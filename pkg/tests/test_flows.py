import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gwflow import (
    Metric,
    PhasePoint,
    RangeExceededError,
    ReparamInvalidError,
    from_phase,
    make_pn,
    rhs_full,
    rhs_phase,
    rhs_reduced_x,
    rhs_reparam,
    rhs_submersion,
    ricci_coefficients,
    submersion_fixed_points,
    x3_from_volume_one,
)

scales = st.floats(min_value=0.2, max_value=5.0)
small_n = st.integers(min_value=2, max_value=6)


def grid_points():
    for phi in (1.2, 2.0, 3.0, 4.5):
        for u in (-0.8, -0.4, 0.0, 0.3, 0.7):
            yield phi, u * phi


class TestFullSystem:
    def test_einstein_point_is_stationary(self):
        assert rhs_full(make_pn(2), 1.0, 1.0, 1.0) == (0.0, 0.0, 0.0)

    def test_p3_normal_metric_moves(self):
        # r = (0.45, 0.45, 0.40), S = 8.8, so dx = (-0.02, -0.02, +0.08)
        dx = rhs_full(make_pn(3), 1.0, 1.0, 1.0)
        assert dx == pytest.approx((-0.02, -0.02, 0.08), rel=1e-12)

    def test_unnormalized_drops_trace_term(self):
        dx = rhs_full(make_pn(2), 1.0, 1.0, 1.0, normalized=False)
        assert dx == pytest.approx((-0.875, -0.875, -0.875), rel=1e-15)

    @given(n=small_n, x1=scales, x2=scales, x3=scales)
    @settings(max_examples=80, deadline=None)
    def test_volume_conservation_in_differential_form(self, n, x1, x2, x3):
        space = make_pn(n)
        dx = rhs_full(space, x1, x2, x3)
        div = sum(d / (a * x) for d, a, x in zip(dx, space.coefficients, (x1, x2, x3)))
        scale = sum(abs(d / (a * x)) for d, a, x in zip(dx, space.coefficients, (x1, x2, x3)))
        assert abs(div) <= 1e-12 * max(1.0, scale)

    def test_guard_on_extreme_scale(self):
        with pytest.raises(RangeExceededError):
            rhs_full(make_pn(2), 1e141, 1.0, 1.0)


class TestReducedSystem:
    def test_einstein_point(self):
        assert rhs_reduced_x(2, 1.0, 1.0) == (0.0, 0.0)

    @pytest.mark.parametrize("n", range(2, 7))
    def test_agrees_with_full_system_on_slice(self, n):
        space = make_pn(n)
        for phi, psi in grid_points():
            x1, x2 = 0.5 * (phi + psi), 0.5 * (phi - psi)
            x3 = x3_from_volume_one(n, x1, x2)
            want = rhs_full(space, x1, x2, x3)[:2]
            got = rhs_reduced_x(n, x1, x2)
            for a, b in zip(got, want):
                assert a == pytest.approx(b, rel=1e-10, abs=1e-12)

    @given(n=small_n, x1=scales, x2=scales)
    @settings(max_examples=80, deadline=None)
    def test_swap_symmetry(self, n, x1, x2):
        d12 = rhs_reduced_x(n, x1, x2)
        d21 = rhs_reduced_x(n, x2, x1)
        assert d12 == (d21[1], d21[0])

    def test_guard(self):
        with pytest.raises(RangeExceededError):
            rhs_reduced_x(2, 1e80, 1e80)


class TestPhaseSystem:
    def test_einstein_point(self):
        dphi, dpsi = rhs_phase(2, 2.0, 0.0)
        assert dphi == pytest.approx(0.0, abs=1e-15)
        assert dpsi == 0.0

    @pytest.mark.parametrize("n", range(2, 7))
    def test_axis_reduces_to_submersion_speed(self, n):
        for phi in (1.0, 1.5, 2.5, 4.0, 8.0):
            dphi, dpsi = rhs_phase(n, phi, 0.0)
            assert dpsi == 0.0
            assert dphi == pytest.approx(rhs_submersion(n, phi), rel=1e-13, abs=1e-13)

    @pytest.mark.parametrize("n", range(2, 7))
    def test_chain_rule_against_reduced_system(self, n):
        for phi, psi in grid_points():
            x1, x2 = 0.5 * (phi + psi), 0.5 * (phi - psi)
            dx1, dx2 = rhs_reduced_x(n, x1, x2)
            dphi, dpsi = rhs_phase(n, phi, psi)
            assert dphi == pytest.approx(dx1 + dx2, rel=1e-10, abs=1e-12)
            assert dpsi == pytest.approx(dx1 - dx2, rel=1e-10, abs=1e-12)

    @given(n=small_n, phi=st.floats(min_value=0.6, max_value=6.0),
           u=st.floats(min_value=-0.9, max_value=0.9))
    @settings(max_examples=80, deadline=None)
    def test_parity(self, n, phi, u):
        psi = u * phi
        dphi_p, dpsi_p = rhs_phase(n, phi, psi)
        dphi_m, dpsi_m = rhs_phase(n, phi, -psi)
        assert dphi_p == dphi_m
        assert dpsi_p == -dpsi_m

    def test_axis_is_invariant_exactly(self):
        for n in (2, 3, 5):
            for phi in (1.1, 3.3, 7.7):
                assert rhs_phase(n, phi, 0.0)[1] == 0.0

    def test_inadmissible_point_rejected(self):
        with pytest.raises(ValueError):
            rhs_phase(2, 1.0, 2.0)

    def test_range_guard_large_phi(self):
        with pytest.raises(RangeExceededError):
            rhs_phase(2, 1e80, 0.0)

    def test_range_guard_near_boundary(self):
        # (phi^2 - psi^2)^n underflows for n = 7 once phi^2 - psi^2 < 1e-40
        with pytest.raises(RangeExceededError):
            rhs_phase(7, 1e-21, 0.0)


class TestSubmersionEquation:
    def test_einstein_radius(self):
        assert rhs_submersion(2, 2.0) == 0.0

    def test_hand_value(self):
        # (1/3) * (-2 + 12 + 1/16)
        assert rhs_submersion(2, 4.0) == pytest.approx(10.0625 / 3.0, rel=1e-15)

    @pytest.mark.parametrize("n", range(2, 9))
    def test_fixed_points_are_roots(self, n):
        lo, hi = submersion_fixed_points(n)
        assert 0 < lo < hi
        assert rhs_submersion(n, lo) == pytest.approx(0.0, abs=1e-12)
        assert rhs_submersion(n, hi) == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("n", range(2, 9))
    def test_speed_exceeds_one_beyond_bisected_threshold(self, n):
        # find the largest root of speed = 1 by bisection; beyond it the
        # positive power dominates and the speed keeps growing
        _, hi = submersion_fixed_points(n)
        lo = hi
        up = 2.0 * hi
        while rhs_submersion(n, up) <= 1.0:
            up *= 2.0
        for _ in range(200):
            mid = 0.5 * (lo + up)
            if rhs_submersion(n, mid) > 1.0:
                up = mid
            else:
                lo = mid
            if up - lo < 1e-12:
                break
        threshold = up
        for factor in (1.0, 1.5, 4.0, 32.0):
            assert rhs_submersion(n, threshold * factor) > 1.0


class TestReparam:
    def test_axis_gives_unit_speed_and_no_drift(self):
        dphi, dpsi = rhs_reparam(2, 4.0, 0.0)
        assert dphi == 1.0
        assert dpsi == 0.0

    def test_invalid_at_fixed_point(self):
        with pytest.raises(ReparamInvalidError):
            rhs_reparam(2, 2.0, 0.0)

    @pytest.mark.parametrize("n", range(2, 7))
    def test_late_time_slope_constant(self, n):
        # psi' * phi / psi approaches (-4n+5)/3 as phi grows
        phi, psi = 1e4, -1e-3
        _, dpsi = rhs_reparam(n, phi, psi)
        target = (-4 * n + 5) / 3.0
        assert dpsi * phi / psi == pytest.approx(target, rel=0.01)


class TestFixedPoints:
    def test_p2_values(self):
        lo, hi = submersion_fixed_points(2)
        assert hi == pytest.approx(2.0, rel=1e-14)
        assert lo == pytest.approx((8.0 / 3.0) ** (1.0 / 3.0), rel=1e-14)

    def test_rejects_bad_n(self):
        with pytest.raises(ValueError):
            submersion_fixed_points(1)
