import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gwflow import (
    GWSpace,
    Metric,
    PhasePoint,
    RicciSpectrum,
    from_phase,
    k_positive,
    kn,
    make_pn,
    negative_count,
    normalize_to_unit_volume,
    ricci_coefficients,
    ricci_phase,
    smallest_k_positive,
    to_phase,
    volume,
    x3_from_volume_one,
)

positive_scales = st.floats(min_value=0.05, max_value=20.0)
small_n = st.integers(min_value=2, max_value=8)


def spectrum(r1, r2, r3, d1=4, d2=4, d3=4):
    return RicciSpectrum.from_eigenvalues(r1, r2, r3, d1, d2, d3)


class TestMakePn:
    def test_p2(self):
        s = make_pn(2)
        assert s.coefficients == (0.125, 0.125, 0.125)
        assert s.dims == (4, 4, 4)
        assert s.d == 12

    def test_p3(self):
        s = make_pn(3)
        assert s.coefficients == pytest.approx((0.1, 0.1, 0.2), rel=1e-15)
        assert s.dims == (8, 8, 4)
        assert s.d == 20

    @pytest.mark.parametrize("n", range(2, 12))
    def test_dimension_formula(self, n):
        assert make_pn(n).d == 8 * n - 4

    @pytest.mark.parametrize("bad", [1, 0, -3, 2.0, "2"])
    def test_rejects_bad_n(self, bad):
        with pytest.raises(ValueError):
            make_pn(bad)


class TestKn:
    def test_values(self):
        assert kn(2) == 1
        assert kn(3) == 6
        assert kn(4) == 9

    def test_rejects_small_n(self):
        with pytest.raises(ValueError):
            kn(1)


class TestGWSpaceInvariants:
    def test_rejects_inconsistent_proportionality(self):
        with pytest.raises(ValueError, match="d_i \\* a_i"):
            GWSpace(0.125, 0.125, 0.125, 4, 4, 8)

    def test_rejects_nonpositive_coefficient(self):
        with pytest.raises(ValueError):
            GWSpace(0.0, 0.125, 0.125, 4, 4, 4)

    def test_rejects_zero_dimension(self):
        with pytest.raises(ValueError):
            GWSpace(0.125, 0.125, 0.125, 4, 4, 0)


class TestRicciCoefficients:
    def test_p2_normal_metric(self):
        spec = ricci_coefficients(make_pn(2), Metric(1, 1, 1))
        assert spec.values == (0.4375, 0.4375, 0.4375)  # = 7/16 exactly
        assert spec.scalar == 12 * 0.4375

    def test_p3_normal_metric(self):
        spec = ricci_coefficients(make_pn(3), Metric(1, 1, 1))
        assert spec.values == pytest.approx((0.45, 0.45, 0.40), rel=1e-14)

    @pytest.mark.parametrize("c", [0.5, 2.0, 17.3])
    def test_p2_scaled_normal_metric(self, c):
        spec = ricci_coefficients(make_pn(2), Metric(c, c, c))
        assert spec.values == pytest.approx((0.4375 / c,) * 3, rel=1e-14)

    @given(n=small_n, x1=positive_scales, x2=positive_scales, x3=positive_scales,
           c=st.floats(min_value=0.1, max_value=10.0))
    @settings(max_examples=60, deadline=None)
    def test_homogeneity_degree_minus_one(self, n, x1, x2, x3, c):
        space = make_pn(n)
        base = ricci_coefficients(space, Metric(x1, x2, x3))
        scaled = ricci_coefficients(space, Metric(c * x1, c * x2, c * x3))
        for rb, rs in zip(base.values, scaled.values):
            assert rs == pytest.approx(rb / c, rel=1e-12, abs=1e-14)

    @given(n=small_n, x1=positive_scales, x2=positive_scales, x3=positive_scales)
    @settings(max_examples=60, deadline=None)
    def test_index_swap_symmetry_is_exact(self, n, x1, x2, x3):
        space = make_pn(n)
        a = ricci_coefficients(space, Metric(x1, x2, x3))
        b = ricci_coefficients(space, Metric(x2, x1, x3))
        assert (a.r1, a.r2, a.r3) == (b.r2, b.r1, b.r3)

    def test_rejects_nonpositive_metric(self):
        with pytest.raises(ValueError):
            Metric(1.0, -1.0, 1.0)


class TestRicciSpectrumType:
    def test_scalar_consistency_enforced(self):
        with pytest.raises(ValueError, match="scalar"):
            RicciSpectrum(1.0, 1.0, 1.0, 4, 4, 4, 11.0)

    def test_factory_scalar(self):
        s = spectrum(0.1, 0.2, 0.3)
        assert s.scalar == pytest.approx(4 * 0.1 + 4 * 0.2 + 4 * 0.3, rel=1e-15)
        assert s.d == 12


class TestVolume:
    def test_unit(self):
        assert volume(make_pn(2), Metric(1, 1, 1)) == 1.0

    def test_p2_doubled(self):
        # every exponent is 8, so V = 2**24
        assert volume(make_pn(2), Metric(2, 2, 2)) == pytest.approx(2 ** 24, rel=1e-12)

    def test_p3_balanced(self):
        assert volume(make_pn(3), Metric(2, 0.5, 1)) == pytest.approx(1.0, rel=1e-12)

    def test_no_overflow_at_large_scales(self):
        v = volume(make_pn(6), Metric(1e3, 1e3, 1.0))
        assert math.isfinite(math.log(v)) or v == math.inf  # log-space path

    def test_normalize_halves_doubled_metric(self):
        m = normalize_to_unit_volume(make_pn(2), Metric(2, 2, 2))
        assert m.xs == pytest.approx((1.0, 1.0, 1.0), rel=1e-12)

    def test_normalize_fixes_unit_metric(self):
        m = normalize_to_unit_volume(make_pn(2), Metric(1, 1, 1))
        assert m.xs == pytest.approx((1.0, 1.0, 1.0), rel=1e-14)

    @given(n=small_n, x1=positive_scales, x2=positive_scales, x3=positive_scales)
    @settings(max_examples=60, deadline=None)
    def test_normalize_gives_unit_volume(self, n, x1, x2, x3):
        space = make_pn(n)
        m = normalize_to_unit_volume(space, Metric(x1, x2, x3))
        assert volume(space, m) == pytest.approx(1.0, rel=1e-10)


class TestVolumeOneSlice:
    def test_examples(self):
        assert x3_from_volume_one(3, 2, 0.5) == pytest.approx(1.0, rel=1e-14)
        assert x3_from_volume_one(2, 2, 2) == pytest.approx(0.25, rel=1e-14)

    @given(n=small_n, x1=positive_scales, x2=positive_scales)
    @settings(max_examples=60, deadline=None)
    def test_completed_triple_has_unit_volume(self, n, x1, x2):
        x3 = x3_from_volume_one(n, x1, x2)
        assert volume(make_pn(n), Metric(x1, x2, x3)) == pytest.approx(1.0, rel=1e-10)


class TestPhaseCoordinates:
    def test_to_phase(self):
        p = to_phase(2, 3, 1)
        assert (p.phi, p.psi) == (4.0, 2.0)

    def test_from_phase(self):
        assert from_phase(PhasePoint(4.0, 2.0, 2)) == pytest.approx(
            (3.0, 1.0, 1.0 / 3.0), rel=1e-14
        )

    def test_inadmissible_point_rejected(self):
        with pytest.raises(ValueError):
            PhasePoint(1.0, 1.5, 2)
        with pytest.raises(ValueError):
            PhasePoint(-1.0, 0.0, 2)

    @given(n=small_n, x1=positive_scales, x2=positive_scales)
    @settings(max_examples=80, deadline=None)
    def test_round_trip(self, n, x1, x2):
        y1, y2, _ = from_phase(to_phase(n, x1, x2))
        assert y1 == pytest.approx(x1, rel=1e-14)
        assert y2 == pytest.approx(x2, rel=1e-14)


class TestRicciPhase:
    def test_matches_normal_metric(self):
        spec = ricci_phase(PhasePoint(2.0, 0.0, 2))
        assert spec.values == (0.4375, 0.4375, 0.4375)

    @pytest.mark.parametrize("n", range(2, 9))
    def test_agrees_with_scale_factor_route(self, n):
        space = make_pn(n)
        for phi in (1.2, 2.0, 3.7, 5.0):
            for u in (-0.8, -0.3, 0.0, 0.45, 0.8):
                p = PhasePoint(phi, u * phi, n)
                got = ricci_phase(p).values
                want = ricci_coefficients(space, Metric(*from_phase(p))).values
                for a, b in zip(got, want):
                    assert a == pytest.approx(b, rel=1e-12, abs=1e-14)

    @given(n=small_n, phi=st.floats(min_value=0.5, max_value=6.0),
           u=st.floats(min_value=-0.9, max_value=0.9))
    @settings(max_examples=80, deadline=None)
    def test_psi_reflection_swaps_r1_r2_exactly(self, n, phi, u):
        psi = u * phi
        a = ricci_phase(PhasePoint(phi, psi, n))
        b = ricci_phase(PhasePoint(phi, -psi, n))
        assert (a.r1, a.r2, a.r3) == (b.r2, b.r1, b.r3)


class TestPositivity:
    def test_definitional_sums(self):
        s = spectrum(-0.1, -0.1, 1.0)
        assert k_positive(s, 8) is False  # sum of 8 smallest = -0.8
        assert k_positive(s, 12) is True  # total = 3.2

    def test_all_positive(self):
        s = spectrum(0.3, 0.1, 0.2)
        assert all(k_positive(s, k) for k in range(1, 13))
        assert negative_count(s) == 0
        assert smallest_k_positive(s) == 1

    def test_negative_count_uses_multiplicity(self):
        assert negative_count(spectrum(-1.0, 0.5, -0.2)) == 8
        assert negative_count(spectrum(-1.0, 0.5, -0.2, d1=8, d2=8, d3=4)) == 12

    def test_k_bounds_enforced(self):
        s = spectrum(1.0, 1.0, 1.0)
        for bad in (0, 13, -1):
            with pytest.raises(ValueError):
                k_positive(s, bad)

    def test_nonpositive_trace_has_no_k(self):
        assert smallest_k_positive(spectrum(-1.0, -1.0, 1.0)) is None  # trace -4

    @given(
        r1=st.floats(min_value=-5, max_value=5),
        r2=st.floats(min_value=-5, max_value=5),
        r3=st.floats(min_value=-5, max_value=5),
    )
    @settings(max_examples=100, deadline=None)
    def test_k_positive_monotone_in_k(self, r1, r2, r3):
        s = spectrum(r1, r2, r3)
        flags = [k_positive(s, k) for k in range(1, s.d + 1)]
        # once true, stays true: no True followed by False
        assert flags == sorted(flags)

    @given(
        r1=st.floats(min_value=-5, max_value=5),
        r2=st.floats(min_value=-5, max_value=5),
        r3=st.floats(min_value=-5, max_value=5),
    )
    @settings(max_examples=100, deadline=None)
    def test_smallest_k_matches_scan(self, r1, r2, r3):
        s = spectrum(r1, r2, r3)
        expected = next((k for k in range(1, s.d + 1) if k_positive(s, k)), None)
        assert smallest_k_positive(s) == expected
