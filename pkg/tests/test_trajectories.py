import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mirror_dce.numerics import find_root
from mirror_dce.trajectories import (
    TrajectoryKind,
    TrajectoryParams,
    average_acceleration,
    coordinate_period,
    directional_acceleration,
    position,
    proper_period,
    proper_time,
    relativity_estimator,
    solve_acceleration_parameter,
    worldline_sample,
)
from mirror_dce.trajectories import _period_mean, _raw_position
from oracles import abar_quadrature, period_mean_quadrature, velocity_fd

TWO_PI = 2.0 * math.pi
V = 0.4 * 2.99792458e8


def params(kind, A, fd, v=V):
    return TrajectoryParams(TrajectoryKind(kind), A, TWO_PI * fd, v)


class TestParamsValidation:
    def test_positive_fields_required(self):
        with pytest.raises(ValueError):
            params("sa", -1.0, 10e9)
        with pytest.raises(ValueError):
            TrajectoryParams(TrajectoryKind.SA, 1e18, -1.0, V)
        with pytest.raises(ValueError):
            TrajectoryParams(TrajectoryKind.SA, 1e18, 1e10, 2.0 * 2.99792458e8)

    def test_sm_superluminal_rejected(self):
        wd = TWO_PI * 18e9
        R = 1.01 * V / wd
        with pytest.raises(ValueError, match="light speed"):
            TrajectoryParams(TrajectoryKind.SM, R * wd**2, wd, V)

    def test_sm_at_margin_rejected_but_below_ok(self):
        wd = TWO_PI * 18e9
        with pytest.raises(ValueError):
            TrajectoryParams(TrajectoryKind.SM, V * wd, wd, V)
        p = TrajectoryParams(TrajectoryKind.SM, 0.95 * V * wd, wd, V)
        assert p.R == pytest.approx(0.95 * V / wd)

    def test_R_only_for_sm(self):
        with pytest.raises(ValueError, match="SM"):
            _ = params("sa", 1e18, 10e9).R


class TestPosition:
    def test_sm_starts_at_minus_R(self, sm_baseline):
        assert position(sm_baseline, 0.0) == pytest.approx(-sm_baseline.R, rel=1e-12)

    def test_sa_zero_crossing_at_quarter_period(self, sa_comparison):
        t = math.pi / (2.0 * sa_comparison.omega_d)
        amp = abs(position(sa_comparison, 0.0))
        assert abs(position(sa_comparison, t)) < 1e-12 * amp

    def test_aua_start_is_raw_offset_minus_mean(self, aua_comparison):
        p = aua_comparison
        raw0 = v_sq_over_a = p.v**2 / p.A
        assert _raw_position(p, 0.0) == pytest.approx(raw0, rel=1e-12)
        mean = period_mean_quadrature(
            lambda t: _raw_position(p, t), coordinate_period(p)
        )
        assert _period_mean(p) == pytest.approx(mean, rel=1e-9)
        assert position(p, 0.0) == pytest.approx(v_sq_over_a - mean, rel=1e-9)

    @pytest.mark.parametrize("kind", ["sm", "sa", "aua"])
    def test_centered_mean_is_zero(self, kind):
        p = params(kind, 20e18 if kind != "sm" else 9e17, 14.6e9)
        mean = period_mean_quadrature(
            lambda t: position(p, t), coordinate_period(p)
        )
        amp = abs(position(p, 0.0))
        assert abs(mean) < 1e-9 * amp

    @pytest.mark.parametrize("kind", ["sm", "sa", "aua"])
    def test_periodicity(self, kind):
        p = params(kind, 20e18 if kind != "sm" else 9e17, 14.6e9)
        t = np.linspace(0.0, coordinate_period(p), 257)
        z0 = position(p, t)
        z1 = position(p, t + coordinate_period(p))
        np.testing.assert_allclose(z1, z0, rtol=1e-9, atol=1e-9 * np.max(np.abs(z0)))

    @pytest.mark.parametrize("kind", ["sm", "sa", "aua"])
    def test_subluminal_speed_everywhere(self, kind):
        A = {"sm": 9.054e17, "sa": 13.725e18, "aua": 20e18}[kind]
        fd = {"sm": 18e9, "sa": 14.6e9, "aua": 14.6e9}[kind]
        p = params(kind, A, fd)
        t = np.linspace(0.0, coordinate_period(p), 10_000)
        speeds = np.array([abs(velocity_fd(p, ti)) for ti in t[:: 40]])
        assert np.all(speeds < p.v)
        # denser sweep with coarser differences
        h = coordinate_period(p) * 1e-5
        speeds_dense = np.abs(position(p, t + h) - position(p, t - h)) / (2 * h)
        assert np.all(speeds_dense < p.v)


class TestDirectionalAcceleration:
    def test_sm_peak_value(self, sm_baseline):
        assert directional_acceleration(sm_baseline, 0.0) == pytest.approx(
            sm_baseline.A, rel=1e-12
        )

    def test_sa_peak_value(self, sa_comparison):
        assert directional_acceleration(sa_comparison, 0.0) == pytest.approx(
            2.0 * sa_comparison.A, rel=1e-12
        )

    def test_aua_constant_magnitude_alternating_sign(self, aua_comparison):
        p = aua_comparison
        t = np.linspace(0.0, 2.0 * coordinate_period(p), 1001)
        alpha = directional_acceleration(p, t)
        np.testing.assert_allclose(np.abs(alpha), p.A, rtol=1e-14)
        assert set(np.unique(np.sign(alpha))) == {-1.0, 1.0}
        # sign flips at quarter and three-quarter period
        tp = coordinate_period(p)
        assert directional_acceleration(p, 0.1 * tp) > 0
        assert directional_acceleration(p, 0.4 * tp) < 0
        assert directional_acceleration(p, 0.6 * tp) < 0
        assert directional_acceleration(p, 0.9 * tp) > 0

    def test_sm_double_peaks_when_relativistic(self):
        wd = TWO_PI * 18e9

        def count_maxima(x_ratio):
            p = TrajectoryParams(TrajectoryKind.SM, x_ratio * V * wd, wd, V)
            t = np.linspace(0.0, coordinate_period(p), 4096, endpoint=False)
            a = np.abs(directional_acceleration(p, t))
            interior = (a[1:-1] > a[:-2]) & (a[1:-1] > a[2:])
            wrap = (a[0] > a[-1]) & (a[0] > a[1]), (a[-1] > a[-2]) & (a[-1] > a[0])
            return int(np.sum(interior)) + sum(wrap)

        assert count_maxima(0.3) == 2
        assert count_maxima(0.5) == 2
        assert count_maxima(0.95) > 2

    def test_matches_second_derivative_of_position(self, sa_comparison):
        # alpha = gamma^3 * d2z/dt2 for 1D motion
        p = sa_comparison
        for frac in (0.13, 0.37, 0.81):
            t = frac * coordinate_period(p)
            h = 1e-6 * coordinate_period(p)
            acc = (position(p, t + h) - 2 * position(p, t) + position(p, t - h)) / h**2
            gamma = 1.0 / math.sqrt(1.0 - (velocity_fd(p, t) / p.v) ** 2)
            assert directional_acceleration(p, t) == pytest.approx(
                gamma**3 * acc, rel=1e-4
            )


class TestProperTime:
    @pytest.mark.parametrize("kind", ["sm", "sa", "aua"])
    def test_starts_at_zero(self, kind):
        p = params(kind, 1e18, 10e9)
        assert proper_time(p, 0.0) == 0.0

    def test_sm_nonrelativistic_limit(self):
        wd = TWO_PI * 18e9
        p = TrajectoryParams(TrajectoryKind.SM, 1e-6 * V * wd, wd, V)
        for t in (0.3 / wd, 2.0 / wd, 11.0 / wd):
            assert proper_time(p, t) == pytest.approx(t, rel=1e-10)

    @pytest.mark.parametrize("kind", ["sm", "sa", "aua"])
    def test_strictly_increasing_with_unit_bounded_rate(self, kind):
        A = {"sm": 9.054e17, "sa": 13.725e18, "aua": 20e18}[kind]
        fd = {"sm": 18e9, "sa": 14.6e9, "aua": 14.6e9}[kind]
        p = params(kind, A, fd)
        t = np.linspace(0.0, 2.0 * coordinate_period(p), 2001)
        tau = proper_time(p, t)
        dtau = np.diff(tau)
        dt = np.diff(t)
        assert np.all(dtau > 0.0)
        assert np.all(dtau <= dt * (1.0 + 1e-12))

    @pytest.mark.parametrize("kind", ["sm", "sa", "aua"])
    def test_one_period_matches_closed_form_proper_period(self, kind):
        A = {"sm": 9.054e17, "sa": 13.725e18, "aua": 20e18}[kind]
        fd = {"sm": 18e9, "sa": 14.6e9, "aua": 14.6e9}[kind]
        p = params(kind, A, fd)
        assert proper_time(p, coordinate_period(p)) == pytest.approx(
            proper_period(p), rel=1e-12
        )

    def test_aua_proper_period_against_numeric_inversion(self, aua_comparison):
        # invert tau(t) numerically: the closed-form proper period must map
        # back to exactly one coordinate period
        p = aua_comparison
        tau_p = proper_period(p)
        t_p = coordinate_period(p)
        t_star = find_root(
            lambda t: proper_time(p, t) - tau_p, 0.5 * t_p, 2.0 * t_p, tol=1e-13
        )
        assert t_star == pytest.approx(t_p, rel=1e-10)

    def test_aua_closed_form_value(self, aua_comparison):
        p = aua_comparison
        expected = (4.0 * p.v / p.A) * math.asinh(
            p.A * math.pi / (2.0 * p.v * p.omega_d)
        )
        assert proper_period(p) == pytest.approx(expected, rel=1e-14)


class TestAverageAcceleration:
    def test_sm_baseline_value(self, sm_baseline):
        assert average_acceleration(sm_baseline) == pytest.approx(9.054e17, rel=0.01)

    def test_sa_comparison_value(self, sa_comparison):
        assert average_acceleration(sa_comparison) == pytest.approx(20e18, rel=0.01)

    def test_aua_exact(self, aua_comparison):
        assert average_acceleration(aua_comparison) == aua_comparison.A

    @pytest.mark.parametrize(
        "kind,A,fd",
        [
            ("sm", 9.054e17, 18e9),
            ("sm", 5e18, 25e9),
            ("sa", 13.725e18, 14.6e9),
            ("sa", 1e18, 8e9),
            ("aua", 20e18, 14.6e9),
        ],
    )
    def test_closed_form_matches_quadrature_oracle(self, kind, A, fd):
        p = params(kind, A, fd)
        assert average_acceleration(p) == pytest.approx(
            abar_quadrature(p), rel=1e-6
        )


class TestSolveAccelerationParameter:
    def test_aua_identity(self):
        assert solve_acceleration_parameter(TrajectoryKind.AUA, 3.3e18, 1e11, V) == 3.3e18

    def test_sa_comparison_point(self):
        alpha = solve_acceleration_parameter(
            TrajectoryKind.SA, 20e18, TWO_PI * 14.6e9, V
        )
        assert alpha == pytest.approx(13.725e18, rel=0.01)

    def test_sm_baseline_point(self):
        A = solve_acceleration_parameter(TrajectoryKind.SM, 9.054e17, TWO_PI * 18e9, V)
        R = A / (TWO_PI * 18e9) ** 2
        assert R == pytest.approx(0.11e-3, rel=0.01)

    @pytest.mark.parametrize("kind", ["sm", "sa", "aua"])
    @pytest.mark.parametrize("target", [5e17, 4e18, 22e18])
    def test_round_trip_identity(self, kind, target):
        wd = TWO_PI * 16e9
        A = solve_acceleration_parameter(TrajectoryKind(kind), target, wd, V)
        p = TrajectoryParams(TrajectoryKind(kind), A, wd, V)
        assert average_acceleration(p) == pytest.approx(target, rel=1e-6)

    def test_sm_unreachable_target_raises(self):
        # the subluminal margin caps atanh(x); far beyond it must fail loudly
        with pytest.raises(ValueError, match="ceiling"):
            solve_acceleration_parameter(TrajectoryKind.SM, 1e25, TWO_PI * 1e9, V)

    @given(
        kind=st.sampled_from([TrajectoryKind.SA, TrajectoryKind.SM]),
        target=st.floats(1e17, 3e19),
        fd=st.floats(8e9, 35e9),
    )
    def test_monotone_inversion_property(self, kind, target, fd):
        wd = TWO_PI * fd
        A = solve_acceleration_parameter(kind, target, wd, V)
        p = TrajectoryParams(kind, A, wd, V)
        assert average_acceleration(p) == pytest.approx(target, rel=1e-8)


class TestLimitsAndEstimators:
    def test_sa_reduces_to_sm_at_low_acceleration(self):
        wd = TWO_PI * 12e9
        alpha = 1e-3 * V * wd
        sa = TrajectoryParams(TrajectoryKind.SA, alpha, wd, V)
        sm = TrajectoryParams(TrajectoryKind.SM, 2.0 * alpha, wd, V)  # R = 2a/w^2
        t = np.linspace(0.0, coordinate_period(sa), 512)
        z_sa = position(sa, t)
        z_sm = position(sm, t)
        amp = float(np.max(np.abs(z_sm)))
        assert np.max(np.abs(z_sa - z_sm)) < 1e-3 * amp

    def test_relativity_estimator_baseline(self, sm_baseline):
        assert relativity_estimator(sm_baseline) == pytest.approx(0.419, rel=0.01)

    def test_relativity_estimator_small_acceleration(self):
        p = params("aua", 1e6, 10e9)
        assert relativity_estimator(p) < 1e-9

    def test_relativity_estimator_aua_comparison(self, aua_comparison):
        # direct arithmetic: abar * t_p / v = 2e19 * (1/14.6GHz) / 0.4c
        expected = 20e18 * (1.0 / 14.6e9) / V
        assert relativity_estimator(aua_comparison) == pytest.approx(expected, rel=1e-12)
        assert relativity_estimator(aua_comparison) == pytest.approx(11.42, rel=1e-3)


class TestWorldlineSample:
    def test_fields_are_consistent(self, sa_comparison):
        t = 0.23 * coordinate_period(sa_comparison)
        s = worldline_sample(sa_comparison, t)
        assert s.t == t
        assert s.tau == proper_time(sa_comparison, t)
        assert s.z == position(sa_comparison, t)
        assert s.alpha_dir == directional_acceleration(sa_comparison, t)
