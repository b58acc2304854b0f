"""Dynamics: derivative arithmetic, RK4 vs the closed-form transition
matrix, sun kinematics, and frame scaling."""

import math

import numpy as np
import pytest

from cwinspect.dynamics import (DynamicsParams, LabPose,
                                RelativeState, analytic_propagate,
                                cw_derivative, cw_matrices, cw_stm,
                                lab_to_space, rk4_zoh_map, space_to_lab, step,
                                step_vector, sun_vector)

P = DynamicsParams()
N = P.mean_motion


def make_state(vec, theta=0.0, t=0.0):
    vec = np.asarray(vec, dtype=float)
    return RelativeState(vec[:3], vec[3:], theta, t)


class TestDerivative:
    def test_equilibrium_at_origin(self):
        d = cw_derivative(make_state(np.zeros(6)), np.zeros(3), P)
        assert np.allclose(d[:6], 0.0)
        assert d[6] == pytest.approx(-0.001027)

    def test_radial_offset_acceleration(self):
        d = cw_derivative(make_state([100, 0, 0, 0, 0, 0]), np.zeros(3), P)
        assert d[3] == pytest.approx(3 * N**2 * 100)  # 3.164e-4 m/s^2
        assert d[3] == pytest.approx(3.164e-4, rel=1e-3)
        assert d[4] == d[5] == 0.0

    def test_radial_velocity_coupling(self):
        d = cw_derivative(make_state([0, 0, 0, 1, 0, 0]), np.zeros(3), P)
        assert d[3] == 0.0
        assert d[4] == pytest.approx(-2 * N)  # -2.054e-3 m/s^2
        assert d[4] == pytest.approx(-2.054e-3, rel=1e-4)

    def test_thrust_enters_over_mass(self):
        d = cw_derivative(make_state(np.zeros(6)), [1.2, 0, -0.6], P)
        assert np.allclose(d[3:6], np.array([1.2, 0, -0.6]) / P.mass)

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError):
            cw_derivative(make_state(np.zeros(6)), [np.nan, 0, 0], P)
        bad = make_state(np.zeros(6))
        bad.position[0] = np.inf
        with pytest.raises(ValueError):
            cw_derivative(bad, np.zeros(3), P)


class TestStep:
    def test_tiny_step_is_continuous(self):
        s = make_state([50, -20, 30, 0.1, -0.2, 0.05], theta=1.0)
        out = step(s, np.zeros(3), 1e-9, P)
        assert np.all(np.abs(out.vector() - s.vector()) < 1e-9)

    def test_nonpositive_dt_rejected(self):
        s = make_state(np.zeros(6))
        for dt in (0.0, -1.0):
            with pytest.raises(ValueError):
                step(s, np.zeros(3), dt, P)

    def test_matches_analytic_over_10s(self):
        s = make_state([100, 0, 0, 0, 0, 0])
        got = step(s, np.zeros(3), 10.0, P)
        ref = analytic_propagate(s, 10.0, P)
        assert np.all(np.abs(got.position - ref.position) < 1e-6)
        assert np.all(np.abs(got.velocity - ref.velocity) < 1e-8)

    def test_sun_angle_arithmetic(self):
        s = make_state(np.zeros(6), theta=3.42)
        out = step(s, np.zeros(3), 1000.0, P)
        assert out.sun_angle == pytest.approx(2.393, abs=1e-12)
        assert out.t == pytest.approx(1000.0)

    def test_linearity(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            x1, x2 = rng.normal(0, 50, 6), rng.normal(0, 50, 6)
            u1, u2 = rng.uniform(-1, 1, 3), rng.uniform(-1, 1, 3)
            lhs = step(make_state(x1 + x2), u1 + u2, 25.0, P).vector()
            rhs = (step(make_state(x1), u1, 25.0, P).vector()
                   + step(make_state(x2), u2, 25.0, P).vector()
                   - step(make_state(np.zeros(6)), np.zeros(3), 25.0, P).vector())
            assert np.all(np.abs(lhs - rhs) < 1e-9)

    def test_batched_matches_scalar(self):
        rng = np.random.default_rng(3)
        X = rng.normal(0, 100, (6, 8))
        u = rng.uniform(-1, 1, 3)
        batch = step_vector(X, u, 7.0, P)
        for j in range(8):
            single = step_vector(X[:, j], u, 7.0, P)
            assert np.allclose(batch[:, j], single, rtol=0, atol=1e-12)

    def test_zoh_map_reproduces_rk4(self):
        M, Nmat = rk4_zoh_map(P, 0.2)
        rng = np.random.default_rng(5)
        x = rng.normal(0, 80, 6)
        u = rng.uniform(-1, 1, 3)
        a = u / P.mass
        y = x.copy()
        for _ in range(10):
            y = M @ y + Nmat @ a
        ref = step_vector(x, u, 2.0, P, max_substep=0.2)
        assert np.all(np.abs(y - ref) < 1e-12)


class TestAnalytic:
    def test_identity_at_zero(self):
        s = make_state([12, -4, 9, 0.1, 0.2, -0.3], theta=0.5, t=3.0)
        out = analytic_propagate(s, 0.0, P)
        assert np.allclose(out.vector(), s.vector())
        assert out.sun_angle == s.sun_angle

    def test_driftfree_state_is_periodic(self):
        # ydot0 = -2 n x0 cancels the along-track secular drift, so the
        # in-plane motion closes after one orbit period
        s = make_state([100, 0, 0, 0, -2 * N * 100, 0])
        out = analytic_propagate(s, 2 * math.pi / N, P)
        assert np.all(np.abs(out.position - s.position) < 1e-6)

    def test_radial_offset_drifts_along_track(self):
        # a pure radial offset is NOT an equilibrium: it drifts -6*pi*2*x0
        # in-track per orbit; RK4 and the transition matrix must agree on it
        s = make_state([100, 0, 0, 0, 0, 0])
        T = 2 * math.pi / N
        ref = analytic_propagate(s, T, P)
        assert ref.position[1] == pytest.approx(-12 * math.pi * 100, rel=1e-12)
        got_vec = step_vector(s.vector(), np.zeros(3), T, P, max_substep=1.0)
        assert np.all(np.abs(got_vec[:3] - ref.position) < 1e-6)

    def test_cross_track_half_period(self):
        s = make_state([0, 0, 10, 0, 0, 0])
        out = analytic_propagate(s, math.pi / N, P)
        assert out.position[2] == pytest.approx(-10.0, abs=1e-9)

    def test_stm_derivative_matches_system_matrix(self):
        A, _ = cw_matrices(P)
        dt = 1e-7
        fd = (cw_stm(N, dt) - np.eye(6)) / dt
        assert np.all(np.abs(fd - A) < 1e-7)


class TestSunVector:
    def test_cardinal_angles(self):
        assert np.allclose(sun_vector(0.0), [1, 0, 0])
        assert np.allclose(sun_vector(math.pi / 2), [0, 1, 0], atol=1e-15)

    def test_initial_mission_angle(self):
        v = sun_vector(3.42)
        assert v[0] == pytest.approx(math.cos(3.42))
        assert v[1] == pytest.approx(math.sin(3.42))
        assert v[0] == pytest.approx(-0.9615, abs=5e-4)
        assert v[1] == pytest.approx(-0.2748, abs=5e-4)
        assert v[2] == 0.0

    def test_unit_norm_everywhere(self):
        rng = np.random.default_rng(11)
        for theta in rng.uniform(-50, 50, 200):
            assert abs(np.linalg.norm(sun_vector(theta)) - 1.0) < 1e-12


class TestFrameScaling:
    def test_position_division(self):
        s = make_state([21.8, 0, 0, 0, 0, 0])
        pose = space_to_lab(s, 65.0, 10.0)
        assert pose.position[0] == pytest.approx(21.8 / 65.0)
        assert pose.position[0] == pytest.approx(0.3354, abs=1e-4)

    def test_unit_scales_are_identity(self):
        s = make_state([5, -3, 2, 0.1, 0.2, 0.3], t=42.0)
        pose = space_to_lab(s, 1.0, 1.0)
        assert np.allclose(pose.position, s.position)
        assert np.allclose(pose.velocity, s.velocity)
        assert pose.t == s.t

    def test_time_division(self):
        s = make_state(np.zeros(6), t=10.0)
        assert space_to_lab(s, 65.0, 10.0).t == pytest.approx(1.0)

    def test_round_trip(self):
        s = make_state([21.8, -11.3, 41.8, 0.05, -0.2, 0.11], theta=3.42, t=77.0)
        pose = space_to_lab(s, 65.0, 10.0)
        back = lab_to_space(pose, 65.0, 10.0, sun_angle=s.sun_angle)
        assert np.all(np.abs(back.vector() - s.vector()) < 1e-12)
        assert back.t == pytest.approx(s.t, abs=1e-12)

    def test_nonpositive_scale_rejected(self):
        s = make_state(np.zeros(6))
        with pytest.raises(ValueError):
            space_to_lab(s, 0.0, 10.0)
        with pytest.raises(ValueError):
            lab_to_space(LabPose(np.zeros(3), np.zeros(3), 0.0), 65.0, -1.0)


class TestState:
    def test_sun_angle_wrap_accessor(self):
        s = make_state(np.zeros(6), theta=-1.0)
        assert s.sun_angle == -1.0  # stored unwrapped
        assert s.sun_angle_wrapped() == pytest.approx(2 * math.pi - 1.0)

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            RelativeState([np.nan, 0, 0], np.zeros(3))
