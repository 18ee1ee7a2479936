import numpy as np
import pytest

from wavespec.exceptions import ModelError, ShootingError
from wavespec.models import FastState, SlowState, Tolerances
from wavespec.polynomials import default_model
from wavespec.wave import (
    TAKE_OFF,
    check_hypotheses,
    fast_jacobian,
    find_c0,
    find_c_eps,
    layer_trajectory,
    matching_defect,
    profile_residual,
    rhs,
    saddle_frame,
)


class TestRightHandSides:
    def test_desingularized_rest_states(self):
        np.testing.assert_allclose(rhs(SlowState(0.0, 0.0), 0.2), [0.0, 0.0])
        np.testing.assert_allclose(rhs(SlowState(1.0, 0.2), 0.2), [0.0, 0.0], atol=1e-15)

    def test_reduced_is_desingularized_over_d(self):
        model = default_model()
        state = SlowState(0.3, 0.01)
        reduced = rhs(state, 0.2, system="reduced")
        desing = rhs(state, 0.2, system="desingularized")
        assert reduced[0] == pytest.approx(desing[0] / model.D(0.3))
        assert reduced[1] * model.D(0.3) == pytest.approx(desing[1])

    def test_reduced_rejects_fold(self):
        with pytest.raises(ModelError):
            rhs(SlowState(7 / 12, 0.1), 0.2, system="reduced")

    def test_slow_clock_is_fast_over_eps(self):
        state, c, eps = FastState(0.4, 0.05, 0.5), 0.2, 0.01
        fast = rhs(state, c, eps, system="full_fast")
        slow = rhs(state, c, eps, system="full_slow")
        np.testing.assert_allclose(slow, fast / eps)

    def test_full_slow_needs_eps(self):
        with pytest.raises(ModelError):
            rhs(FastState(0.4, 0.05, 0.5), 0.2, 0.0, system="full_slow")

    def test_layer_freezes_slow_variables(self):
        out = rhs(FastState(0.4, 0.05, 0.5), 0.2, system="layer")
        assert out[1] == out[2] == 0.0

    def test_unknown_system(self):
        with pytest.raises(ValueError):
            rhs(SlowState(0.1, 0.0), 0.2, system="bogus")

    def test_jacobian_matches_finite_differences(self):
        model = default_model()
        y, c, eps, h = np.array([0.4, 0.05, 0.5]), 0.2, 0.01, 1e-7
        jac = fast_jacobian(y[0], c, eps, model)
        for k in range(3):
            step = np.zeros(3)
            step[k] = h
            column = (rhs(y + step, c, eps, "full_fast") - rhs(y - step, c, eps,
                                                                "full_fast")) / (2 * h)
            np.testing.assert_allclose(jac[:, k], column, atol=1e-8)


class TestSaddleFrame:
    def test_singular_saddle(self):
        frame = saddle_frame("minus", 0.2, 0.0)
        assert frame.eigenvalues[0] < 0 < frame.eigenvalues[1]
        assert np.prod(frame.eigenvalues) == pytest.approx(-21 / 8)

    def test_full_hierarchy(self):
        frame = saddle_frame("plus", 0.2, 0.001)
        mu_f, mu_s1, mu_s2 = frame.eigenvalues
        assert mu_f < mu_s1 < 0 < mu_s2
        np.testing.assert_allclose(frame.point, [1.0, 0.2, default_model().F(1.0)])

    def test_rejects_unknown_endpoint(self):
        with pytest.raises(ValueError):
            saddle_frame("middle", 0.2, 0.0)


class TestSingularOrbit:
    def test_wavespeed(self, orbit):
        assert orbit.c0 == pytest.approx(0.199362, abs=1e-4)
        assert abs(orbit.defect) <= 1e-9

    def test_segments_end_on_fold_and_jump(self, orbit):
        model = default_model()
        assert orbit.left_segment.state_at(0.0)[0] == pytest.approx(model.u_F, abs=1e-9)
        assert orbit.right_segment.state_at(0.0)[0] == pytest.approx(model.u_J, abs=1e-9)
        assert orbit.p_F == pytest.approx(orbit.p_J, abs=1e-9)

    def test_denominator_positive(self, orbit):
        assert orbit.c0 * default_model().u_F - orbit.p_F > 0

    def test_hypotheses(self, orbit):
        report = check_hypotheses(orbit)
        assert report.monotone
        assert report.transversal

    @pytest.mark.slow
    def test_insensitive_to_halved_take_off(self, orbit):
        halved = find_c0(offset=TAKE_OFF / 2)
        assert halved.c0 == pytest.approx(orbit.c0, abs=1e-8)
        assert halved.p_F == pytest.approx(orbit.p_F, abs=1e-8)
        assert halved.p_J == pytest.approx(orbit.p_J, abs=1e-8)

    def test_defect_changes_sign(self):
        assert matching_defect(0.19) * matching_defect(0.23) < 0

    def test_bracket_without_root(self):
        with pytest.raises(ShootingError):
            find_c0((0.23, 0.25))

    def test_invalid_bracket(self):
        with pytest.raises(ValueError):
            find_c0((0.23, 0.19))


class TestLayer:
    def test_layer_lands_on_jump_point(self, orbit):
        model = default_model()
        layer = layer_trajectory(model.u_F + 1e-3, orbit.p_F, orbit.v_F, orbit.c0)
        assert layer.target == pytest.approx(model.u_J, abs=1e-10)
        np.testing.assert_allclose(layer.states[:, 1], orbit.p_F, atol=1e-14)
        np.testing.assert_allclose(layer.states[:, 2], orbit.v_F, atol=1e-14)
        assert np.all(np.diff(layer.states[:, 0]) > 0)

    def test_start_on_critical_manifold(self):
        model = default_model()
        with pytest.raises(ModelError):
            layer_trajectory(0.0, 0.0, model.F(0.0), 0.2)


class TestPerturbedWave:
    def test_eps_out_of_range(self):
        with pytest.raises(ValueError):
            find_c_eps(0.05)

    @pytest.mark.slow
    def test_wavespeed_at_small_eps(self, orbit):
        tol = Tolerances(1e-10, 1e-12, "LSODA")
        c, profile = find_c_eps(1e-3, c_guess=orbit.c0, tol=tol)
        assert c == pytest.approx(0.20637, abs=5e-3)
        assert profile.diagnostics["newton_residual"] < 1e-8
        assert profile.state_at(0.0)[0] == pytest.approx(0.7, abs=1e-6)
        assert profile_residual(profile) < 1e-3
