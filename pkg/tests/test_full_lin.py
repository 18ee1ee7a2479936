import numpy as np
import pytest

from wavespec.espec import asymptotic_matrix
from wavespec.exceptions import HierarchyError
from wavespec.full_lin import (
    ChartPointCP2,
    LinState3,
    ToyState,
    WedgeState,
    asymptotic_eigs,
    convergence_run,
    epsilon_bar,
    fast_chart_rhs,
    fubini_study_dist,
    in_window,
    lin_fun,
    lin_matrix,
    lin_rhs,
    normalized_lin_rhs,
    proj_rhs,
    rescaled_layer,
    second_compound,
    slow_chart_rhs,
    toy_closed_form,
    toy_exchange,
    wedge_eig_check,
    wedge_matrix,
    wedge_rhs,
)
from wavespec.models import FastState, WaveProfile

C = 0.2


def random_matrix(seed):
    rng = np.random.default_rng(seed)
    return rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))


class TestPluecker:
    def test_diagonal(self):
        out = second_compound(np.diag([1.0, 2.0, 5.0]))
        np.testing.assert_allclose(out, np.diag([3.0, 7.0, 6.0]))

    def test_derivative_of_wedge(self):
        a = random_matrix(1)
        rng = np.random.default_rng(2)
        y1, y2 = rng.normal(size=3) + 1j * rng.normal(size=3), rng.normal(size=3)
        lhs = WedgeState.of(a @ y1, y2).as_array() + WedgeState.of(y1, a @ y2).as_array()
        rhs = second_compound(a) @ WedgeState.of(y1, y2).as_array()
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)

    @pytest.mark.parametrize("seed", range(5))
    def test_eigenvalue_sums(self, seed):
        assert wedge_eig_check(random_matrix(seed))

    def test_shape_checked(self):
        with pytest.raises(ValueError):
            second_compound(np.eye(2))


class TestCharts:
    def test_largest_component_normalized(self):
        pt = ChartPointCP2.from_homogeneous([1.0, 2.0, 4.0])
        assert pt.chart == "v0"
        assert pt.coords == pytest.approx((0.25, 0.5))
        assert pt.to_chart("u0").coords == pytest.approx((2.0, 4.0))
        np.testing.assert_allclose(pt.to_homogeneous(), [0.25, 0.5, 1.0])

    def test_zero_vector(self):
        with pytest.raises(ValueError):
            ChartPointCP2.from_homogeneous([0.0, 0.0, 0.0])

    def test_outside_chart(self):
        with pytest.raises(ValueError):
            ChartPointCP2.from_homogeneous([0.0, 1.0, 1.0], chart="u0")

    def test_unknown_chart(self):
        with pytest.raises(ValueError):
            ChartPointCP2("w0", (0.0, 0.0))


class TestLinearFlows:
    base = FastState(0.4, 0.05, 0.5)
    lam = 0.3 - 0.7j

    def test_slow_clock_is_fast_over_eps(self):
        fast = lin_matrix(0.4, C, 0.01, self.lam, "fast")
        slow = lin_matrix(0.4, C, 0.01, self.lam, "slow")
        np.testing.assert_allclose(slow, fast / 0.01)
        with pytest.raises(ValueError):
            lin_matrix(0.4, C, 0.0, self.lam, "slow")

    def test_fast_chart_formula(self):
        b1, b2, eps = 0.4 + 0.2j, -0.3 + 0.5j, 0.01
        pt = ChartPointCP2("u0", (b1, b2))
        np.testing.assert_allclose(
            proj_rhs(pt, self.lam, eps, self.base, C),
            fast_chart_rhs(b1, b2, self.base.u, self.lam, eps, C),
            rtol=1e-12,
        )

    def test_slow_chart_formula(self):
        b1, b2, eps = 0.4 + 0.2j, -0.3 + 0.5j, 0.01
        pt = ChartPointCP2("v0", (b1, b2))
        np.testing.assert_allclose(
            proj_rhs(pt, self.lam, eps, self.base, C, timescale="slow"),
            slow_chart_rhs(b1, b2, self.base.u, self.lam, eps, C),
            rtol=1e-12,
        )

    def test_normalized_flow_preserves_norm(self):
        a = random_matrix(3)
        y = np.array([1.0, 0.5j, -0.2])
        assert np.vdot(y, normalized_lin_rhs(a, y)).real == pytest.approx(0.0, abs=1e-12)

    def test_lin_rhs_at_rest_state(self):
        eps = 0.01
        state = LinState3(1.0, 0.5j, -2.0, FastState(0.0, 0.0, 0.0), self.lam, eps, C)
        expected = asymptotic_matrix(self.lam, eps, "minus", "fast", C).matrix @ \
            state.as_array()
        np.testing.assert_allclose(lin_rhs(state), expected)
        np.testing.assert_allclose(lin_rhs(state, "slow"), expected / eps)

    def test_lin_state_validation(self):
        with pytest.raises(ValueError):
            LinState3(1.0, 0.0, 0.0, self.base, self.lam, -0.1, C)
        with pytest.raises(ValueError):
            LinState3(1.0, 0.0, 0.0, self.base, self.lam, 0.01, 0.0)

    def test_lin_fun_follows_profile(self):
        eps = 0.01
        states = np.tile([0.4, 0.05, 0.5], (2, 1))
        profile = WaveProfile(grid=np.array([-10.0, 10.0]), states=states, c=C, eps=eps)
        y = np.array([1.0, -1j, 0.5])
        expected = lin_matrix(0.4, C, eps, self.lam) @ y
        np.testing.assert_allclose(lin_fun(profile, self.lam)(3.0, y), expected)
        np.testing.assert_allclose(lin_fun(profile, self.lam, "slow")(0.05, y),
                                   expected / eps)

    def test_layer_limit_ignores_lambda(self):
        b1, b2 = 0.4 + 0.2j, -0.3 + 0.5j
        np.testing.assert_allclose(fast_chart_rhs(b1, b2, 0.4, 1.0, 0.0, C),
                                   fast_chart_rhs(b1, b2, 0.4, 5.0 - 2j, 0.0, C))

    def test_wedge_at_rest_state(self):
        eps = 1e-3
        assert wedge_eig_check(lin_matrix(0.0, C, eps, 1.0))
        w = WedgeState(1.0, 2j, -0.5)
        np.testing.assert_allclose(
            wedge_rhs(w, 1.0, eps, FastState(0.0, 0.0, 0.0), C),
            wedge_matrix(0.0, 1.0, eps, C) @ w.as_array(),
        )
        sums = np.sort(np.linalg.eigvals(wedge_matrix(0.0, 1.0, eps, C)).real)
        assert sums[1] < -1.0
        assert abs(sums[2]) < 0.01


class TestAsymptoticEigs:
    def test_limits_of_eigenvectors(self):
        eigs = asymptotic_eigs(0.5, 1e-3, "minus", C)
        for k in range(3):
            assert fubini_study_dist(eigs.vectors[:, k], eigs.reduced[:, k]) < 1e-2
        assert eigs.values[1] / 1e-3 == pytest.approx(eigs.nu[0], rel=1e-2)

    def test_hierarchy_violation(self):
        with pytest.raises(HierarchyError):
            asymptotic_eigs(-5.0, 0.01, "minus", C)

    def test_epsilon_bar(self):
        assert epsilon_bar([0.5], "minus", C) == pytest.approx(0.1)
        with pytest.raises(HierarchyError):
            epsilon_bar([-5.0], "minus", C)

    def test_needs_positive_eps(self):
        with pytest.raises(ValueError):
            asymptotic_eigs(0.5, 0.0, "minus", C)


class TestFubiniStudy:
    def test_scale_invariant(self):
        x = np.array([1.0, 2j])
        assert fubini_study_dist(x, (3 - 1j) * x) == pytest.approx(0.0, abs=1e-8)
        assert fubini_study_dist([1.0, 0.0], [0.0, 1.0]) == pytest.approx(1.0)

    def test_zero_vector(self):
        with pytest.raises(ValueError):
            fubini_study_dist([0.0, 0.0], [1.0, 0.0])

    def test_window_excludes_jump(self):
        mask = in_window([0.01, 0.3, 0.57, 0.6, 0.9, 0.96], 7 / 12, 5 / 6)
        assert mask.tolist() == [False, True, False, False, True, False]


class TestToyExchange:
    def test_validation(self):
        with pytest.raises(ValueError):
            ToyState(b=1.0, y=1.0, db=0.0, dy=1.0, eps=0.2, lam=1.0)
        with pytest.raises(ValueError):
            ToyState(b=1.0, y=0.0, db=0.0, dy=1.0, eps=0.01, lam=1.0)

    def test_closed_form_initial_value(self):
        ics = ToyState(b=1.0, y=2.0, db=0.3 + 0.1j, dy=1.0, eps=0.01, lam=2 + 1j)
        np.testing.assert_allclose(toy_closed_form(ics, 0.0), [1.0, 2.0, 0.3 + 0.1j, 1.0])

    @pytest.mark.parametrize("eps", [0.02, 0.01, 0.005])
    def test_angle_bound(self, eps):
        ics = ToyState(b=1.0, y=1.0, db=0.3 + 0.1j, dy=1.0, eps=eps, lam=2 + 1j)
        report = toy_exchange(ics)
        assert report.closed_form_error <= 1e-9
        assert report.bound_holds
        assert report.angle > 0.0


class TestRescaledLayer:
    def test_closed_forms(self, orbit):
        layer = rescaled_layer(0.4 + 0.3j, orbit, K=2.0, s0=0.5)
        assert layer.g_error < 1e-6
        assert layer.u_identity_error < 1e-6
        assert layer.quadrature_error < 1e-6
        assert layer.s_end == pytest.approx(layer.s_closed_form, rel=1e-6)
        assert layer.s_jump == pytest.approx(layer.s_closed_form, rel=1e-9)

    def test_other_integration_constant(self, orbit):
        layer = rescaled_layer(0.4, orbit, C=0.1)
        assert layer.C == 0.1
        assert layer.g_error < 1e-6
        assert layer.s_end == pytest.approx(layer.s_closed_form, rel=1e-6, abs=1e-9)

    def test_default_and_positive_fold_constant(self, orbit):
        default = rescaled_layer(0.4 + 0.3j, orbit)
        assert default.C == pytest.approx(-orbit.p_F)
        assert default.g_error < 1e-6
        assert default.s_jump == pytest.approx(default.s_closed_form, rel=1e-9)

        flipped = rescaled_layer(0.4 + 0.3j, orbit, C=orbit.p_F)
        assert flipped.C == pytest.approx(orbit.p_F)
        assert flipped.g_error < 1e-6
        assert flipped.u_identity_error < 1e-6
        assert flipped.s_end == pytest.approx(flipped.s_closed_form, rel=1e-6, abs=1e-9)


class TestConvergence:
    def test_eps_list_descending(self, orbit):
        with pytest.raises(ValueError):
            convergence_run(15.0, eps_list=[1e-3, 1e-2], orbit=orbit)

    @pytest.mark.slow
    def test_distances_shrink(self, orbit):
        report = convergence_run(15.0, orbit=orbit, samples=5000)
        assert report.monotone
        assert all(r.window_samples > 0 for r in report.results)
