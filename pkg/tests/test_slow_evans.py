import numpy as np
import pytest

from wavespec.contour import SpectralContour
from wavespec.exceptions import GridError, NonHyperbolicError
from wavespec.full_lin import fubini_study_dist
from wavespec.models import JumpData, RiccatiPoint, SlowLinState, SlowState
from wavespec.polynomials import default_model
from wavespec.slow_evans import (
    EvansSettings,
    desing_lin_rhs,
    evaluate_many,
    fiber_transport,
    find_real_eigenvalues,
    frozen_fixed_points,
    integrate_linear,
    jump_linear,
    jump_projective,
    riccati_evans,
    riccati_path,
    riccati_rhs,
    section_time,
    shoot_section,
    sl_residual,
    sl_weight,
    slow_eigenfunction,
    st_rhs,
    transport_projective,
    winding,
    xy_flow,
    xy_rhs,
)

C = 0.2
JD = JumpData(u_F=7 / 12, u_J=5 / 6, p_F=0.05, v_F=245 / 432, c=C)


class TestPointwiseFlows:
    base = SlowState(0.3, 0.02)

    def test_riccati_is_quotient_of_linear_flow(self):
        P, V, lam = 0.7 - 0.2j, 1.3 + 0.4j, 0.25 - 0.6j
        dP, dV = desing_lin_rhs(SlowLinState(P, V, self.base), lam, C)
        expected = (dP * V - P * dV) / V**2
        got = riccati_rhs(RiccatiPoint("S", P / V, self.base), lam, C)
        assert got == pytest.approx(expected, rel=1e-12)

    def test_t_chart_is_quotient(self):
        P, V, lam = 0.7 - 0.2j, 1.3 + 0.4j, 0.25 - 0.6j
        dP, dV = desing_lin_rhs(SlowLinState(P, V, self.base), lam, C)
        expected = (dV * P - V * dP) / P**2
        got = riccati_rhs(RiccatiPoint("T", V / P, self.base), lam, C)
        assert got == pytest.approx(expected, rel=1e-12)

    def test_real_split_of_s_chart(self):
        X, Y, mu, omega = 0.4, -0.3, -0.2, 0.5
        dS = riccati_rhs(RiccatiPoint("S", complex(X, Y), self.base), complex(mu, omega), C)
        dX, dY = xy_rhs(self.base.U, X, Y, mu, omega, C)
        assert complex(dX, dY) == pytest.approx(dS, rel=1e-12)

    def test_real_split_of_t_chart(self):
        s, t, mu, omega = 0.4, -0.3, -0.2, 0.5
        dT = riccati_rhs(RiccatiPoint("T", complex(s, t), self.base), complex(mu, omega), C)
        ds, dt = st_rhs(self.base.U, s, t, mu, omega, C)
        assert complex(ds, dt) == pytest.approx(dT, rel=1e-12)

    def test_needs_base_point(self):
        with pytest.raises(ValueError):
            riccati_rhs(RiccatiPoint("S", 0.1 + 0j), 0.0, C)


class TestFrozenFixedPoints:
    def test_roots_and_stability(self):
        model = default_model()
        lam = 0.3 + 0.2j
        attractor, repeller = frozen_fixed_points(0.0, lam, C)
        for root in (attractor, repeller):
            residual = model.D(0.0) * root**2 - C * root + (model.dR(0.0) - lam)
            assert abs(residual) < 1e-12
        assert (2 * model.D(0.0) * attractor - C).real < 0
        assert (2 * model.D(0.0) * repeller - C).real > 0

    def test_backward_swaps(self):
        forward = frozen_fixed_points(1.0, 0.1, C)
        backward = frozen_fixed_points(1.0, 0.1, C, backward=True)
        assert backward == forward[::-1]

    def test_double_root(self):
        model = default_model()
        lam = model.dR(0.0) - C * C / (4 * model.D(0.0))
        with pytest.raises(NonHyperbolicError):
            frozen_fixed_points(0.0, lam, C)


class TestJump:
    def test_linear_and_projective_agree(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            P, V, lam = rng.normal(size=3) + 1j * rng.normal(size=3)
            P2, V2 = jump_linear(P, V, lam, JD)
            assert P2 / V2 == pytest.approx(jump_projective(P / V, lam, JD), rel=1e-12)

    def test_identity_at_fold(self):
        assert jump_projective(0.3 - 0.1j, 1.0, JD, u=JD.u_F) == pytest.approx(0.3 - 0.1j)

    def test_closed_form_solves_fiber_ode(self):
        for s0, lam in ((0.0, 0.0), (0.4 - 0.2j, 1.5 + 0.3j), (-2.0, -0.7)):
            integrated = fiber_transport(s0, lam, JD)
            assert integrated == pytest.approx(jump_projective(s0, lam, JD), rel=1e-8,
                                               abs=1e-10)

    def test_lower_half_plane_is_invariant(self):
        omega = 0.4
        for Y0 in (0.0, -0.1, -1.0):
            s_J = jump_projective(complex(0.3, Y0), complex(-0.2, omega), JD)
            assert s_J.imag <= 0.0
            if Y0 >= -omega / C:
                assert s_J.imag <= Y0


class TestSettings:
    def test_chart_threshold_above_one(self):
        with pytest.raises(ValueError):
            EvansSettings(chart_threshold=1.0)


class TestAlongOrbit:
    def test_section_time(self, orbit):
        tau = section_time(orbit, 0.95)
        assert orbit.right_segment.state_at(tau)[0] == pytest.approx(0.95, abs=1e-12)
        with pytest.raises(ValueError):
            section_time(orbit, 0.5)

    def test_unknown_side(self, orbit):
        with pytest.raises(ValueError):
            shoot_section(0.1, "sideways", orbit)

    def test_quotient_consistency_along_left_segment(self, orbit, settings):
        rng = np.random.default_rng(7)
        left = orbit.left_segment
        span = (left.tau_min / 2, -1.0)
        worst = 0.0
        for _ in range(50):
            lam = complex(*rng.uniform(-0.5, 0.5, size=2))
            P0, V0 = rng.normal(size=2) + 1j * rng.normal(size=2)
            sol = integrate_linear(lam, left, [P0, V0], span, orbit.c0, settings)
            hom = transport_projective(lam, left, orbit.c0, span, P0 / V0, settings)
            worst = max(worst, fubini_study_dist(sol.y[:, -1], hom))
        assert worst <= 1e-8

    def test_translation_eigenvalue(self, orbit, settings):
        sample = riccati_evans(0.0, orbit, settings)
        assert abs(sample.value) <= 1e-8
        assert sample.value == pytest.approx(sample.right_hit - sample.left_hit)

    def test_conjugation_symmetry(self, orbit, settings):
        lam = 0.3 + 0.45j
        a = riccati_evans(lam, orbit, settings).value
        b = riccati_evans(lam.conjugate(), orbit, settings).value
        assert abs(b - a.conjugate()) <= 1e-8 * max(1.0, abs(a))

    def test_real_lambda_gives_real_value(self, orbit, settings):
        value = riccati_evans(0.15, orbit, settings).value
        assert abs(value.imag) <= 1e-10 * max(1.0, abs(value))

    def test_evaluate_many_matches_single(self, orbit, settings):
        lams = [0.1, 0.2 + 0.1j]
        many = evaluate_many(lams, orbit, settings)
        for lam, value in zip(lams, many):
            assert value == pytest.approx(riccati_evans(lam, orbit, settings).value)

    def test_scan_rejects_essential_spectrum(self, orbit):
        with pytest.raises(ValueError):
            find_real_eigenvalues((-1.2, 0.0), orbit)

    def test_riccati_path(self, orbit, settings):
        path = riccati_path(1.0, orbit, settings, per_piece=50)
        assert np.all(np.diff(path.U) > 0)
        assert set(np.unique(path.segment)) == {0, 1, 2}
        jump = np.flatnonzero(path.segment == 1)
        assert np.all(np.isfinite(path.ratio()[jump]))
        k = int(jump[len(jump) // 2])
        assert fubini_study_dist(path.at(path.U[k]), path.hom[k]) < 1e-10

    def test_xy_flow_jump(self, orbit, settings):
        lam = 0.2 + 0.5j
        traj = xy_flow(lam, orbit, settings, per_piece=50)
        expected = jump_projective(traj.jump_before, lam, JumpData.from_orbit(
            orbit, default_model().u_F, default_model().u_J))
        assert traj.jump_after == pytest.approx(expected, rel=1e-9)
        assert len(traj.tau) == len(traj.X) == len(traj.chart)

    def test_sl_grid_rejects_jump_point(self, orbit):
        with pytest.raises(GridError):
            sl_residual(0.0, np.array([-1.0, 0.0, 1.0]), np.ones(3), orbit)

    def test_sl_weight_positive(self, orbit):
        left, right = orbit.left_segment, orbit.right_segment
        tau = np.array([left.tau_min / 2, left.tau_min / 10, right.tau_max / 10,
                        right.tau_max / 2])
        assert np.all(sl_weight(tau, orbit) > 0)

    @pytest.mark.slow
    def test_sturm_liouville_residual(self, orbit, settings):
        for lam in (0.0, 0.5 + 0.2j):
            eig = slow_eigenfunction(lam, orbit, settings)
            assert np.all(eig.tau != 0.0)
            assert sl_residual(lam, eig.tau, eig.V, orbit) < 1e-3


@pytest.mark.slow
class TestSlowSpectrum:
    def test_real_scan(self, orbit, settings):
        scan = find_real_eigenvalues((-0.95, 0.3), orbit, settings=settings,
                                     confirm_poles=True)
        assert len(scan.eigenvalues) == 2
        assert scan.eigenvalues[0] == pytest.approx(-0.80925, abs=1e-3)
        assert abs(scan.eigenvalues[1]) <= 1e-8
        assert len(scan.poles) == 1
        assert scan.poles[0] == pytest.approx(-0.08, abs=5e-3)
        assert scan.pole_windings == [-1]

    @pytest.mark.parametrize("center, expected", [(0.0, 1), (-0.80925, 1)])
    def test_windings_around_eigenvalues(self, orbit, settings, center, expected):
        assert winding(SpectralContour.circle(center, 0.03), orbit, settings) == expected

    def test_large_contour_counts_eigenvalues_minus_pole(self, orbit, settings):
        contour = SpectralContour.circle(-0.4, 0.48)
        for inside in (-0.80925, -0.08, 0.0):
            assert contour.contains(inside)
        assert winding(contour, orbit, settings) == 1

    def test_no_unstable_eigenvalues(self, orbit, settings):
        scan = find_real_eigenvalues((0.05, 1.0), orbit, settings=settings,
                                     confirm_poles=False)
        assert scan.eigenvalues == []
        for center in (0.2 + 0.3j, 0.2 - 0.3j):
            assert winding(SpectralContour.circle(center, 0.05), orbit, settings) == 0

    def test_eigenvalues_are_simple(self, orbit, settings):
        h = 1e-5
        for lam in (0.0, -0.80925):
            derivative = abs(riccati_evans(lam + h, orbit, settings).value
                             - riccati_evans(lam - h, orbit, settings).value) / (2 * h)
            assert derivative > 0.01
