import numpy as np
import pytest

from wavespec.models import (
    FastState,
    JumpData,
    RiccatiPoint,
    SlowPath,
    SlowState,
    Tolerances,
    WaveProfile,
)


class TestRecords:
    def test_tolerances_must_be_positive(self):
        with pytest.raises(ValueError):
            Tolerances(rtol=0.0)

    def test_tolerances_scaled(self):
        tol = Tolerances(1e-8, 1e-10, "DOP853").scaled(0.1)
        assert tol.rtol == pytest.approx(1e-9)
        assert tol.method == "DOP853"

    def test_states_reject_nan(self):
        with pytest.raises(ValueError):
            SlowState(np.nan, 0.0)
        with pytest.raises(ValueError):
            FastState(0.0, np.inf, 0.0)

    def test_slow_path_grid_ascending(self):
        with pytest.raises(ValueError):
            SlowPath(tau=np.array([0.0, -1.0]), U=np.zeros(2), P=np.zeros(2),
                     sol=lambda t: t, t_shift=0.0)

    def test_jump_data_requires_positive_denominator(self):
        with pytest.raises(ValueError):
            JumpData(u_F=7 / 12, u_J=5 / 6, p_F=0.2, v_F=245 / 432, c=0.2)

    def test_jump_on_point_right_of_fold(self):
        with pytest.raises(ValueError):
            JumpData(u_F=7 / 12, u_J=0.5, p_F=0.05, v_F=245 / 432, c=0.2)


class TestRiccatiPoint:
    def test_switch_inverts_and_counts(self):
        pt = RiccatiPoint("S", 4 + 0j, SlowState(0.1, 0.0))
        switched = pt.switched()
        assert switched.chart == "T"
        assert switched.value == pytest.approx(0.25)
        assert switched.wind_hint == 1

    def test_homogeneous(self):
        assert RiccatiPoint("T", 0.5 + 0j).homogeneous() == (1.0, 0.5)

    def test_unknown_chart(self):
        with pytest.raises(ValueError):
            RiccatiPoint("U", 1 + 0j)


class TestWaveProfile:
    def test_shape_checked(self):
        with pytest.raises(ValueError):
            WaveProfile(grid=np.arange(3.0), states=np.zeros((2, 3)), c=0.2, eps=0.01)

    def test_interpolates_without_evaluator(self):
        grid = np.array([0.0, 1.0])
        states = np.array([[0.0, 0.0, 0.0], [1.0, 2.0, 3.0]])
        profile = WaveProfile(grid=grid, states=states, c=0.2, eps=0.01)
        np.testing.assert_allclose(profile.state_at(0.5), [0.5, 1.0, 1.5])
        np.testing.assert_allclose(profile.zeta, [0.0, 0.01])
