"""Testy setrvačného členu a PI regulátoru."""

import math

import pytest

from src.simcore.errors import ConfigurationError
from src.simcore.filters import FirstOrderLagState, PiController, lag_step


class TestLagStep:
    def test_unity_dc_gain(self):
        lag = FirstOrderLagState(t_const=0.02)
        for _ in range(5000):
            y = lag_step(lag, 0.5, 1e-4)
        assert y == pytest.approx(0.5, abs=1e-9)

    def test_step_response_at_time_constant(self):
        t_const, dt = 0.05, 1e-4
        lag = FirstOrderLagState(t_const=t_const)
        for _ in range(round(t_const / dt)):
            y = lag_step(lag, 1.0, dt)
        assert y == pytest.approx(1.0 - math.exp(-1.0), abs=0.005)

    def test_step_response_monotone(self):
        lag = FirstOrderLagState(t_const=0.01)
        outputs = [lag_step(lag, 1.0, 1e-4) for _ in range(300)]
        assert all(b >= a for a, b in zip(outputs, outputs[1:]))

    def test_zero_time_constant_is_passthrough(self):
        lag = FirstOrderLagState(t_const=0.0)
        assert lag_step(lag, 0.7, 1e-4) == 0.7

    @pytest.mark.parametrize("dt", [0.0, -1e-4])
    def test_nonpositive_step_rejected(self, dt):
        with pytest.raises(ConfigurationError):
            lag_step(FirstOrderLagState(t_const=0.01), 1.0, dt)

    def test_step_above_half_time_constant_rejected(self):
        with pytest.raises(ConfigurationError):
            lag_step(FirstOrderLagState(t_const=1e-4), 1.0, 1e-4)

    def test_negative_time_constant_rejected(self):
        with pytest.raises(ConfigurationError):
            FirstOrderLagState(t_const=-1.0)

    def test_reset_sets_steady_state(self):
        lag = FirstOrderLagState(t_const=0.05)
        lag.reset(0.3)
        assert lag_step(lag, 0.3, 1e-4) == pytest.approx(0.3, abs=1e-15)


class TestPiController:
    def test_integrates_constant_error(self):
        pi = PiController(kp=0.0, ki=10.0)
        for _ in range(100):
            out = pi.step(1.0, 1e-3)
        # lichoběžník: první krok přispěje jen polovinou
        assert out == pytest.approx(10.0 * (0.1 - 0.5e-3))

    def test_output_clamped_and_integrator_bounded(self):
        pi = PiController(kp=1.0, ki=100.0, limit=0.5, kaw=50.0)
        for _ in range(1000):
            out = pi.step(2.0, 1e-3)
        assert out == 0.5
        assert pi.saturated
        assert abs(pi.integrator) <= 0.5

    def test_recovers_quickly_after_saturation(self):
        pi = PiController(kp=0.0, ki=100.0, limit=0.5, kaw=50.0)
        for _ in range(1000):
            pi.step(2.0, 1e-3)
        for _ in range(10):
            out = pi.step(-1.0, 1e-3)
        assert out < 0.5

    def test_feedforward_inside_clamp(self):
        pi = PiController(kp=0.0, ki=0.0, limit=1.0)
        assert pi.step(0.0, 1e-3, feedforward=3.0) == 1.0

    def test_preload_and_reset(self):
        pi = PiController(kp=1.0, ki=1.0, limit=0.4)
        pi.preload(0.9)
        assert pi.integrator == 0.4
        assert pi.step(0.0, 1e-3) == pytest.approx(0.4)
        pi.reset()
        assert pi.integrator == 0.0
        assert not pi.saturated
