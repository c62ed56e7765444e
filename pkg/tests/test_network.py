"""Testy parametrů sítě, vypínače a skoků zátěže."""

import pytest

from src.network.breaker import BreakerState, set_breaker
from src.network.loads import apply_load_step
from src.network.params import FeederParams, GridEquivalent, LcFilterParams, LoadBank
from src.simcore.errors import ConfigurationError


class TestLcFilter:
    def test_default_resonance_inside_band(self):
        lc = LcFilterParams()
        assert lc.resonance_hz(50.0) == pytest.approx(790.6, abs=0.1)
        lc.validate_band(50.0, 1e-4)

    def test_resonance_above_nyquist_rejected(self):
        with pytest.raises(ConfigurationError) as excinfo:
            LcFilterParams().validate_band(50.0, 1e-3)
        assert excinfo.value.key_path == "lc_filter"

    def test_resonance_too_low_rejected(self):
        with pytest.raises(ConfigurationError):
            LcFilterParams(l_f=1.0, c_f=1.0).validate_band(50.0, 1e-4)

    def test_nonpositive_parameter_rejected(self):
        with pytest.raises(ConfigurationError):
            LcFilterParams(r_f=0.0)


def test_feeder_and_grid_validation():
    with pytest.raises(ConfigurationError):
        FeederParams(r=0.0)
    with pytest.raises(ConfigurationError):
        GridEquivalent(x_th=0.0)
    with pytest.raises(ConfigurationError):
        GridEquivalent(f_grid=-1.0)
    assert GridEquivalent().z_th == complex(0.01, 0.05)


class TestLoadBank:
    def test_from_power(self):
        load = LoadBank.from_power(0.6, 0.2)
        assert load.r == pytest.approx(1.0 / 0.6)
        assert load.x == pytest.approx(5.0)
        assert load.p_nominal == pytest.approx(0.6)
        assert load.q_nominal == pytest.approx(0.2)

    def test_purely_resistive(self):
        load = LoadBank.from_power(0.5)
        assert load.x is None
        assert load.q_nominal == 0.0

    def test_invalid_loads_rejected(self):
        with pytest.raises(ConfigurationError):
            LoadBank(r=0.0)
        with pytest.raises(ConfigurationError):
            LoadBank.from_power(0.0)
        with pytest.raises(ConfigurationError):
            LoadBank.from_power(0.5, -0.1)


class TestApplyLoadStep:
    def test_step_recomputes_resistance(self):
        stepped = apply_load_step(LoadBank.from_power(0.4), 0.1, 1.0)
        assert stepped.r == pytest.approx(2.0)
        assert stepped.p_nominal == pytest.approx(0.5)

    def test_zero_delta_unchanged(self):
        load = LoadBank.from_power(0.4)
        assert apply_load_step(load, 0.0, 1.0) is load

    def test_step_to_zero_rejected(self):
        with pytest.raises(ConfigurationError):
            apply_load_step(LoadBank(r=2.0), -0.5, 1.0)

    def test_reactance_kept(self):
        stepped = apply_load_step(LoadBank.from_power(0.4, 0.1), 0.1, 1.0)
        assert stepped.x == pytest.approx(10.0)


class TestBreaker:
    def test_close(self):
        state = set_breaker(BreakerState(closed=False), True, 2.0)
        assert state.closed
        assert state.last_transition_time == 2.0

    def test_repeated_command_is_idempotent(self):
        state = set_breaker(BreakerState(closed=False), True, 2.0)
        assert set_breaker(state, True, 3.0) == state

    def test_open_while_open_keeps_timestamp(self):
        state = BreakerState(closed=False, last_transition_time=1.5)
        assert set_breaker(state, False, 4.0).last_transition_time == 1.5
