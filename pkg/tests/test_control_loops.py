"""Testy vnitřních smyček – virtuální admitance, SRF regulátory, modulace a režimy."""

import math

import pytest

from src.control.admittance import VirtualAdmittanceState, limit_magnitude, virtual_admittance_step
from src.control.modes import ControlMode, Mode, select_mode
from src.control.modulation import modulation, voltage_to_modulation
from src.control.srf import SrfLoopState, srf_current_step, srf_voltage_step
from src.simcore.errors import ConfigurationError, ContractViolationError, InverterTripError
from src.simcore.per_unit import PerUnitBase
from src.simcore.transforms import DqQuantity

DT = 1e-4


class TestVirtualAdmittance:
    def test_zero_error_gives_zero_current(self):
        state = VirtualAdmittanceState()
        assert virtual_admittance_step((1.0, 0.0), (1.0, 0.0), state, DT) == (0.0, 0.0)

    def test_resistive_steady_state(self):
        state = VirtualAdmittanceState(r_v=0.1, x_v=0.0)
        i_d, i_q = virtual_admittance_step((1.1, 0.0), (1.0, 0.0), state, DT)
        assert i_d == pytest.approx(1.0)
        assert i_q == 0.0

    def test_inductive_steady_state(self):
        state = VirtualAdmittanceState(r_v=0.05, x_v=0.25)
        for _ in range(3000):
            i_d, i_q = virtual_admittance_step((1.1, 0.0), (1.0, 0.0), state, DT)
        expected = 0.1 / complex(0.05, 0.25)
        assert i_d == pytest.approx(expected.real, abs=1e-6)
        assert i_q == pytest.approx(expected.imag, abs=1e-6)

    def test_current_limit_preserves_angle(self):
        state = VirtualAdmittanceState(r_v=0.1, x_v=0.0, limit=1.2)
        i_d, i_q = virtual_admittance_step((1.3, 0.15), (1.0, 0.0), state, DT)
        assert math.hypot(i_d, i_q) == pytest.approx(1.2)
        assert math.atan2(i_q, i_d) == pytest.approx(math.atan2(1.5, 3.0))
        assert state.saturated

    def test_limit_magnitude_passthrough(self):
        assert limit_magnitude(0.3, 0.4, 1.0) == (0.3, 0.4, False)

    def test_invalid_impedance_rejected(self):
        with pytest.raises(ConfigurationError):
            VirtualAdmittanceState(r_v=0.0)
        with pytest.raises(ConfigurationError):
            VirtualAdmittanceState(x_v=-0.1)


class TestSrfLoops:
    def test_zero_error_outputs_feedforward(self):
        state = SrfLoopState()
        i_i = DqQuantity(0.5, 0.1, 0.0)
        v_o = DqQuantity(1.0, 0.0, 0.0)
        e_d, e_q = srf_current_step((0.5, 0.1), i_i, v_o, state, 1.0, DT, 0.08)
        assert e_d == pytest.approx(1.0 - 0.08 * 0.1)
        assert e_q == pytest.approx(0.08 * 0.5)

    def test_integrator_ramp(self):
        state = SrfLoopState()
        i_i = DqQuantity(0.0, 0.0, 0.0)
        v_o = DqQuantity(0.0, 0.0, 0.0)
        outputs = [srf_current_step((0.01, 0.0), i_i, v_o, state, 1.0, DT, 0.08)[0] for _ in range(100)]
        slopes = [(b - a) / DT for a, b in zip(outputs[1:], outputs[2:])]
        assert slopes == pytest.approx([state.current_d.ki * 0.01] * len(slopes))

    def test_anti_windup_bounds_integrator(self):
        state = SrfLoopState()
        i_i = DqQuantity(0.0, 0.0, 0.0)
        v_o = DqQuantity(0.0, 0.0, 0.0)
        for _ in range(5000):
            e_d, _ = srf_current_step((1.0, 0.0), i_i, v_o, state, 1.0, DT, 0.08)
        assert e_d == pytest.approx(state.current_d.limit)
        assert abs(state.current_d.integrator) <= state.current_d.limit

    def test_voltage_stage_feedforward_and_limit(self):
        state = SrfLoopState(current_limit=1.2)
        i_o = DqQuantity(0.3, 0.0, 0.2)
        v_o = DqQuantity(1.0, 0.0, 0.2)
        i_d, i_q = srf_voltage_step((0.3, 0.0), i_o, v_o, state, 1.0, DT, 0.05)
        assert (i_d, i_q) == pytest.approx((0.3, 0.05))
        assert not state.limited
        i_d, i_q = srf_voltage_step((2.0, 0.0), DqQuantity(2.0, 0.0, 0.2), v_o, state, 1.0, DT, 0.05)
        assert math.hypot(i_d, i_q) == pytest.approx(1.2)
        assert state.limited

    def test_active_damping_opposes_fast_voltage_change(self):
        state = SrfLoopState()
        zero = DqQuantity(0.0, 0.0, 0.0)
        assert srf_voltage_step((0.0, 0.0), zero, DqQuantity(1.0, 0.0, 0.0), state, 0.0, DT, 0.05) == (0.0, 0.0)
        stepped = DqQuantity(1.1, 0.0, 0.0)
        i_d, i_q = srf_voltage_step((0.0, 0.0), zero, stepped, state, 0.0, DT, 0.05)
        assert i_d == pytest.approx(-state.damping * 0.1, rel=0.05)
        assert i_q == 0.0
        for _ in range(500):
            i_d, _ = srf_voltage_step((0.0, 0.0), zero, stepped, state, 0.0, DT, 0.05)
        assert abs(i_d) < 1e-4

    def test_reset_reprimes_damping_filter(self):
        state = SrfLoopState()
        zero = DqQuantity(0.0, 0.0, 0.0)
        srf_voltage_step((0.0, 0.0), zero, DqQuantity(0.2, 0.0, 0.0), state, 0.0, DT, 0.05)
        state.reset()
        i_d, _ = srf_voltage_step((0.0, 0.0), zero, DqQuantity(1.0, 0.0, 0.0), state, 0.0, DT, 0.05)
        assert i_d == 0.0

    def test_frame_mismatch_rejected(self):
        with pytest.raises(ContractViolationError):
            srf_current_step((0.0, 0.0), DqQuantity(0.0, 0.0, 0.0), DqQuantity(1.0, 0.0, 0.5), SrfLoopState(), 1.0, DT, 0.08)

    def test_rotate_moves_integrators_to_new_frame(self):
        state = SrfLoopState()
        state.current_d.preload(0.1)
        state.rotate(math.pi / 2.0)
        assert state.current_d.integrator == pytest.approx(0.0, abs=1e-12)
        assert state.current_q.integrator == pytest.approx(-0.1)

    def test_reset(self):
        state = SrfLoopState()
        state.voltage_q.preload(0.2)
        state.reset()
        assert state.voltage_q.integrator == 0.0


class TestModulation:
    def test_disabled_outputs_zero(self):
        out = modulation((0.8, 0.1), 0.3, 800.0, enabled=False)
        assert out.m_abc.as_tuple() == (0.0, 0.0, 0.0)
        assert not out.overmodulated

    def test_zero_request(self):
        assert modulation((0.0, 0.0), 1.0, 800.0).m_abc.as_tuple() == pytest.approx((0.0, 0.0, 0.0))

    def test_overmodulation_clamped(self):
        out = modulation((1.3, 0.0), 0.0, 800.0)
        assert out.m_abc.a == 1.0
        assert max(abs(x) for x in out.m_abc.as_tuple()) <= 1.0
        assert out.overmodulated

    def test_collapsed_dc_bus_trips(self):
        with pytest.raises(InverterTripError):
            modulation((0.5, 0.0), 0.0, 0.0, source="pv1")

    def test_voltage_scaling(self):
        m_d, m_q = voltage_to_modulation(1.0, 0.0, 800.0, PerUnitBase())
        assert m_d == pytest.approx(400.0 * math.sqrt(2.0 / 3.0) / 400.0)
        assert m_q == 0.0


class TestModes:
    def test_grid_connected_is_ccm(self):
        assert select_mode(True, True, ControlMode(Mode.OFF), 0.0).mode == Mode.CCM

    def test_islanded_is_vcm(self):
        mode = select_mode(False, True, ControlMode(Mode.CCM), 2.0)
        assert mode == ControlMode(Mode.VCM, 2.0)

    def test_disabled_is_off(self):
        assert select_mode(False, False, ControlMode(Mode.VCM), 1.0).mode == Mode.OFF

    def test_unchanged_mode_keeps_transition_time(self):
        current = ControlMode(Mode.VCM, 2.0)
        assert select_mode(False, True, current, 3.0) is current
