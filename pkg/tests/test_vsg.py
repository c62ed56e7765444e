"""Testy virtuálního synchronního generátoru a výpočtu výkonů."""

import math

import numpy as np
import pytest

from src.control.vsg import (
    PowerAverager,
    VsgParams,
    compute_avg_powers,
    droop_equilibrium,
    freq_ref_step,
    instantaneous_powers,
    volt_ref,
)
from src.simcore.errors import ConfigurationError, ContractViolationError
from src.simcore.filters import FirstOrderLagState
from src.simcore.transforms import DqQuantity, dq_to_abc

DT = 1e-4
OMEGA_NOM = 100.0 * math.pi


class TestPowers:
    def test_in_phase(self):
        p, q = instantaneous_powers(DqQuantity(1.0, 0.0, 0.0), DqQuantity(1.0, 0.0, 0.0))
        assert p == 1.0
        assert q == 0.0

    def test_quadrature_current_gives_reactive_power(self):
        p, q = instantaneous_powers(DqQuantity(1.0, 0.0, 0.0), DqQuantity(0.0, -1.0, 0.0))
        assert p == 0.0
        assert q == 1.0

    def test_matches_time_domain_power(self):
        rng = np.random.default_rng(7)
        for _ in range(5):
            vd, vq, id_, iq = rng.uniform(-1.0, 1.0, 4)
            p, _ = instantaneous_powers(DqQuantity(vd, vq, 0.0), DqQuantity(id_, iq, 0.0))
            samples = []
            for theta in np.linspace(0.0, 2.0 * math.pi, 200, endpoint=False):
                v = dq_to_abc(DqQuantity(vd, vq, theta), theta)
                i = dq_to_abc(DqQuantity(id_, iq, theta), theta)
                samples.append((v.a * i.a + v.b * i.b + v.c * i.c) / 1.5)
            assert float(np.mean(samples)) == pytest.approx(p, rel=1e-3, abs=1e-12)

    def test_frame_mismatch_rejected(self):
        with pytest.raises(ContractViolationError):
            instantaneous_powers(DqQuantity(1.0, 0.0, 0.0), DqQuantity(1.0, 0.0, 0.1))

    def test_averager_converges(self):
        avg = PowerAverager()
        v, i = DqQuantity(1.0, 0.0, 0.0), DqQuantity(0.4, -0.1, 0.0)
        for _ in range(5000):
            p_avg, q_avg = compute_avg_powers(v, i, avg, DT)
        assert p_avg == pytest.approx(0.4, abs=1e-6)
        assert q_avg == pytest.approx(0.1, abs=1e-6)
        avg.reset(0.2, 0.0)
        assert avg.p_avg == 0.2


class TestFrequencyReference:
    def test_zero_error_gives_nominal(self):
        vsg = VsgParams(p_ref=0.3)
        lag = FirstOrderLagState(t_const=vsg.t_w)
        assert freq_ref_step(vsg, lag, 0.3, DT) == OMEGA_NOM

    def test_droop_steady_state(self):
        vsg = VsgParams(k_w=0.01)
        lag = FirstOrderLagState(t_const=vsg.t_w)
        for _ in range(10000):
            omega = freq_ref_step(vsg, lag, 0.5, DT)
        assert omega == pytest.approx(0.995 * OMEGA_NOM, rel=1e-9)

    def test_lag_response_at_time_constant(self):
        vsg = VsgParams(k_w=0.01, h=2.0, d=40.0)
        assert vsg.t_w == pytest.approx(0.05)
        lag = FirstOrderLagState(t_const=vsg.t_w)
        for _ in range(int(round(vsg.t_w / DT))):
            omega = freq_ref_step(vsg, lag, 0.5, DT)
        fraction = (OMEGA_NOM - omega) / (0.005 * OMEGA_NOM)
        assert fraction == pytest.approx(1.0 - math.exp(-1.0), abs=0.005)

    def test_zero_inertia_is_instant(self):
        vsg = VsgParams(k_w=0.02, h=0.0)
        lag = FirstOrderLagState(t_const=vsg.t_w)
        assert freq_ref_step(vsg, lag, 0.5, DT) == pytest.approx(0.99 * OMEGA_NOM)

    def test_trim_added(self):
        vsg = VsgParams()
        lag = FirstOrderLagState(t_const=vsg.t_w)
        assert freq_ref_step(vsg, lag, 0.0, DT, trim=-1.5) == pytest.approx(OMEGA_NOM - 1.5)

    def test_invalid_parameters_rejected(self):
        with pytest.raises(ConfigurationError):
            VsgParams(k_w=0.0)
        with pytest.raises(ConfigurationError):
            VsgParams(d=0.0)
        with pytest.raises(ConfigurationError):
            VsgParams(h=-1.0)


class TestVoltageReference:
    def test_zero_error(self):
        assert volt_ref(VsgParams(q_ref=0.1), 0.1) == 1.0

    def test_droop(self):
        assert volt_ref(VsgParams(n_q=0.05), 0.2) == pytest.approx(0.99)

    def test_disabled_droop(self):
        assert volt_ref(VsgParams(n_q=0.0), 0.7) == 1.0


class TestDroopEquilibrium:
    def test_equal_sharing(self):
        omega, powers = droop_equilibrium([0.02, 0.02, 0.02], [0.0, 0.0, 0.0], 0.6)
        assert powers == pytest.approx([0.2, 0.2, 0.2])
        assert omega / (2.0 * math.pi) == pytest.approx(49.8)

    def test_stiffer_source_takes_more(self):
        _, powers = droop_equilibrium([0.01, 0.02], [0.0, 0.0], 0.3)
        assert powers == pytest.approx([0.2, 0.1])
        assert sum(powers) == pytest.approx(0.3)

    def test_balanced_references_hold_nominal(self):
        omega, powers = droop_equilibrium([0.02, 0.02], [0.1, 0.2], 0.3)
        assert omega == pytest.approx(OMEGA_NOM)
        assert powers == pytest.approx([0.1, 0.2])

    def test_mismatched_lengths_rejected(self):
        with pytest.raises(ConfigurationError):
            droop_equilibrium([0.02], [0.0, 0.0], 0.3)
