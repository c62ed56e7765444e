"""Testy DSOGI-PLL na syntetických signálech."""

import math

import pytest

from src.control.pll import OMEGA_NOM, DsogiPllState, SogiState, dsogi_pll_step, sogi_step
from src.simcore.transforms import ThreePhaseSample, wrap_angle

DT = 1e-4


def _mixed(theta: float, positive: float, negative: float) -> ThreePhaseSample:
    pos = ThreePhaseSample.balanced(positive, theta)
    neg = ThreePhaseSample.balanced(negative, -theta)
    return ThreePhaseSample(pos.a + neg.a, pos.b + neg.b, pos.c + neg.c)


def _run(state, steps, f_hz=50.0, phase=0.3, negative=0.0):
    outputs = []
    for n in range(steps):
        theta = 2.0 * math.pi * f_hz * n * DT + phase
        out = dsogi_pll_step(state, _mixed(theta, 1.0, negative), DT)
        outputs.append((theta, out))
    return outputs


def test_sogi_tracks_nominal_sine():
    state = SogiState()
    omega = OMEGA_NOM
    last = None
    for n in range(3000):
        last = sogi_step(state, math.cos(omega * n * DT), omega, math.sqrt(2.0), DT)
    t = 2999 * DT
    assert last[0] == pytest.approx(math.cos(omega * t), abs=1e-6)
    assert last[1] == pytest.approx(math.sin(omega * t), abs=1e-6)


class TestDsogiPll:
    def test_locks_from_rest(self):
        outputs = _run(DsogiPllState(), 3000)
        for theta, out in outputs[2000:]:
            assert abs(out.omega_hat - OMEGA_NOM) < 0.01
            assert abs(math.degrees(wrap_angle(out.theta_plus - theta))) < 0.5
            assert not out.out_of_band
        assert outputs[-1][1].v_plus == pytest.approx(1.0, abs=1e-3)

    def test_balanced_input_has_no_negative_sequence(self):
        outputs = _run(DsogiPllState(), 3000)
        assert outputs[-1][1].v_minus < 1e-3

    def test_recovers_sequence_magnitudes(self):
        outputs = _run(DsogiPllState(), 4000, negative=0.2)
        last = outputs[-1][1]
        assert last.v_plus == pytest.approx(1.0, rel=0.02)
        assert last.v_minus == pytest.approx(0.2, rel=0.02)

    def test_tracks_off_nominal_frequency(self):
        outputs = _run(DsogiPllState(), 4000, f_hz=49.9)
        assert outputs[-1][1].omega_hat == pytest.approx(2.0 * math.pi * 49.9, abs=0.01)

    def test_locked_state_starts_without_transient(self):
        state = DsogiPllState.locked_to(1.0, 0.3, dt=DT)
        for theta, out in _run(state, 1000, phase=0.3):
            assert abs(out.omega_hat - OMEGA_NOM) < 0.05
            assert abs(wrap_angle(out.theta_plus - theta)) < 1e-3

    def test_angles_wrapped(self):
        for _, out in _run(DsogiPllState(), 500):
            assert -math.pi <= out.theta_plus < math.pi
            assert -math.pi <= out.theta_minus < math.pi

    def test_far_off_frequency_flags_out_of_band(self):
        state = DsogiPllState()
        flagged = any(out.out_of_band for _, out in _run(state, 3000, f_hz=65.0))
        assert flagged
        assert state.omega_hat <= 1.2 * OMEGA_NOM

    def test_frequency_step_settles_without_ringing(self):
        state = DsogiPllState.locked_to(1.0, 0.0, dt=DT)
        step_omega = 2.0 * math.pi * 0.5
        theta = 0.0
        omegas = []
        for n in range(6000):
            omega_in = OMEGA_NOM + (step_omega if n >= 1000 else 0.0)
            omegas.append(dsogi_pll_step(state, ThreePhaseSample.balanced(1.0, theta), DT).omega_hat)
            theta += omega_in * DT
        after = omegas[1000:]
        overshoot = max(after) - (OMEGA_NOM + step_omega)
        assert overshoot < 0.4 * step_omega
        for omega in omegas[4000:]:
            assert abs(omega - OMEGA_NOM - step_omega) < 0.01
