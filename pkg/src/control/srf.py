"""Oddělené regulátory v synchronním rámci (SRF).

Napěťový stupeň (uzel kondenzátoru filtru) dopočítá referenci proudu tlumivky:
  i_i* = i_o* + jω·c_f·v_o + PI_v(i_o* − i_o) − g_d·HP(v_o)
Člen g_d·HP(v_o) je aktivní tlumení: virtuální vodivost působí jen na
rychlé změny v_o (horní propust s časovou konstantou DAMPING_FILTER_T) a tlumí
rezonanci virtuální indukčnosti admitance s kondenzátory filtrů v ostrově.
Proudová smyčka vydá napětí střídače:
  e = v_o + PI_i(i_i* − i_i) + jω·l_f·i_i
ω je v p.u. (ω/ω_b), reaktance l_f a susceptance c_f jsou při ω_b.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from src.control.admittance import limit_magnitude
from src.simcore.errors import ContractViolationError
from src.simcore.filters import FirstOrderLagState, PiController, lag_step
from src.simcore.transforms import DqQuantity, rotate_dq

FRAME_TOLERANCE = 1e-9

# proudová smyčka ~1 kHz: kp = l_f·2π·1000/ω_b
CURRENT_KP = 1.6
CURRENT_KI = 1000.0
VOLTAGE_KP = 0.0
VOLTAGE_KI = 200.0
CURRENT_PI_LIMIT = 0.5
VOLTAGE_PI_LIMIT = 0.5
ACTIVE_DAMPING_G = 0.4
DAMPING_FILTER_T = 0.002


def _current_pi() -> PiController:
    return PiController(kp=CURRENT_KP, ki=CURRENT_KI, limit=CURRENT_PI_LIMIT, kaw=200.0)


def _voltage_pi() -> PiController:
    return PiController(kp=VOLTAGE_KP, ki=VOLTAGE_KI, limit=VOLTAGE_PI_LIMIT, kaw=50.0)


def _damping_lag() -> FirstOrderLagState:
    return FirstOrderLagState(t_const=DAMPING_FILTER_T)


@dataclass(slots=True)
class SrfLoopState:
    """Integrátory napěťového stupně a proudové smyčky (osy d, q) a filtr aktivního tlumení."""

    voltage_d: PiController = field(default_factory=_voltage_pi)
    voltage_q: PiController = field(default_factory=_voltage_pi)
    current_d: PiController = field(default_factory=_current_pi)
    current_q: PiController = field(default_factory=_current_pi)
    current_limit: float = 1.2
    damping: float = ACTIVE_DAMPING_G
    v_slow_d: FirstOrderLagState = field(default_factory=_damping_lag)
    v_slow_q: FirstOrderLagState = field(default_factory=_damping_lag)
    primed: bool = False
    limited: bool = False

    def rotate(self, delta: float) -> None:
        """Převede integrátory i filtr tlumení do rámce pootočeného o delta."""
        for pi_d, pi_q in ((self.voltage_d, self.voltage_q), (self.current_d, self.current_q)):
            d, q = rotate_dq(pi_d.integrator, pi_q.integrator, delta)
            pi_d.preload(d)
            pi_q.preload(q)
        d, q = rotate_dq(self.v_slow_d.y, self.v_slow_q.y, delta)
        self.v_slow_d.reset(d)
        self.v_slow_q.reset(q)

    def reset(self) -> None:
        for pi in (self.voltage_d, self.voltage_q, self.current_d, self.current_q):
            pi.reset()
        self.primed = False
        self.limited = False

    def voltage_high_pass(self, v_o: DqQuantity, dt: float) -> tuple[float, float]:
        """Rychlá složka v_o (v_o minus jeho vyhlazená hodnota)."""
        if not self.primed:
            self.v_slow_d.reset(v_o.d)
            self.v_slow_q.reset(v_o.q)
            self.primed = True
        slow_d = lag_step(self.v_slow_d, v_o.d, dt)
        slow_q = lag_step(self.v_slow_q, v_o.q, dt)
        return v_o.d - slow_d, v_o.q - slow_q


def _check_frame(*quantities: DqQuantity) -> None:
    theta = quantities[0].theta_used
    for x in quantities[1:]:
        if abs(x.theta_used - theta) > FRAME_TOLERANCE:
            raise ContractViolationError(
                f"veličiny SRF regulátoru v různých rámcích ({theta:.6f} vs {x.theta_used:.6f})"
            )


def srf_voltage_step(
    i_o_ref: tuple[float, float],
    i_o: DqQuantity,
    v_o: DqQuantity,
    state: SrfLoopState,
    omega_pu: float,
    dt: float,
    c_f: float,
) -> tuple[float, float]:
    """Reference proudu tlumivky i_i* (omezená na current_limit)."""
    _check_frame(i_o, v_o)
    ff_d = i_o_ref[0] - omega_pu * c_f * v_o.q
    ff_q = i_o_ref[1] + omega_pu * c_f * v_o.d
    hp_d, hp_q = state.voltage_high_pass(v_o, dt)
    i_d = ff_d + state.voltage_d.step(i_o_ref[0] - i_o.d, dt) - state.damping * hp_d
    i_q = ff_q + state.voltage_q.step(i_o_ref[1] - i_o.q, dt) - state.damping * hp_q
    i_d, i_q, state.limited = limit_magnitude(i_d, i_q, state.current_limit)
    return i_d, i_q


def srf_current_step(
    i_ref: tuple[float, float],
    i_i: DqQuantity,
    v_o: DqQuantity,
    state: SrfLoopState,
    omega_pu: float,
    dt: float,
    l_f: float,
) -> tuple[float, float]:
    """Napětí střídače e_dq (p.u.) s dopřednou vazbou a oddělením os."""
    _check_frame(i_i, v_o)
    ff_d = v_o.d - omega_pu * l_f * i_i.q
    ff_q = v_o.q + omega_pu * l_f * i_i.d
    e_d = ff_d + state.current_d.step(i_ref[0] - i_i.d, dt)
    e_q = ff_q + state.current_q.step(i_ref[1] - i_i.q, dt)
    return e_d, e_q
