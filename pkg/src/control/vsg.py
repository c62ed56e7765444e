"""Virtuální synchronní generátor – frekvenční a napěťová reference.

  ω_ref = ω_nom·(1 − K_w/(T_w·s + 1)·(P_avg − P_ref)) + trim,   T_w = H/D
  V_ref = V_nom − n_q·(Q_avg − Q_ref) + trim

Jalový výkon je kladný při induktivním odběru ze střídače, tj. když střídač
dodává jalový výkon do sítě: q = v_q·i_d − v_d·i_q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from src.simcore.errors import ConfigurationError, ContractViolationError
from src.simcore.filters import FirstOrderLagState, lag_step
from src.simcore.transforms import DqQuantity

POWER_AVERAGING_T = 0.02
FRAME_TOLERANCE = 1e-9


@dataclass(frozen=True)
class VsgParams:
    """Parametry droop/setrvačnosti; t_w = h/d."""

    omega_nom: float = 100.0 * math.pi
    k_w: float = 0.02
    h: float = 2.0
    d: float = 40.0
    p_ref: float = 0.0
    q_ref: float = 0.0
    v_nom: float = 1.0
    n_q: float = 0.05

    def __post_init__(self) -> None:
        if not self.k_w > 0.0:
            raise ConfigurationError(f"k_w musí být kladné, je {self.k_w!r}", "control.k_w")
        if not self.d > 0.0:
            raise ConfigurationError(f"tlumení D musí být kladné, je {self.d!r}", "control.d")
        if self.h < 0.0:
            raise ConfigurationError(f"konstanta setrvačnosti H nesmí být záporná, je {self.h!r}", "control.h")
        if self.n_q < 0.0:
            raise ConfigurationError(f"n_q nesmí být záporné, je {self.n_q!r}", "control.n_q")

    @property
    def t_w(self) -> float:
        return self.h / self.d


@dataclass(slots=True)
class PowerAverager:
    """Vyhlazení okamžitého P a Q setrvačným členem (DC zesílení 1)."""

    p_lag: FirstOrderLagState = field(default_factory=lambda: FirstOrderLagState(t_const=POWER_AVERAGING_T))
    q_lag: FirstOrderLagState = field(default_factory=lambda: FirstOrderLagState(t_const=POWER_AVERAGING_T))

    @property
    def p_avg(self) -> float:
        return self.p_lag.y

    @property
    def q_avg(self) -> float:
        return self.q_lag.y

    def reset(self, p: float, q: float) -> None:
        self.p_lag.reset(p)
        self.q_lag.reset(q)


def instantaneous_powers(v_dq: DqQuantity, i_dq: DqQuantity) -> tuple[float, float]:
    """Okamžité p, q v p.u. (faktor 1.5 je zahrnut v bázi výkonu)."""
    if abs(v_dq.theta_used - i_dq.theta_used) > FRAME_TOLERANCE:
        raise ContractViolationError(
            f"napětí (θ={v_dq.theta_used:.6f}) a proud (θ={i_dq.theta_used:.6f}) nejsou ve stejném rámci"
        )
    p = v_dq.d * i_dq.d + v_dq.q * i_dq.q
    q = v_dq.q * i_dq.d - v_dq.d * i_dq.q
    return p, q


def compute_avg_powers(v_dq: DqQuantity, i_dq: DqQuantity, avg: PowerAverager, dt: float) -> tuple[float, float]:
    p, q = instantaneous_powers(v_dq, i_dq)
    return lag_step(avg.p_lag, p, dt), lag_step(avg.q_lag, q, dt)


def freq_ref_step(
    vsg: VsgParams, lag: FirstOrderLagState, p_avg: float, dt: float, trim: float = 0.0
) -> float:
    """Frekvenční reference (rad/s); lag musí mít t_const = vsg.t_w."""
    deviation = lag_step(lag, vsg.k_w * (p_avg - vsg.p_ref), dt)
    return vsg.omega_nom * (1.0 - deviation) + trim


def volt_ref(vsg: VsgParams, q_avg: float, trim: float = 0.0) -> float:
    """Napěťová reference (p.u.) – čistě algebraický droop."""
    return vsg.v_nom - vsg.n_q * (q_avg - vsg.q_ref) + trim


def droop_equilibrium(
    k_w: Sequence[float], p_ref: Sequence[float], p_total: float, omega_nom: float = 100.0 * math.pi
) -> tuple[float, list[float]]:
    """Společná ustálená frekvence a dělení výkonu mezi droop zdroje.

    Z ω/ω_nom − 1 = −k_i·(p_i − p_ref,i) a Σ p_i = p_total.
    """
    if len(k_w) != len(p_ref) or not k_w:
        raise ConfigurationError("k_w a p_ref musí mít stejnou nenulovou délku", "control")
    conductance = sum(1.0 / k for k in k_w)
    deviation = (sum(p_ref) - p_total) / conductance
    powers = [p0 - deviation / k for k, p0 in zip(k_w, p_ref)]
    return omega_nom * (1.0 + deviation), powers
