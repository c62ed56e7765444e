"""Statický droop bateriového střídače (bez virtuální setrvačnosti)."""

from __future__ import annotations

import logging
from dataclasses import dataclass

from src.control.vsg import VsgParams, volt_ref
from src.storage.battery import BatteryParams

logger = logging.getLogger(__name__)


@dataclass(slots=True)
class SocPowerLimiter:
    """Posouvá P_ref tak, aby baterie na mezi SoC nedodávala (neodebírala) výkon.

    offset' = −k·přebytek, mimo mez se offset vrací k nule s časovou konstantou relax_t.
    """

    gain: float = 5.0
    relax_t: float = 1.0
    offset: float = 0.0
    active: bool = False

    def step(self, p_avg: float, soc: float, params: BatteryParams, p_rate_pu: float, dt: float) -> float:
        p_max_discharge = 0.0 if soc <= params.soc_min else p_rate_pu
        p_max_charge = 0.0 if soc >= 1.0 else p_rate_pu
        excess = max(p_avg - p_max_discharge, 0.0) + min(p_avg + p_max_charge, 0.0)
        active = excess != 0.0
        if active:
            self.offset -= self.gain * excess * dt
        else:
            self.offset -= self.offset * dt / self.relax_t
        if active and not self.active:
            logger.info("Omezovač výkonu baterie aktivní (P = %.3f p.u., SoC = %.3f)", p_avg, soc)
        self.active = active
        return self.offset


def bess_droop_step(
    vsg: VsgParams,
    p_avg: float,
    q_avg: float,
    omega_trim: float = 0.0,
    v_trim: float = 0.0,
    p_ref_offset: float = 0.0,
) -> tuple[float, float]:
    """ω_ref = ω_nom·(1 − k_w·(P_avg − P_ref)) bez setrvačného členu, V_ref podle Q-V droopu."""
    omega_ref = vsg.omega_nom * (1.0 - vsg.k_w * (p_avg - (vsg.p_ref + p_ref_offset))) + omega_trim
    return omega_ref, volt_ref(vsg, q_avg, v_trim)
