"""Výkonová smyčka režimu CCM – reference proudu ze žádaného výkonu."""

from __future__ import annotations

import logging
from dataclasses import dataclass

from src.control.admittance import limit_magnitude
from src.simcore.transforms import DqQuantity

logger = logging.getLogger(__name__)

RIDE_THROUGH_VOLTAGE = 0.2


@dataclass(slots=True)
class CcmState:
    i_d: float = 0.0
    i_q: float = 0.0
    ride_through: bool = False
    limited: bool = False


def ccm_power_loop(
    p_target: float,
    q_ref: float,
    v_dq: DqQuantity,
    state: CcmState,
    limit: float,
) -> tuple[float, float]:
    """i_d = p/v_d, i_q = −q/v_d v rámci PLL (v_q ≈ 0).

    Pod 0.2 p.u. se reference zmrazí na posledních hodnotách.
    """
    if v_dq.d < RIDE_THROUGH_VOLTAGE:
        if not state.ride_through:
            logger.warning("Napětí v_d = %.3f p.u. pod prahem, reference zmrazeny", v_dq.d)
        state.ride_through = True
        return state.i_d, state.i_q
    state.ride_through = False
    i_d, i_q, state.limited = limit_magnitude(p_target / v_dq.d, -q_ref / v_dq.d, limit)
    state.i_d, state.i_q = i_d, i_q
    return i_d, i_q
