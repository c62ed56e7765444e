"""Modulační index pro průměrovaný model VSI."""

from __future__ import annotations

import logging
from typing import NamedTuple

from src.simcore.errors import InverterTripError
from src.simcore.per_unit import PerUnitBase
from src.simcore.transforms import DqQuantity, ThreePhaseSample, dq_to_abc

logger = logging.getLogger(__name__)

ZERO_MODULATION = ThreePhaseSample(0.0, 0.0, 0.0)


class ModulationOutput(NamedTuple):
    m_abc: ThreePhaseSample
    overmodulated: bool


def voltage_to_modulation(e_d: float, e_q: float, v_dc: float, base: PerUnitBase) -> tuple[float, float]:
    """Napětí střídače (p.u.) na modulační index: m = e·V_peak/(V_dc/2)."""
    scale = base.v_base_phase_peak / (0.5 * v_dc)
    return e_d * scale, e_q * scale


def _clamp(x: float) -> tuple[float, bool]:
    if x > 1.0:
        return 1.0, True
    if x < -1.0:
        return -1.0, True
    return x, False


def modulation(
    m_dq: tuple[float, float],
    theta: float,
    v_dc: float,
    enabled: bool = True,
    source: str = "inverter",
) -> ModulationOutput:
    """m_abc = dq→abc(m_dq, θ) s omezením každé fáze na [−1, 1]."""
    if not v_dc > 0.0:
        raise InverterTripError(source, f"napětí DC sběrnice {v_dc!r} V není kladné")
    if not enabled:
        return ModulationOutput(ZERO_MODULATION, False)
    m = dq_to_abc(DqQuantity(m_dq[0], m_dq[1], theta), theta)
    a, over_a = _clamp(m.a)
    b, over_b = _clamp(m.b)
    c, over_c = _clamp(m.c)
    return ModulationOutput(ThreePhaseSample(a, b, c), over_a or over_b or over_c)
