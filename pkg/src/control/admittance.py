"""Virtuální admitance Y_v = 1/(R_v + jX_v) mezi vnitřním napětím VSG a svorkou.

V rotujícím rámci (L_v = X_v/ω_b, ω je okamžitá frekvence rámce):
  L_v·di_d/dt = e_d − R_v·i_d + ω·L_v·i_q
  L_v·di_q/dt = e_q − R_v·i_q − ω·L_v·i_d
Pro X_v = 0 je admitance čistě algebraická.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from src.simcore.errors import ConfigurationError

logger = logging.getLogger(__name__)


@dataclass(slots=True)
class VirtualAdmittanceState:
    r_v: float = 0.05
    x_v: float = 0.25
    omega_base: float = 100.0 * math.pi
    limit: float = 1.2
    i_d: float = 0.0
    i_q: float = 0.0
    e_d_prev: float = 0.0
    e_q_prev: float = 0.0
    saturated: bool = False

    def __post_init__(self) -> None:
        if not self.r_v > 0.0 or self.x_v < 0.0:
            raise ConfigurationError(
                f"virtuální impedance musí mít R_v > 0 a X_v ≥ 0 (R_v={self.r_v}, X_v={self.x_v})",
                "control.virtual_admittance",
            )
        if not self.limit > 0.0:
            raise ConfigurationError("proudový limit musí být kladný", "control.current_limit")

    def preload(self, i_d: float, i_q: float, e_d: float, e_q: float) -> None:
        """Nastaví stav filtru (beznárazové přepnutí do VCM)."""
        self.i_d, self.i_q = i_d, i_q
        self.e_d_prev, self.e_q_prev = e_d, e_q
        self.saturated = False


def limit_magnitude(d: float, q: float, limit: float) -> tuple[float, float, bool]:
    """Omezí velikost vektoru se zachováním úhlu."""
    magnitude = math.hypot(d, q)
    if magnitude <= limit:
        return d, q, False
    scale = limit / magnitude
    return d * scale, q * scale, True


def virtual_admittance_step(
    v_ref_dq: tuple[float, float],
    v_meas_dq: tuple[float, float],
    state: VirtualAdmittanceState,
    dt: float,
    omega: float | None = None,
) -> tuple[float, float]:
    """Referenční proud i = Y_v·(v_ref − v_meas), omezený na state.limit."""
    e_d = v_ref_dq[0] - v_meas_dq[0]
    e_q = v_ref_dq[1] - v_meas_dq[1]

    if state.x_v == 0.0:
        i_d, i_q = e_d / state.r_v, e_q / state.r_v
    else:
        w = state.omega_base if omega is None else omega
        l_v = state.x_v / state.omega_base
        h = 0.5 * dt
        # A = [[−R/L, ω], [−ω, −R/L]],  B = I/L
        a = -state.r_v / l_v
        r_d = state.i_d + h * (a * state.i_d + w * state.i_q) + h * (e_d + state.e_d_prev) / l_v
        r_q = state.i_q + h * (-w * state.i_d + a * state.i_q) + h * (e_q + state.e_q_prev) / l_v
        m11 = 1.0 - h * a
        m12 = -h * w
        det = m11 * m11 + m12 * m12
        i_d = (m11 * r_d - m12 * r_q) / det
        i_q = (m11 * r_q + m12 * r_d) / det

    i_d, i_q, saturated = limit_magnitude(i_d, i_q, state.limit)
    if saturated and not state.saturated:
        logger.debug("Virtuální admitance v proudovém omezení (%.3f p.u.)", state.limit)
    state.saturated = saturated
    state.i_d, state.i_q = i_d, i_q
    state.e_d_prev, state.e_q_prev = e_d, e_q
    return i_d, i_q
