"""DC meziobvod mezi FV polem a střídačem."""

from __future__ import annotations

from typing import NamedTuple

from src.simcore.errors import ConfigurationError


class DcLinkUpdate(NamedTuple):
    v_dc: float
    collapsed: bool


def dc_link_step(v_dc: float, i_pv: float, i_inv: float, c_dc: float, dt: float) -> DcLinkUpdate:
    """v' = v + dt·(i_pv − i_inv)/c_dc, omezeno zdola nulou."""
    if not c_dc > 0.0:
        raise ConfigurationError(f"kapacita DC meziobvodu musí být kladná, je {c_dc!r}", "pv.c_dc")
    v_next = v_dc + dt * (i_pv - i_inv) / c_dc
    if v_next <= 0.0:
        return DcLinkUpdate(0.0, True)
    return DcLinkUpdate(v_next, False)
