"""Skokové změny zátěže."""

from __future__ import annotations

import logging
from dataclasses import replace

from src.network.params import LoadBank
from src.simcore.errors import ConfigurationError

logger = logging.getLogger(__name__)


def apply_load_step(loads: LoadBank, delta: float, t: float) -> LoadBank:
    """Přepočítá odpor tak, aby zátěž při 1 p.u. odebírala (původní + delta)."""
    if delta == 0.0:
        return loads
    p_new = loads.p_nominal + delta
    if not p_new > 0.0:
        raise ConfigurationError(
            f"skok zátěže {delta:+.3f} p.u. v čase {t:.3f} s by vedl na nekladnou zátěž {p_new:.3f} p.u.",
            "events.load_step.delta",
        )
    logger.info("Skok zátěže %+.3f p.u. v čase %.3f s -> %.3f p.u.", delta, t, p_new)
    return replace(loads, r=1.0 / p_new)
