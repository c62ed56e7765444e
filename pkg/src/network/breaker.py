"""Vypínač v PCC."""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BreakerState:
    closed: bool = True
    last_transition_time: float = 0.0


def set_breaker(state: BreakerState, closed: bool, t: float) -> BreakerState:
    """Přepne vypínač; opakovaný stejný povel je bez účinku."""
    if state.closed == closed:
        return state
    logger.info("Vypínač PCC %s v čase %.4f s", "sepnut" if closed else "rozepnut", t)
    return replace(state, closed=closed, last_transition_time=t)
