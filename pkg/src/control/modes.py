"""Přepínání režimu CCM (proudové řízení) a VCM (napěťové, grid-forming)."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

logger = logging.getLogger(__name__)


class Mode(str, Enum):
    CCM = "CCM"
    VCM = "VCM"
    OFF = "OFF"


@dataclass(frozen=True)
class ControlMode:
    mode: Mode = Mode.CCM
    transition_time: float = 0.0


def select_mode(grid_connected: bool, en: bool, current: ControlMode, t: float) -> ControlMode:
    """Režim podle stavu vypínače a povolení střídače.

    připojeno ∧ EN → CCM, ostrov ∧ EN → VCM, jinak OFF.
    """
    if not en:
        wanted = Mode.OFF
    elif grid_connected:
        wanted = Mode.CCM
    else:
        wanted = Mode.VCM
    if wanted == current.mode:
        return current
    logger.info("Přepnutí režimu %s -> %s v čase %.4f s", current.mode.value, wanted.value, t)
    return ControlMode(wanted, t)
