"""Sledování bodu maximálního výkonu metodou perturb & observe."""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace

from src.simcore.errors import ConfigurationError

logger = logging.getLogger(__name__)

MPPT_RATE_HZ = 10.0


@dataclass(frozen=True)
class MpptState:
    """Stav P&O sledovače.

    v_ref je vždy v intervalu [v_min, v_max] = [0.1·v_oc, v_oc].
    direction je +1 (zvyšovat napětí) nebo −1.
    """

    v_ref: float
    v_min: float
    v_max: float
    last_p: float | None = None
    last_v: float | None = None
    step_size: float = 2.0
    direction: int = 1
    enabled: bool = True

    def __post_init__(self) -> None:
        if not 0.0 < self.v_min < self.v_max:
            raise ConfigurationError(
                f"neplatné meze MPPT ({self.v_min}, {self.v_max})", "pv.mppt"
            )
        if not self.step_size > 0.0:
            raise ConfigurationError(f"krok MPPT musí být kladný, je {self.step_size!r}", "pv.mppt.step_size")
        object.__setattr__(self, "v_ref", min(max(self.v_ref, self.v_min), self.v_max))

    @classmethod
    def for_array(cls, v_oc: float, v_start: float, step_size: float = 2.0) -> "MpptState":
        return cls(v_ref=v_start, v_min=0.1 * v_oc, v_max=v_oc, step_size=step_size)


def mppt_step(state: MpptState, p: float, v_dc: float) -> MpptState:
    """Jeden krok P&O – volá se s frekvencí MPPT_RATE_HZ.

    Pokles výkonu otočí směr, růst nebo shoda směr zachová.
    """
    if not state.enabled:
        return state
    direction = state.direction
    if state.last_p is not None and p < state.last_p:
        direction = -direction
    v_ref = min(max(state.v_ref + direction * state.step_size, state.v_min), state.v_max)
    return replace(state, v_ref=v_ref, last_p=p, last_v=v_dc, direction=direction)


def restart_mppt(state: MpptState, v_dc: float) -> MpptState:
    """Znovu rozběhne sledování z aktuálního napětí (návrat do CCM)."""
    logger.debug("MPPT znovu spuštěno z %.1f V", v_dc)
    return replace(state, v_ref=min(max(v_dc, state.v_min), state.v_max), last_p=None, last_v=None, enabled=True)
