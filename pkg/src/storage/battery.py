"""Komunitní baterie – energetický model stavu nabití (coulomb counting)."""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace

from src.simcore.errors import ConfigurationError

logger = logging.getLogger(__name__)

SECONDS_PER_HOUR = 3600.0


@dataclass(frozen=True)
class BatteryParams:
    """Štítkové hodnoty baterie a jejího střídače (W, Wh)."""

    p_rate: float = 30000.0
    q_rate: float = 30000.0
    usable_capacity: float = 50000.0
    nominal_capacity: float = 80000.0
    dod_limit: float = 0.95
    efficiency: float = 0.97
    v_dc_min: float = 384.0
    v_dc_max: float = 498.0

    def __post_init__(self) -> None:
        if not 0.0 < self.usable_capacity <= self.nominal_capacity:
            raise ConfigurationError(
                f"využitelná kapacita {self.usable_capacity} Wh musí být v (0, {self.nominal_capacity}]",
                "battery.usable_capacity",
            )
        if not 0.0 < self.dod_limit <= 1.0:
            raise ConfigurationError(f"DoD musí být v (0, 1], je {self.dod_limit!r}", "battery.dod_limit")
        if not 0.0 < self.efficiency <= 1.0:
            raise ConfigurationError(f"účinnost musí být v (0, 1], je {self.efficiency!r}", "battery.efficiency")
        if not self.p_rate > 0.0:
            raise ConfigurationError("výkon střídače musí být kladný", "battery.p_rate")

    @property
    def soc_min(self) -> float:
        return 1.0 - self.dod_limit

    @property
    def usable_joules(self) -> float:
        return self.usable_capacity * SECONDS_PER_HOUR


@dataclass(frozen=True)
class BatteryState:
    """soc – podíl využitelné kapacity; p_ac – skutečně dodaný AC výkon (W, + = vybíjení)."""

    soc: float = 0.8
    p_dc: float = 0.0
    p_ac: float = 0.0
    at_limit: bool = False
    rate_limited: bool = False


def battery_step(state: BatteryState, p_ac: float, dt: float, params: BatteryParams) -> BatteryState:
    """Jeden krok energetického modelu.

    Vybíjení odebírá z článků p_ac/η, nabíjení ukládá p_ac·η. Na mezích
    SoC se výkon v daném směru vynuluje a nastaví se at_limit; omezení na
    jmenovitý výkon střídače hlásí jen rate_limited.
    """
    if not dt > 0.0:
        raise ConfigurationError(f"krok musí být kladný, je {dt!r}", "dt")
    p = min(max(p_ac, -params.p_rate), params.p_rate)
    rate_limited = p != p_ac
    at_limit = False
    if p > 0.0 and state.soc <= params.soc_min:
        p, at_limit = 0.0, True
    elif p < 0.0 and state.soc >= 1.0:
        p, at_limit = 0.0, True

    p_dc = p / params.efficiency if p >= 0.0 else p * params.efficiency
    soc = state.soc - p_dc * dt / params.usable_joules
    soc = min(max(soc, params.soc_min), 1.0)
    if at_limit and not state.at_limit:
        logger.warning("Baterie na mezi (SoC = %.3f, požadavek %.0f W)", state.soc, p_ac)
    return replace(state, soc=soc, p_dc=p_dc, p_ac=p, at_limit=at_limit, rate_limited=rate_limited)
