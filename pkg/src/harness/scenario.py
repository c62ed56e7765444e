"""Definice scénáře – parametry komponent a časově seřazené události."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from src.control.controller import InverterSettings, PvSettings
from src.harness.telemetry import SOURCE_NAMES
from src.network.params import FeederParams, GridEquivalent, LoadBank
from src.simcore.errors import ConfigurationError
from src.simcore.per_unit import PerUnitBase
from src.storage.battery import BatteryParams
from src.synchronizer.sync import SyncGains, SyncThresholds

logger = logging.getLogger(__name__)

# druh události → zda vyžaduje cílový zdroj
EVENT_KINDS: dict[str, bool] = {
    "open_breaker": False,
    "request_resync": False,
    "load_step": False,
    "irradiance_step": True,
    "set_enable": True,
    "set_p_ref": True,
}
VALUE_REQUIRED = {"load_step", "irradiance_step", "set_enable", "set_p_ref"}


@dataclass(frozen=True)
class Event:
    time: float
    kind: str
    target: str | None = None
    value: float | bool | None = None

    def describe(self) -> str:
        parts = [self.kind]
        if self.target:
            parts.append(self.target)
        if self.value is not None:
            parts.append(str(self.value))
        return ":".join(parts)


@dataclass
class PvUnit:
    settings: InverterSettings
    pv: PvSettings = field(default_factory=PvSettings)
    feeder: FeederParams = field(default_factory=FeederParams)


@dataclass
class BatteryUnit:
    settings: InverterSettings
    params: BatteryParams = field(default_factory=BatteryParams)
    soc0: float = 0.8
    feeder: FeederParams = field(default_factory=FeederParams)


@dataclass(frozen=True)
class SyncConfig:
    thresholds: SyncThresholds = field(default_factory=SyncThresholds)
    gains: SyncGains = field(default_factory=SyncGains)
    rate_hz: float = 100.0
    trim_hold: float = 0.5
    trim_release: float = 1.0


@dataclass
class Scenario:
    name: str
    duration: float
    pv_units: list[PvUnit]
    battery: BatteryUnit
    dt: float = 0.0001
    base: PerUnitBase = field(default_factory=PerUnitBase)
    grid: GridEquivalent = field(default_factory=GridEquivalent)
    load: LoadBank = field(default_factory=lambda: LoadBank.from_power(0.6))
    sync: SyncConfig = field(default_factory=SyncConfig)
    events: list[Event] = field(default_factory=list)
    telemetry_rate_hz: float = 1000.0
    warmup: float = 0.5
    sensor_noise_std: float = 0.0
    seed: int = 0
    description: str = ""

    @property
    def source_names(self) -> list[str]:
        return [u.settings.name for u in self.pv_units] + [self.battery.settings.name]

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.dt))

    @property
    def telemetry_decimation(self) -> int:
        return max(1, int(round(1.0 / (self.telemetry_rate_hz * self.dt))))

    def validate(self) -> None:
        """Kontrola invariantů scénáře; chyby nesou tečkovou cestu ke klíči."""
        if not self.duration > 0.0:
            raise ConfigurationError(f"délka simulace musí být kladná, je {self.duration!r}", "duration")
        if not 0.0 < self.dt <= 0.0002:
            raise ConfigurationError(f"krok {self.dt!r} s mimo rozsah (0, 200 µs]", "dt")
        if self.sensor_noise_std < 0.0:
            raise ConfigurationError("směrodatná odchylka šumu nesmí být záporná", "sensor_noise_std")
        if self.warmup < 0.0 or self.warmup >= self.duration:
            raise ConfigurationError("náběh musí ležet v intervalu [0, duration)", "warmup")
        names = self.source_names
        if tuple(names) != SOURCE_NAMES:
            raise ConfigurationError(f"zdroje musí být {list(SOURCE_NAMES)}, jsou {names}", "sources")
        units = [(u.settings, f"pv.{u.settings.name}") for u in self.pv_units]
        units.append((self.battery.settings, "battery"))
        for settings, path in units:
            try:
                settings.lc.validate_band(self.base.f_base, self.dt)
            except ConfigurationError as e:
                raise ConfigurationError(str(e).removeprefix(f"{e.key_path}: "), f"{path}.lc_filter") from e
        if not 0.0 < self.battery.soc0 <= 1.0:
            raise ConfigurationError(f"počáteční SoC {self.battery.soc0!r} mimo (0, 1]", "battery.soc0")

        previous = 0.0
        for k, event in enumerate(self.events):
            path = f"events[{k}]"
            if event.kind not in EVENT_KINDS:
                raise ConfigurationError(f"neznámý druh události {event.kind!r}", f"{path}.kind")
            if not 0.0 <= event.time <= self.duration:
                raise ConfigurationError(
                    f"čas události {event.time} s mimo interval [0, {self.duration}]", f"{path}.time"
                )
            if event.time < previous:
                raise ConfigurationError("události musí být seřazeny podle času", f"{path}.time")
            previous = event.time
            if EVENT_KINDS[event.kind]:
                if event.target not in names:
                    raise ConfigurationError(f"neznámý cíl události {event.target!r}", f"{path}.target")
                if event.kind == "irradiance_step" and event.target == self.battery.settings.name:
                    raise ConfigurationError("ozáření lze nastavit jen FV zdroji", f"{path}.target")
            if event.kind in VALUE_REQUIRED and event.value is None:
                raise ConfigurationError(f"událost {event.kind} vyžaduje hodnotu", f"{path}.value")
        logger.debug(
            "Scénář %s v pořádku: %.2f s, krok %.0f µs, %d událostí",
            self.name,
            self.duration,
            self.dt * 1e6,
            len(self.events),
        )
