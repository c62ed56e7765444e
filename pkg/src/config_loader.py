"""Načtení a validace scénářů (YAML nebo JSON)."""

import json
import logging
import math
import os
from pathlib import Path
from typing import Any, Mapping

import yaml

from src.control.controller import InverterSettings, PvSettings
from src.control.vsg import VsgParams
from src.harness.scenario import BatteryUnit, Event, PvUnit, Scenario, SyncConfig
from src.network.params import FeederParams, GridEquivalent, LcFilterParams, LoadBank
from src.pv.array import EnvironmentProfile, PvArrayParams
from src.simcore.errors import ConfigurationError
from src.simcore.per_unit import PerUnitBase
from src.storage.battery import BatteryParams
from src.synchronizer.sync import SyncGains, SyncThresholds

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
SCENARIO_DIR = Path(__file__).resolve().parent.parent / "config" / "scenarios"
SCENARIO_DIR_ENV = "GFS_SCENARIO_DIR"
SUFFIXES = (".yaml", ".yml", ".json")

_PV_UNIT: dict[str, Any] = {
    "enabled": True,
    "irradiance": 1000.0,
    "temperature": 25.0,
    "c_dc": 0.01,
    "kp_dc": 290.0,
    "mppt_step": 2.0,
    "feeder": {"r": 0.02, "x": 0.007},
    "array": {
        "i_sc": 40.9,
        "v_oc": 700.0,
        "v_mp": 580.0,
        "i_mp": 22000.0 / 580.0,
        "alpha_isc": 0.0005,
        "beta_voc": -0.003,
    },
}

_CONTROL: dict[str, Any] = {
    "k_w": 0.02,
    "h": 2.0,
    "d": 40.0,
    "p_ref": 0.0,
    "q_ref": 0.0,
    "v_nom": 1.0,
    "n_q": 0.05,
    "r_v": 0.05,
    "x_v": 0.25,
    "s_rated": 25000.0,
    "current_limit_factor": 1.2,
    "v_bus": 800.0,
}

# Výchozí hodnoty scénáře
DEFAULTS: dict[str, Any] = {
    "schema_version": SCHEMA_VERSION,
    "name": "",
    "description": "",
    "duration": 5.0,
    "dt": 0.0001,
    "telemetry_rate_hz": 1000.0,
    "warmup": 0.5,
    "sensor_noise_std": 0.0,
    "seed": 0,
    "base": {"s_base": 50000.0, "v_base_ll": 400.0, "f_base": 50.0},
    "grid": {"v_th": 1.0, "r_th": 0.01, "x_th": 0.05, "f_grid": 50.0},
    "load": {"p": 0.6, "q": 0.0},
    "lc_filter": {"l_f": 0.08, "c_f": 0.05, "r_f": 0.005},
    "control": {
        "pv": dict(_CONTROL),
        "battery": {**_CONTROL, "h": 0.0, "s_rated": 30000.0},
    },
    "pv": {"pv1": _PV_UNIT, "pv2": _PV_UNIT},
    "battery": {
        "enabled": True,
        "soc0": 0.8,
        "feeder": {"r": 0.02, "x": 0.007},
        "p_rate": 30000.0,
        "q_rate": 30000.0,
        "usable_capacity": 50000.0,
        "nominal_capacity": 80000.0,
        "dod_limit": 0.95,
        "efficiency": 0.97,
        "v_dc_min": 384.0,
        "v_dc_max": 498.0,
    },
    "sync": {
        "max_phase_err_deg": 5.0,
        "max_volt_err": 0.02,
        "max_freq_err": 0.05,
        "dwell": 0.1,
        "k_theta": 20.0,
        "k_f": 0.2,
        "k_v": 0.5,
        "k_theta_i": 20.0,
        "k_v_i": 5.0,
        "omega_clamp": math.pi,
        "v_clamp": 0.05,
        "rate_hz": 100.0,
        "trim_hold": 0.5,
        "trim_release": 1.0,
    },
    "events": [],
}

_EVENT_KEYS = {"time", "kind", "target", "value"}


def _deep_merge(base: dict, override: Mapping, path: str = "", filled: list[str] | None = None) -> dict:
    """Rekurzivní merge (override přepíše base); neznámé klíče jsou chyba.

    Cesty klíčů doplněných z výchozích hodnot se přidají do filled.
    """
    result: dict[str, Any] = {}
    for key, value in override.items():
        key_path = f"{path}.{key}" if path else str(key)
        if key not in base:
            raise ConfigurationError("neznámý klíč", key_path)
        default = base[key]
        if isinstance(default, dict):
            if not isinstance(value, Mapping):
                raise ConfigurationError(f"očekávána sekce, nalezeno {type(value).__name__}", key_path)
            result[key] = _deep_merge(default, value, key_path, filled)
        else:
            result[key] = value
    for key, default in base.items():
        if key in result:
            continue
        key_path = f"{path}.{key}" if path else key
        if isinstance(default, dict):
            result[key] = _deep_merge(default, {}, key_path, filled)
        else:
            result[key] = default
            if filled is not None:
                filled.append(key_path)
    return result


def _as_float(value: Any, key_path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigurationError(f"očekáváno číslo, nalezeno {value!r}", key_path)
    if not math.isfinite(value):
        raise ConfigurationError(f"hodnota musí být konečná, je {value!r}", key_path)
    return float(value)


def _as_int(value: Any, key_path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigurationError(f"očekáváno celé číslo, nalezeno {value!r}", key_path)
    return value


def _as_bool(value: Any, key_path: str) -> bool:
    if not isinstance(value, bool):
        raise ConfigurationError(f"očekáváno true/false, nalezeno {value!r}", key_path)
    return value


def _floats(section: Mapping[str, Any], path: str, skip: tuple[str, ...] = ()) -> dict[str, float]:
    return {k: _as_float(v, f"{path}.{k}") for k, v in section.items() if k not in skip and not isinstance(v, Mapping)}


def _build(path: str, factory, *args, **kwargs):
    """Zavolá konstruktor a chybu konfigurace doplní o cestu sekce."""
    try:
        return factory(*args, **kwargs)
    except ConfigurationError as e:
        leaf = e.key_path.rsplit(".", 1)[-1]
        key_path = path if not leaf or leaf == path.rsplit(".", 1)[-1] else f"{path}.{leaf}"
        message = str(e).removeprefix(f"{e.key_path}: ")
        raise ConfigurationError(message, key_path) from e


def _inverter_settings(name: str, control: Mapping[str, Any], lc: LcFilterParams, enabled: bool, path: str) -> InverterSettings:
    values = _floats(control, path)
    vsg = _build(
        path,
        VsgParams,
        k_w=values["k_w"],
        h=values["h"],
        d=values["d"],
        p_ref=values["p_ref"],
        q_ref=values["q_ref"],
        v_nom=values["v_nom"],
        n_q=values["n_q"],
    )
    return _build(
        path,
        InverterSettings,
        name=name,
        lc=lc,
        vsg=vsg,
        r_v=values["r_v"],
        x_v=values["x_v"],
        s_rated=values["s_rated"],
        current_limit_factor=values["current_limit_factor"],
        v_bus=values["v_bus"],
        enabled=enabled,
    )


def _profile(value: Any, key_path: str, minimum: float = -math.inf) -> EnvironmentProfile:
    """Konstanta nebo seznam dvojic [čas, hodnota] s lineární interpolací."""
    if isinstance(value, list):
        times, values = [], []
        for k, pair in enumerate(value):
            if not (isinstance(pair, list) and len(pair) == 2):
                raise ConfigurationError("očekávána dvojice [čas, hodnota]", f"{key_path}[{k}]")
            times.append(_as_float(pair[0], f"{key_path}[{k}]"))
            values.append(_as_float(pair[1], f"{key_path}[{k}]"))
        profile = _build(key_path, EnvironmentProfile, times, values)
    else:
        profile = EnvironmentProfile([0.0], [_as_float(value, key_path)])
    if min(profile.values) < minimum:
        raise ConfigurationError(f"hodnoty musí být ≥ {minimum:g}", key_path)
    return profile


def _pv_unit(name: str, doc: Mapping[str, Any], control: Mapping[str, Any], lc: LcFilterParams) -> PvUnit:
    path = f"pv.{name}"
    unit = doc["pv"][name]
    array = _build(f"{path}.array", PvArrayParams, **_floats(unit["array"], f"{path}.array"))
    pv = PvSettings(
        array=array,
        c_dc=_as_float(unit["c_dc"], f"{path}.c_dc"),
        kp_dc=_as_float(unit["kp_dc"], f"{path}.kp_dc"),
        mppt_step=_as_float(unit["mppt_step"], f"{path}.mppt_step"),
        irradiance=_profile(unit["irradiance"], f"{path}.irradiance", minimum=0.0),
        temperature=_profile(unit["temperature"], f"{path}.temperature"),
    )
    if pv.c_dc <= 0.0:
        raise ConfigurationError("kapacita DC meziobvodu musí být kladná", f"{path}.c_dc")
    settings = _inverter_settings(name, control, lc, _as_bool(unit["enabled"], f"{path}.enabled"), "control.pv")
    feeder = _build(f"{path}.feeder", FeederParams, **_floats(unit["feeder"], f"{path}.feeder"))
    return PvUnit(settings=settings, pv=pv, feeder=feeder)


def _battery_unit(doc: Mapping[str, Any], lc: LcFilterParams) -> BatteryUnit:
    section = doc["battery"]
    values = _floats(section, "battery", skip=("enabled",))
    params = _build(
        "battery",
        BatteryParams,
        **{k: v for k, v in values.items() if k != "soc0"},
    )
    settings = _inverter_settings(
        "bess", doc["control"]["battery"], lc, _as_bool(section["enabled"], "battery.enabled"), "control.battery"
    )
    feeder = _build("battery.feeder", FeederParams, **_floats(section["feeder"], "battery.feeder"))
    return BatteryUnit(settings=settings, params=params, soc0=values["soc0"], feeder=feeder)


def _sync_config(section: Mapping[str, Any]) -> SyncConfig:
    values = _floats(section, "sync")
    thresholds = _build(
        "sync",
        SyncThresholds,
        max_phase_err=math.radians(values["max_phase_err_deg"]),
        max_volt_err=values["max_volt_err"],
        max_freq_err=values["max_freq_err"],
        dwell=values["dwell"],
    )
    gains = _build(
        "sync",
        SyncGains,
        k_theta=values["k_theta"],
        k_f=values["k_f"],
        k_v=values["k_v"],
        k_theta_i=values["k_theta_i"],
        k_v_i=values["k_v_i"],
        omega_clamp=values["omega_clamp"],
        v_clamp=values["v_clamp"],
    )
    return SyncConfig(
        thresholds=thresholds,
        gains=gains,
        rate_hz=values["rate_hz"],
        trim_hold=values["trim_hold"],
        trim_release=values["trim_release"],
    )


def _events(items: Any) -> list[Event]:
    if not isinstance(items, list):
        raise ConfigurationError("očekáván seznam událostí", "events")
    events = []
    for k, item in enumerate(items):
        path = f"events[{k}]"
        if not isinstance(item, Mapping):
            raise ConfigurationError("událost musí být sekce", path)
        unknown = sorted(set(item) - _EVENT_KEYS)
        if unknown:
            raise ConfigurationError("neznámý klíč", f"{path}.{unknown[0]}")
        if "time" not in item or "kind" not in item:
            raise ConfigurationError("událost vyžaduje time a kind", path)
        kind = item["kind"]
        value = item.get("value")
        if value is not None:
            if kind == "set_enable":
                value = _as_bool(value, f"{path}.value")
            else:
                value = _as_float(value, f"{path}.value")
        events.append(
            Event(
                time=_as_float(item["time"], f"{path}.time"),
                kind=str(kind),
                target=item.get("target"),
                value=value,
            )
        )
    return events


def scenario_from_dict(document: Mapping[str, Any]) -> Scenario:
    """Sestaví a zvaliduje Scenario z načteného dokumentu."""
    if not isinstance(document, Mapping):
        raise ConfigurationError("dokument scénáře musí být slovník", "")
    version = document.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigurationError(f"nepodporovaná verze schématu {version!r}", "schema_version")

    filled: list[str] = []
    doc = _deep_merge(DEFAULTS, document, filled=filled)
    for key_path in filled:
        logger.debug("Výchozí hodnota %s", key_path)

    base = _build("base", PerUnitBase, **_floats(doc["base"], "base"))
    grid = _build("grid", GridEquivalent, **_floats(doc["grid"], "grid"))
    load_values = _floats(doc["load"], "load")
    load = _build("load", LoadBank.from_power, load_values["p"], load_values["q"])
    lc = _build("lc_filter", LcFilterParams, **_floats(doc["lc_filter"], "lc_filter"))

    scenario = Scenario(
        name=str(doc["name"]),
        description=str(doc["description"]),
        duration=_as_float(doc["duration"], "duration"),
        dt=_as_float(doc["dt"], "dt"),
        telemetry_rate_hz=_as_float(doc["telemetry_rate_hz"], "telemetry_rate_hz"),
        warmup=_as_float(doc["warmup"], "warmup"),
        sensor_noise_std=_as_float(doc["sensor_noise_std"], "sensor_noise_std"),
        seed=_as_int(doc["seed"], "seed"),
        base=base,
        grid=grid,
        load=load,
        pv_units=[_pv_unit(name, doc, doc["control"]["pv"], lc) for name in ("pv1", "pv2")],
        battery=_battery_unit(doc, lc),
        sync=_sync_config(doc["sync"]),
        events=_events(doc["events"]),
    )
    if scenario.telemetry_rate_hz <= 0.0:
        raise ConfigurationError("vzorkování telemetrie musí být kladné", "telemetry_rate_hz")
    scenario.validate()
    return scenario


def scenario_dirs() -> list[Path]:
    """Adresáře se scénáři v pořadí prohledávání."""
    dirs = []
    extra = os.environ.get(SCENARIO_DIR_ENV, "")
    if extra:
        dirs.append(Path(extra))
    dirs.append(SCENARIO_DIR)
    return dirs


def resolve_scenario_path(name_or_path: str | Path) -> Path:
    """Cesta k souboru nebo jméno vestavěného scénáře."""
    path = Path(name_or_path)
    if path.is_file():
        return path
    for directory in scenario_dirs():
        for suffix in SUFFIXES:
            candidate = directory / f"{name_or_path}{suffix}"
            if candidate.is_file():
                return candidate
    raise ConfigurationError(f"scénář {name_or_path!s} nenalezen", "scenario")


def read_document(path: Path) -> dict:
    """Načte YAML nebo JSON dokument podle přípony."""
    with open(path, "r", encoding="utf-8") as f:
        try:
            if path.suffix == ".json":
                document = json.load(f)
            else:
                document = yaml.safe_load(f)
        except (json.JSONDecodeError, yaml.YAMLError) as e:
            raise ConfigurationError(f"soubor {path} nelze přečíst: {e}", "") from e
    return document or {}


def load_scenario(source: str | Path | Mapping[str, Any]) -> Scenario:
    """Načte scénář z dokumentu, souboru nebo podle jména vestavěného scénáře."""
    if isinstance(source, Mapping):
        scenario = scenario_from_dict(source)
        logger.info("Scénář %s načten ze slovníku", scenario.name)
        return scenario

    path = resolve_scenario_path(source)
    document = read_document(path)
    if isinstance(document, dict) and not document.get("name"):
        document = {**document, "name": path.stem}
    scenario = scenario_from_dict(document)
    logger.info("Scénář %s načten z %s (%d událostí)", scenario.name, path, len(scenario.events))
    return scenario


def list_builtin_scenarios() -> list[tuple[str, str]]:
    """Jména a popisy dostupných scénářů (první výskyt jména vyhrává)."""
    found: dict[str, str] = {}
    for directory in scenario_dirs():
        if not directory.is_dir():
            logger.warning("Adresář scénářů %s neexistuje", directory)
            continue
        for path in sorted(directory.iterdir()):
            if path.suffix not in SUFFIXES or path.stem in found:
                continue
            try:
                document = read_document(path)
            except ConfigurationError as e:
                logger.warning("Scénář %s přeskočen: %s", path, e)
                continue
            found[path.stem] = str(document.get("description", "")) if isinstance(document, dict) else ""
    return sorted(found.items())
