"""Záznam telemetrie – jeden řádek CSV na decimovaný vzorek (1 kHz)."""

from __future__ import annotations

from dataclasses import astuple, dataclass, fields

SOURCE_NAMES = ("pv1", "pv2", "bess")
PV_NAMES = ("pv1", "pv2")


@dataclass(frozen=True)
class TelemetryRecord:
    """Neměnný vzorek telemetrie; pořadí polí = pořadí sloupců CSV."""

    t: float
    pv1_p_kw: float
    pv1_q_kvar: float
    pv1_freq_hz: float
    pv1_mode: str
    pv1_v_dc_v: float
    pv2_p_kw: float
    pv2_q_kvar: float
    pv2_freq_hz: float
    pv2_mode: str
    pv2_v_dc_v: float
    bess_p_kw: float
    bess_q_kvar: float
    bess_freq_hz: float
    bess_soc: float
    pcc_v_peak_v: float
    bess_v_peak_v: float
    phase_diff_deg: float
    breaker: int
    sync_status: str
    grid_current_peak_a: float
    load_current_peak_a: float
    flags: str = ""
    events: str = ""

    def power_kw(self, source: str) -> float:
        return getattr(self, f"{source}_p_kw")

    def frequency_hz(self, source: str) -> float:
        return getattr(self, f"{source}_freq_hz")

    def event_list(self) -> list[str]:
        return [e for e in self.events.split(";") if e]


FIELDNAMES: tuple[str, ...] = tuple(f.name for f in fields(TelemetryRecord))
_FIELD_TYPES = {f.name: f.type for f in fields(TelemetryRecord)}


def format_value(value: float | int | str) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return f"{value:.9g}"
    return str(value)


def record_to_row(record: TelemetryRecord) -> list[str]:
    return [format_value(v) for v in astuple(record)]


def row_to_record(row: dict[str, str]) -> TelemetryRecord:
    """Převod řádku CSV (slovník sloupec → text) zpět na záznam."""
    values: dict[str, float | int | str] = {}
    for name in FIELDNAMES:
        text = row.get(name, "")
        kind = _FIELD_TYPES[name]
        if kind == "float":
            values[name] = float(text)
        elif kind == "int":
            values[name] = int(text)
        else:
            values[name] = text
    return TelemetryRecord(**values)
