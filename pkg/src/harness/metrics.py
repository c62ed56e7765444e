"""Souhrnné metriky běhu počítané výhradně z telemetrie."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from src.control.vsg import droop_equilibrium
from src.harness.telemetry import PV_NAMES, SOURCE_NAMES, TelemetryRecord

logger = logging.getLogger(__name__)

ROCOF_WINDOW = 0.02
SETTLING_BAND_HZ = 0.02
INRUSH_WINDOW = 0.1
PRE_CLOSE_WINDOW = 0.02
SHARING_FRACTION = 0.1


@dataclass(frozen=True)
class DroopReference:
    """Droop parametry zdrojů pro výpočet očekávané ostrovní frekvence."""

    k_w: dict[str, float]
    p_ref: dict[str, float]
    s_base_kw: float
    f_nom: float = 50.0

    def frequency_hz(self, p_total_kw: float) -> float:
        names = list(self.k_w)
        omega, _ = droop_equilibrium(
            [self.k_w[n] for n in names],
            [self.p_ref[n] for n in names],
            p_total_kw / self.s_base_kw,
            omega_nom=2.0 * math.pi * self.f_nom,
        )
        return omega / (2.0 * math.pi)


@dataclass
class RunReport:
    """Výsledky běhu; časy v s, frekvence v Hz, výkony v kW."""

    scenario: str = ""
    duration: float = 0.0
    max_rocof_hz_s: float = 0.0
    freq_nadir_hz: float = 0.0
    freq_zenith_hz: float = 0.0
    settling_times: dict[str, float] = field(default_factory=dict)
    overshoots_kw: dict[str, float] = field(default_factory=dict)
    sharing_ratios: dict[str, float] = field(default_factory=dict)
    islanded_powers_kw: dict[str, float] = field(default_factory=dict)
    islanded_frequency_hz: float | None = None
    droop_frequency_hz: float | None = None
    inrush_ratio: float | None = None
    event_log: list[tuple[float, str]] = field(default_factory=list)
    aborted: bool = False


def _column(records: Sequence[TelemetryRecord], name: str) -> np.ndarray:
    return np.array([getattr(r, name) for r in records], dtype=float)


def max_rocof(t: np.ndarray, freq: np.ndarray, window: float = ROCOF_WINDOW) -> float:
    """Maximum |df/dt| z centrované diference přes okno window."""
    if len(t) < 2:
        return 0.0
    if len(t) < 3:
        return float(np.max(np.abs(np.diff(freq) / np.diff(t))))
    step = float(np.median(np.diff(t)))
    half = min(max(1, int(round(0.5 * window / step))), (len(t) - 1) // 2)
    df = freq[2 * half:] - freq[: -2 * half]
    dt = t[2 * half:] - t[: -2 * half]
    return float(np.max(np.abs(df / dt)))


def _event_log(records: Sequence[TelemetryRecord]) -> list[tuple[float, str]]:
    log: list[tuple[float, str]] = []
    for r in records:
        for name in r.event_list():
            log.append((r.t, name))
    return log


def _settling_time(t: np.ndarray, y: np.ndarray, start: float, stop: float, band: float) -> float:
    mask = (t >= start) & (t <= stop)
    if mask.sum() < 2:
        return 0.0
    ts, ys = t[mask], y[mask]
    final = ys[-1]
    outside = np.nonzero(np.abs(ys - final) > band)[0]
    if len(outside) == 0:
        return 0.0
    return float(ts[min(outside[-1] + 1, len(ts) - 1)] - start)


def _islanded_window(records: Sequence[TelemetryRecord]) -> tuple[int, int] | None:
    """Indexy posledního souvislého úseku s rozepnutým vypínačem."""
    k = len(records) - 1
    while k >= 0 and records[k].breaker != 0:
        k -= 1
    if k < 0:
        return None
    last_end = k
    while k >= 0 and records[k].breaker == 0:
        k -= 1
    return k + 1, last_end


def sharing_over_window(records: Sequence[TelemetryRecord]) -> tuple[dict[str, float], dict[str, float]]:
    """Podíly P_i/ΣP a střední výkony za poslední desetinu záznamů."""
    n = max(1, int(round(len(records) * SHARING_FRACTION)))
    tail = records[-n:]
    powers = {s: float(np.mean([r.power_kw(s) for r in tail])) for s in SOURCE_NAMES}
    total = sum(powers.values())
    ratios = {s: (p / total if total != 0.0 else 0.0) for s, p in powers.items()}
    return ratios, powers


def summarize(
    records: Sequence[TelemetryRecord],
    warmup: float = 0.0,
    scenario: str = "",
    droop: DroopReference | None = None,
) -> RunReport:
    """Spočítá RunReport z telemetrie (alespoň dva záznamy)."""
    report = RunReport(scenario=scenario)
    if len(records) < 2:
        logger.warning("Telemetrie má méně než dva záznamy, metriky nelze spočítat")
        report.event_log = _event_log(records)
        report.aborted = any(name == "abort" for _, name in report.event_log)
        return report

    t = _column(records, "t")
    report.duration = float(t[-1] - t[0])
    report.event_log = _event_log(records)
    report.aborted = any(name == "abort" for _, name in report.event_log)

    active = t >= warmup
    if active.sum() < 2:
        active = np.ones_like(t, dtype=bool)
    ta = t[active]
    pv_freqs = [_column(records, f"{s}_freq_hz")[active] for s in PV_NAMES]
    all_freqs = pv_freqs + [_column(records, "bess_freq_hz")[active]]
    report.max_rocof_hz_s = max(max_rocof(ta, f) for f in pv_freqs)
    report.freq_nadir_hz = float(min(f.min() for f in all_freqs))
    report.freq_zenith_hz = float(max(f.max() for f in all_freqs))

    events = [(et, name) for et, name in report.event_log if et >= warmup and name != "abort"]
    for k, (start, name) in enumerate(events):
        stop = events[k + 1][0] if k + 1 < len(events) else float(t[-1])
        key = f"{name}@{start:.3f}"
        settle = max(
            _settling_time(t, _column(records, f"{s}_freq_hz"), start, stop, SETTLING_BAND_HZ)
            for s in SOURCE_NAMES
        )
        report.settling_times[key] = settle
        mask = (t >= start) & (t <= stop)
        overshoot = 0.0
        for s in SOURCE_NAMES:
            p = _column(records, f"{s}_p_kw")[mask]
            if len(p):
                overshoot = max(overshoot, float(np.max(np.abs(p - p[-1]))))
        report.overshoots_kw[key] = overshoot

    window = _islanded_window(records)
    if window is not None:
        first, last = window
        segment = records[first : last + 1]
        ratios, powers = sharing_over_window(segment)
        report.sharing_ratios = ratios
        report.islanded_powers_kw = powers
        n = max(1, int(round(len(segment) * SHARING_FRACTION)))
        report.islanded_frequency_hz = float(
            np.mean([r.frequency_hz(s) for r in segment[-n:] for s in SOURCE_NAMES])
        )
        if droop is not None:
            report.droop_frequency_hz = droop.frequency_hz(sum(powers.values()))

    closes = [et for et, name in report.event_log if name == "close_breaker"]
    if closes:
        tc = closes[-1]
        grid_i = _column(records, "grid_current_peak_a")
        load_i = _column(records, "load_current_peak_a")
        pre = (t >= tc - PRE_CLOSE_WINDOW) & (t < tc)
        post = (t >= tc) & (t <= tc + INRUSH_WINDOW)
        if pre.any() and post.any() and load_i[pre].mean() > 0.0:
            report.inrush_ratio = float(grid_i[post].max() / load_i[pre].mean())

    return report
