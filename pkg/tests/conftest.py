"""Sdílené pomůcky testů."""

import pytest

from src.harness.telemetry import TelemetryRecord

_DEFAULTS = dict(
    pv1_p_kw=0.0,
    pv1_q_kvar=0.0,
    pv1_freq_hz=50.0,
    pv1_mode="CCM",
    pv1_v_dc_v=580.0,
    pv2_p_kw=0.0,
    pv2_q_kvar=0.0,
    pv2_freq_hz=50.0,
    pv2_mode="CCM",
    pv2_v_dc_v=580.0,
    bess_p_kw=0.0,
    bess_q_kvar=0.0,
    bess_freq_hz=50.0,
    bess_soc=0.8,
    pcc_v_peak_v=326.6,
    bess_v_peak_v=326.6,
    phase_diff_deg=0.0,
    breaker=1,
    sync_status="idle",
    grid_current_peak_a=0.0,
    load_current_peak_a=60.0,
)


def make_record(t: float, **overrides) -> TelemetryRecord:
    """Záznam telemetrie s výchozími hodnotami ustáleného připojeného stavu."""
    values = {**_DEFAULTS, **overrides}
    freq = values.pop("freq_hz", None)
    if freq is not None:
        for source in ("pv1", "pv2", "bess"):
            values[f"{source}_freq_hz"] = freq
    return TelemetryRecord(t=t, **values)


@pytest.fixture
def record():
    return make_record
