"""Testy souhrnných metrik z telemetrie."""

import math

import numpy as np
import pytest

from src.harness.metrics import DroopReference, max_rocof, sharing_over_window, summarize
from tests.conftest import make_record


def _series(duration=2.0, step=0.001, **columns):
    """Záznamy s hodnotami sloupců danými funkcemi času."""
    records = []
    for k in range(int(round(duration / step)) + 1):
        t = k * step
        values = {name: fn(t) for name, fn in columns.items()}
        records.append(make_record(t, **values))
    return records


class TestRocof:
    def test_constant_frequency(self):
        t = np.arange(0.0, 1.0, 0.001)
        assert max_rocof(t, np.full_like(t, 50.0)) == 0.0

    def test_linear_ramp(self):
        t = np.arange(0.0, 1.0005, 0.001)
        f = 50.0 - 0.5 * t
        assert max_rocof(t, f) == pytest.approx(0.5, rel=1e-6)

    def test_short_series(self):
        assert max_rocof(np.array([0.0]), np.array([50.0])) == 0.0
        assert max_rocof(np.array([0.0, 0.1]), np.array([50.0, 49.9])) == pytest.approx(1.0)

    def test_window_smooths_single_sample_spike(self):
        t = np.arange(0.0, 1.0, 0.001)
        f = np.full_like(t, 50.0)
        f[500] = 50.01
        assert max_rocof(t, f) == pytest.approx(0.01 / 0.02)


class TestSummarize:
    def test_constant_telemetry(self):
        report = summarize(_series(), scenario="flat")
        assert report.scenario == "flat"
        assert report.max_rocof_hz_s == 0.0
        assert report.freq_nadir_hz == 50.0
        assert report.freq_zenith_hz == 50.0
        assert report.duration == pytest.approx(2.0)
        assert report.sharing_ratios == {}
        assert not report.aborted

    def test_fewer_than_two_records(self):
        report = summarize([make_record(0.0, events="abort")])
        assert report.aborted
        assert report.event_log == [(0.0, "abort")]

    def test_warmup_excludes_start(self):
        records = _series(freq_hz=lambda t: 49.0 if t < 0.1 else 50.0)
        assert summarize(records).max_rocof_hz_s > 10.0
        report = summarize(records, warmup=0.5)
        assert report.max_rocof_hz_s == 0.0
        assert report.freq_nadir_hz == 50.0

    def test_equal_sources_share_equally(self):
        records = _series(breaker=lambda t: 0, pv1_p_kw=lambda t: 10.0, pv2_p_kw=lambda t: 10.0, freq_hz=lambda t: 49.8)
        report = summarize(records)
        assert report.sharing_ratios["pv1"] == pytest.approx(0.5, rel=0.01)
        assert report.sharing_ratios["pv2"] == pytest.approx(0.5, rel=0.01)
        assert report.sharing_ratios["bess"] == 0.0
        assert report.islanded_powers_kw["pv1"] == pytest.approx(10.0)
        assert report.islanded_frequency_hz == pytest.approx(49.8)

    def test_sharing_uses_last_island_segment(self):
        records = _series(
            breaker=lambda t: 0 if 0.5 <= t < 1.5 else 1,
            pv1_p_kw=lambda t: 12.0 if t < 1.5 else 22.0,
            bess_p_kw=lambda t: 6.0 if t < 1.5 else 0.0,
        )
        ratios, powers = sharing_over_window(records[500:1500])
        report = summarize(records)
        assert report.sharing_ratios == pytest.approx(ratios)
        assert report.islanded_powers_kw["pv1"] == pytest.approx(12.0)
        assert powers["bess"] == pytest.approx(6.0)

    def test_droop_frequency(self):
        droop = DroopReference(
            k_w={"pv1": 0.02, "pv2": 0.02, "bess": 0.02},
            p_ref={"pv1": 0.0, "pv2": 0.0, "bess": 0.0},
            s_base_kw=50.0,
        )
        assert droop.frequency_hz(30.0) == pytest.approx(49.8)
        records = _series(
            breaker=lambda t: 0,
            pv1_p_kw=lambda t: 10.0,
            pv2_p_kw=lambda t: 10.0,
            bess_p_kw=lambda t: 10.0,
        )
        assert summarize(records, droop=droop).droop_frequency_hz == pytest.approx(49.8)

    def test_settling_time_after_event(self):
        def freq(t):
            return 50.0 if t < 1.0 else 49.8 + 0.2 * math.exp(-(t - 1.0) / 0.1)

        records = _series(freq_hz=freq, events=lambda t: "load_step" if abs(t - 1.0) < 1e-9 else "")
        report = summarize(records)
        assert report.event_log == [(pytest.approx(1.0), "load_step")]
        (key, settle), = report.settling_times.items()
        assert key == "load_step@1.000"
        assert settle == pytest.approx(0.1 * math.log(10.0), abs=0.002)
        assert report.overshoots_kw[key] == 0.0

    def test_inrush_ratio(self):
        records = _series(
            breaker=lambda t: 1 if t >= 1.0 else 0,
            grid_current_peak_a=lambda t: 6.0 if 1.0 <= t < 1.05 else 1.0 if t >= 1.05 else 0.0,
            events=lambda t: "close_breaker" if abs(t - 1.0) < 1e-9 else "",
        )
        assert summarize(records).inrush_ratio == pytest.approx(0.1)

    def test_abort_marks_report(self):
        records = _series(duration=0.01, events=lambda t: "abort" if t > 0.0095 else "")
        assert summarize(records).aborted
