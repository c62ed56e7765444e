"""Testy simulační smyčky a celých scénářů."""

import numpy as np
import pytest

from src.config_loader import load_scenario, scenario_from_dict
from src.harness import engine
from src.harness.engine import add_sensor_noise, apply_event, build_system, run_scenario
from src.harness.scenario import Event
from src.network.params import GridEquivalent
from src.network.plant import measure
from src.pv.array import mpp_scan
from src.reporting.export import write_telemetry
from src.simcore.errors import SimulationBlowUpError
from src.synchronizer.sync import SyncPhase


def _doc(**overrides):
    return {"schema_version": 1, "duration": 0.05, "warmup": 0.0, **overrides}


@pytest.fixture
def system():
    return build_system(scenario_from_dict(_doc()))


class TestBuildSystem:
    def test_grid_connected_operating_point(self, system):
        assert system.breaker.closed
        assert system.synchronizer.phase == SyncPhase.IDLE
        pv1, pv2 = system.pv
        assert pv1.p_avg == pytest.approx(0.44, rel=0.02)
        assert pv2.p_avg == pytest.approx(pv1.p_avg)
        assert abs(system.battery.p_avg) < 0.01
        assert pv1.mode.mode.value == "CCM"
        assert system.battery.mode.mode.value == "VCM"

    def test_controller_lookup(self, system):
        assert system.controller("bess") is system.battery
        with pytest.raises(KeyError):
            system.controller("pv3")


class TestApplyEvent:
    def test_open_breaker(self, system):
        apply_event(system, Event(0.1, "open_breaker"), 0.1)
        assert not system.breaker.closed
        assert system.breaker.last_transition_time == 0.1

    def test_request_resync(self, system):
        apply_event(system, Event(0.1, "request_resync"), 0.1)
        assert system.synchronizer.phase == SyncPhase.SYNCING
        assert system.synchronizer.status.armed

    def test_load_step(self, system):
        apply_event(system, Event(0.1, "load_step", value=0.1), 0.1)
        assert system.loads.p_nominal == pytest.approx(0.7)

    def test_irradiance_step(self, system):
        apply_event(system, Event(0.1, "irradiance_step", "pv2", 400.0), 0.1)
        assert system.pv[1].pv.irradiance.value_at(0.2) == 400.0
        assert system.pv[0].pv.irradiance.value_at(0.2) == 1000.0

    def test_set_enable_and_p_ref(self, system):
        apply_event(system, Event(0.1, "set_enable", "pv1", False), 0.1)
        apply_event(system, Event(0.1, "set_p_ref", "bess", 0.2), 0.1)
        assert not system.pv[0].en
        assert system.battery.vsg.p_ref == 0.2

    def test_irradiance_only_for_pv(self, system):
        with pytest.raises(TypeError):
            apply_event(system, Event(0.1, "irradiance_step", "bess", 400.0), 0.1)


def test_sensor_noise_shared_pcc_measurement(system):
    meas = measure(system.model, system.state, GridEquivalent())
    noisy = add_sensor_noise(meas, np.random.default_rng(1), 0.01)
    assert noisy.v_pcc != meas.v_pcc
    assert all(m.v_g == noisy.v_pcc for m in noisy.inverters)
    assert noisy.time == meas.time
    clean = add_sensor_noise(meas, np.random.default_rng(1), 0.0)
    assert clean.v_pcc.as_tuple() == pytest.approx(meas.v_pcc.as_tuple())


class TestRunScenario:
    def test_record_count_and_streaming(self):
        streamed = []
        result = run_scenario(scenario_from_dict(_doc()), on_record=streamed.append)
        assert len(result.records) == 51
        assert result.records[0].t == 0.0
        assert result.records[-1].t == pytest.approx(0.05)
        assert streamed == result.records
        assert not result.report.aborted

    def test_events_recorded_once(self):
        doc = _doc(events=[{"time": 0.02, "kind": "load_step", "value": 0.05}])
        result = run_scenario(scenario_from_dict(doc))
        assert [name for _, name in result.report.event_log] == ["load_step"]
        assert result.report.event_log[0][0] == pytest.approx(0.021, abs=1e-3)

    def test_abort_is_recorded(self, monkeypatch):
        step_plant = engine.step_plant

        def failing(model, state, *args):
            if state.time >= 0.0199:
                raise SimulationBlowUpError("i_g", 1e6, state.time)
            return step_plant(model, state, *args)

        monkeypatch.setattr(engine, "step_plant", failing)
        streamed = []
        result = run_scenario(scenario_from_dict(_doc()), on_record=streamed.append)
        assert result.report.aborted
        assert result.records[-1].event_list()[-1] == "abort"
        assert result.records[-1].t < 0.021
        assert streamed == result.records

    def test_noise_is_seeded(self, tmp_path):
        doc = _doc(sensor_noise_std=0.002, seed=7, events=[{"time": 0.01, "kind": "open_breaker"}])
        first = write_telemetry(run_scenario(scenario_from_dict(doc)).records, tmp_path / "a.csv")
        second = write_telemetry(run_scenario(scenario_from_dict(doc)).records, tmp_path / "b.csv")
        other = write_telemetry(
            run_scenario(scenario_from_dict({**doc, "seed": 8})).records, tmp_path / "c.csv"
        )
        assert first.read_bytes() == second.read_bytes()
        assert first.read_bytes() != other.read_bytes()


@pytest.fixture(scope="module")
def steady_state():
    return run_scenario(load_scenario("steady_state"))


@pytest.fixture(scope="module")
def case1():
    return run_scenario(load_scenario("case1_island"))


@pytest.fixture(scope="module")
def case2():
    return run_scenario(load_scenario("case2_resync"))


def _tail(records, seconds):
    end = records[-1].t
    return [r for r in records if r.t >= end - seconds]


@pytest.mark.slow
class TestScenarios:
    def test_steady_state_frequency(self, steady_state):
        report = steady_state.report
        assert not report.aborted
        assert abs(report.freq_nadir_hz - 50.0) <= 0.001
        assert abs(report.freq_zenith_hz - 50.0) <= 0.001

    def test_case1_no_abort(self, case1):
        assert not case1.report.aborted
        assert "open_breaker" in [name for _, name in case1.report.event_log]

    def test_case1_droop_sharing(self, case1):
        powers = case1.report.islanded_powers_kw
        values = [powers[s] for s in ("pv1", "pv2", "bess")]
        assert sum(values) > 25.0
        assert max(values) - min(values) <= 0.01 * max(values)

    def test_case1_droop_frequency(self, case1):
        report = case1.report
        assert report.islanded_frequency_hz < 50.0
        assert report.islanded_frequency_hz == pytest.approx(report.droop_frequency_hz, abs=0.02)

    def test_case1_island_voltage(self, case1):
        tail = _tail(case1.records, 0.5)
        assert all(r.breaker == 0 for r in tail)
        voltages = [r.pcc_v_peak_v for r in tail]
        assert min(voltages) >= 326.0 * 0.98
        assert max(voltages) <= 326.0 * 1.02
        assert not any("overmod" in r.flags for r in tail)

    def test_case1_modes(self, case1):
        last = case1.records[-1]
        assert (last.pv1_mode, last.pv2_mode) == ("VCM", "VCM")

    def test_case2_closes_inside_band(self, case2):
        records = case2.records
        closes = [k for k, r in enumerate(records) if "close_breaker" in r.event_list()]
        assert len(closes) == 1
        before = records[closes[0] - 1]
        assert before.breaker == 0
        assert abs(before.phase_diff_deg) < 5.0
        assert abs(before.bess_freq_hz - 50.0) < 0.06
        assert abs(before.pcc_v_peak_v / 326.6 - 1.0) < 0.03

    def test_case2_small_inrush(self, case2):
        assert case2.report.inrush_ratio is not None
        assert case2.report.inrush_ratio < 0.2

    def test_case2_sources_return(self, case2):
        tail = _tail(case2.records, 0.5)
        assert all(r.breaker == 1 for r in tail)
        assert tail[-1].sync_status == "idle"
        p_mpp = mpp_scan().p / 1000.0
        for source in ("pv1", "pv2"):
            p = np.mean([r.power_kw(source) for r in tail])
            assert p == pytest.approx(p_mpp, rel=0.01)
        assert abs(np.mean([r.bess_p_kw for r in tail])) < 1.0


@pytest.mark.slow
def test_virtual_inertia_lowers_rocof():
    inertia = run_scenario(load_scenario("load_step_inertia")).report
    static = run_scenario(load_scenario("load_step_static")).report
    assert not (inertia.aborted or static.aborted)
    assert static.max_rocof_hz_s >= 3.0 * inertia.max_rocof_hz_s
    assert inertia.islanded_frequency_hz == pytest.approx(static.islanded_frequency_hz, abs=0.02)


@pytest.mark.slow
@pytest.mark.parametrize(
    "name", ["steady_state", "case1_island", "case2_resync", "load_step_inertia", "load_step_static"]
)
def test_fixture_telemetry_is_reproducible(name, tmp_path):
    first = write_telemetry(run_scenario(load_scenario(name)).records, tmp_path / "a.csv")
    second = write_telemetry(run_scenario(load_scenario(name)).records, tmp_path / "b.csv")
    assert first.read_bytes() == second.read_bytes()
