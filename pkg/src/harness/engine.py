"""Simulační smyčka s pevným krokem.

Pořadí v každém kroku: události → plant → měření → synchronizátor (PLL sítě
a ostrova) → regulátory (FV, pak baterie) → uložení modulace pro další krok.
"""

from __future__ import annotations

import copy
import logging
import math
import time
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from src.control.controller import (
    BatteryInverterController,
    ControlContext,
    InverterController,
    PvInverterController,
)
from src.control.pll import DsogiPllState
from src.harness.metrics import DroopReference, RunReport, summarize
from src.harness.scenario import Event, Scenario
from src.harness.telemetry import TelemetryRecord
from src.network.breaker import BreakerState, set_breaker
from src.network.loads import apply_load_step
from src.network.params import LoadBank
from src.network.plant import (
    MeasurementSet,
    ModulationInput,
    PlantModel,
    PlantState,
    initial_state,
    measure,
    phasor_magnitude,
    solve_phasor_operating_point,
    step_plant,
)
from src.simcore.errors import DcLinkCollapseError, InverterTripError, SimulationBlowUpError
from src.simcore.transforms import ThreePhaseSample
from src.synchronizer.sync import SyncPhase, SyncStep, Synchronizer

logger = logging.getLogger(__name__)

RecordSink = Callable[[TelemetryRecord], None]


@dataclass
class System:
    """Sestavený systém připravený ke krokování."""

    model: PlantModel
    pv: list[PvInverterController]
    battery: BatteryInverterController
    synchronizer: Synchronizer
    state: PlantState
    breaker: BreakerState
    loads: LoadBank

    @property
    def controllers(self) -> list[InverterController]:
        return [*self.pv, self.battery]

    def controller(self, name: str) -> InverterController:
        for c in self.controllers:
            if c.name == name:
                return c
        raise KeyError(name)


@dataclass
class RunResult:
    report: RunReport
    records: list[TelemetryRecord]


def build_system(scenario: Scenario) -> System:
    """Sestaví plant a regulátory a nastaví je do fázorového ustáleného stavu."""
    base, dt = scenario.base, scenario.dt
    pv = [
        PvInverterController(u.settings, copy.deepcopy(u.pv), base, dt) for u in scenario.pv_units
    ]
    bess_unit = scenario.battery
    battery = BatteryInverterController(bess_unit.settings, bess_unit.params, base, dt, soc0=bess_unit.soc0)
    controllers: list[InverterController] = [*pv, battery]

    model = PlantModel(
        base=base,
        names=[c.name for c in controllers],
        filters=[c.settings.lc for c in controllers],
        feeders=[u.feeder for u in scenario.pv_units] + [bess_unit.feeder],
    )
    solution = solve_phasor_operating_point(
        model,
        scenario.grid,
        scenario.load,
        [c.initial_injection() for c in controllers],
        enabled=[c.en for c in controllers],
    )
    state = initial_state(model, solution)
    for k, c in enumerate(controllers):
        c.initialize(solution, k, grid_connected=True)

    v_pcc = solution.v_pcc
    theta_pcc = math.atan2(v_pcc.imag, v_pcc.real)
    omega_nom = 2.0 * math.pi * base.f_base
    sync_cfg = scenario.sync
    synchronizer = Synchronizer(
        dt=dt,
        thresholds=sync_cfg.thresholds,
        gains=sync_cfg.gains,
        rate_hz=sync_cfg.rate_hz,
        trim_hold=sync_cfg.trim_hold,
        trim_release=sync_cfg.trim_release,
        grid_pll=DsogiPllState.locked_to(abs(v_pcc), theta_pcc, omega_nom, dt),
        island_pll=DsogiPllState.locked_to(abs(v_pcc), theta_pcc, omega_nom, dt),
    )
    logger.info(
        "Počáteční stav: |V_pcc| = %.4f p.u., výkony zdrojů %s p.u.",
        abs(v_pcc),
        ", ".join(f"{c.name}={c.p_avg:.3f}" for c in controllers),
    )
    return System(
        model=model,
        pv=pv,
        battery=battery,
        synchronizer=synchronizer,
        state=state,
        breaker=BreakerState(closed=True),
        loads=scenario.load,
    )


def apply_event(system: System, event: Event, t: float) -> None:
    """Provede jednu událost scénáře (každou právě jednou)."""
    logger.info("Událost %s v čase %.4f s", event.describe(), t)
    if event.kind == "open_breaker":
        system.breaker = set_breaker(system.breaker, False, t)
    elif event.kind == "request_resync":
        system.synchronizer.request(t)
    elif event.kind == "load_step":
        system.loads = apply_load_step(system.loads, float(event.value), t)
    elif event.kind == "irradiance_step":
        controller = system.controller(event.target)
        if not isinstance(controller, PvInverterController):
            raise TypeError(f"{event.target} není FV zdroj")
        controller.set_irradiance(float(event.value), t)
    elif event.kind == "set_enable":
        system.controller(event.target).set_enable(bool(event.value), t)
    elif event.kind == "set_p_ref":
        system.controller(event.target).set_p_ref(float(event.value), t)


def _noisy(sample: ThreePhaseSample, rng: np.random.Generator, std: float) -> ThreePhaseSample:
    a, b, c = np.asarray(sample.as_tuple()) + rng.normal(0.0, std, 3)
    return ThreePhaseSample(float(a), float(b), float(c))


def add_sensor_noise(meas: MeasurementSet, rng: np.random.Generator, std: float) -> MeasurementSet:
    """Přičte gaussovský šum ke všem snímaným signálům."""
    v_pcc = _noisy(meas.v_pcc, rng, std)
    inverters = tuple(
        replace(
            m,
            i_i=_noisy(m.i_i, rng, std),
            v_o=_noisy(m.v_o, rng, std),
            i_o=_noisy(m.i_o, rng, std),
            v_g=v_pcc,
        )
        for m in meas.inverters
    )
    v_grid_side = v_pcc if meas.v_grid_side is meas.v_pcc else _noisy(meas.v_grid_side, rng, std)
    return replace(meas, inverters=inverters, v_pcc=v_pcc, v_grid_side=v_grid_side)


def build_record(
    system: System,
    meas: MeasurementSet,
    sync_phase: SyncPhase,
    flags: set[str],
    events: list[str],
) -> TelemetryRecord:
    base = system.model.base
    kw = base.s_base / 1000.0
    pv1, pv2 = system.pv
    bess = system.battery
    bess_index = len(system.pv)
    return TelemetryRecord(
        t=meas.time,
        pv1_p_kw=pv1.p_avg * kw,
        pv1_q_kvar=pv1.q_avg * kw,
        pv1_freq_hz=pv1.frequency_hz,
        pv1_mode=pv1.mode.mode.value,
        pv1_v_dc_v=pv1.v_dc,
        pv2_p_kw=pv2.p_avg * kw,
        pv2_q_kvar=pv2.q_avg * kw,
        pv2_freq_hz=pv2.frequency_hz,
        pv2_mode=pv2.mode.mode.value,
        pv2_v_dc_v=pv2.v_dc,
        bess_p_kw=bess.p_avg * kw,
        bess_q_kvar=bess.q_avg * kw,
        bess_freq_hz=bess.frequency_hz,
        bess_soc=bess.battery.soc,
        pcc_v_peak_v=phasor_magnitude(meas.v_pcc) * base.v_base_phase_peak,
        bess_v_peak_v=phasor_magnitude(meas.inverters[bess_index].v_o) * base.v_base_phase_peak,
        phase_diff_deg=math.degrees(system.synchronizer.status.delta_theta),
        breaker=int(system.breaker.closed),
        sync_status=sync_phase.value,
        grid_current_peak_a=phasor_magnitude(meas.i_grid) * base.i_base,
        load_current_peak_a=phasor_magnitude(meas.i_load) * base.i_base,
        flags="|".join(sorted(flags)),
        events=";".join(events),
    )


def run_scenario(scenario: Scenario, on_record: RecordSink | None = None) -> RunResult:
    """Deterministický běh scénáře; vrací report a všechny záznamy telemetrie."""
    scenario.validate()
    started = time.perf_counter()
    system = build_system(scenario)
    model, grid, dt = system.model, scenario.grid, scenario.dt
    rng = np.random.default_rng(scenario.seed) if scenario.sensor_noise_std > 0.0 else None
    decimation = scenario.telemetry_decimation
    records: list[TelemetryRecord] = []
    pending_events: list[str] = []
    pending_flags: set[str] = set()

    def emit(meas: MeasurementSet, phase: SyncPhase) -> None:
        # předchozí záznam je hotový, poslední se předá až na konci
        if on_record is not None and records:
            on_record(records[-1])
        records.append(build_record(system, meas, phase, pending_flags, pending_events))
        pending_events.clear()
        pending_flags.clear()

    def control(meas: MeasurementSet, sync_out: SyncStep) -> list[ModulationInput]:
        ctx = ControlContext(meas.time, system.breaker.closed, sync_out.omega_trim, sync_out.v_trim)
        inputs = []
        for k, c in enumerate(system.controllers):
            inputs.append(c.step(meas.inverters[k], ctx))
            pending_flags.update(f"{c.name}:{f}" for f in c.flags)
        return inputs

    logger.info("Spouštím scénář %s (%.2f s, krok %g s)", scenario.name, scenario.duration, dt)
    meas = measure(model, system.state, grid)
    aborted = False
    phase = SyncPhase.IDLE
    event_index = 0
    events = scenario.events
    try:
        sync_out = system.synchronizer.step(meas.v_grid_side, meas.v_pcc, 0.0)
        inputs = control(meas, sync_out)
        emit(meas, sync_out.phase)
        for n in range(scenario.n_steps):
            t = n * dt
            while event_index < len(events) and events[event_index].time <= t + 0.5 * dt:
                apply_event(system, events[event_index], t)
                pending_events.append(events[event_index].kind)
                event_index += 1

            system.state = step_plant(model, system.state, inputs, system.breaker, system.loads, grid, dt)
            t_next = (n + 1) * dt
            meas = measure(model, system.state, grid)
            meas = replace(meas, time=t_next)
            if rng is not None:
                meas = add_sensor_noise(meas, rng, scenario.sensor_noise_std)

            sync_out = system.synchronizer.step(meas.v_grid_side, meas.v_pcc, t_next)
            phase = sync_out.phase
            inputs = control(meas, sync_out)
            if sync_out.close_permission and not system.breaker.closed:
                system.breaker = set_breaker(system.breaker, True, t_next)
                system.synchronizer.notify_closed(t_next)
                pending_events.append("close_breaker")

            if (n + 1) % decimation == 0:
                emit(meas, phase)
    except (SimulationBlowUpError, DcLinkCollapseError, InverterTripError) as e:
        logger.error("Běh scénáře %s přerušen: %s", scenario.name, e)
        aborted = True
        pending_events.append("abort")
        if records and records[-1].t >= meas.time:
            merged = ";".join(filter(None, [records[-1].events, *pending_events]))
            records[-1] = replace(records[-1], events=merged)
        else:
            emit(meas, phase)
    if on_record is not None and records:
        on_record(records[-1])

    droop = DroopReference(
        k_w={c.name: c.vsg.k_w for c in system.controllers},
        p_ref={c.name: c.vsg.p_ref for c in system.controllers},
        s_base_kw=scenario.base.s_base / 1000.0,
        f_nom=scenario.base.f_base,
    )
    report = summarize(records, warmup=scenario.warmup, scenario=scenario.name, droop=droop)
    report.aborted = aborted
    logger.info(
        "Scénář %s %s za %.1f s (%d záznamů)",
        scenario.name,
        "přerušen" if aborted else "dokončen",
        time.perf_counter() - started,
        len(records),
    )
    return RunResult(report=report, records=records)
