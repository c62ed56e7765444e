"""Elektrický plant – LC filtry, vývody, zátěž, Théveninův zdroj sítě a vypínač PCC.

Stavové rovnice (p.u., čas v sekundách, L = x/ω_b, C = b/ω_b), po fázích:

  L_f·di_i/dt = e − r_f·i_i − v_o          (tlumivka filtru, proud I_i)
  C_f·dv_o/dt = i_i − i_o                  (kondenzátor filtru, napětí V_o)
  L_l·di_o/dt = v_o − r_l·i_o − v_pcc      (vývod do PCC, proud I_o)
  L_th·di_g/dt = v_th − r_th·i_g − v_pcc   (síťová větev, jen při sepnutém vypínači)
  L_ld·di_ld/dt = v_pcc                    (volitelná indukčnost zátěže)
  v_pcc = R_L·(Σ i_o + i_g − i_ld)         (algebraický uzel PCC)

Diskretizace je lichoběžníková; matice se počítají jednou pro každou
kombinaci vypínače, povolení střídačů a zátěže a ukládají se do cache.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from src.network.breaker import BreakerState
from src.network.params import FeederParams, GridEquivalent, LcFilterParams, LoadBank
from src.simcore.errors import ConfigurationError, SimulationBlowUpError
from src.simcore.per_unit import PerUnitBase
from src.simcore.transforms import DqQuantity, ThreePhaseSample, dq_to_abc, wrap_angle

logger = logging.getLogger(__name__)

BLOW_UP_LIMIT = 100.0
_PHASE_SHIFTS = np.array([0.0, -2.0 * math.pi / 3.0, 2.0 * math.pi / 3.0])
_PHASES = ("a", "b", "c")


@dataclass(frozen=True)
class ModulationInput:
    """Vstup průměrovaného VSI: e = m_abc·V_dc/2."""

    m_abc: ThreePhaseSample
    v_dc: float
    enabled: bool = True


@dataclass(frozen=True)
class InverterMeasurement:
    """Snímané signály jednoho střídače."""

    i_i: ThreePhaseSample
    v_o: ThreePhaseSample
    i_o: ThreePhaseSample
    v_g: ThreePhaseSample


@dataclass(frozen=True)
class MeasurementSet:
    """Neměnný snímek měření – lze předat jinému vláknu."""

    inverters: tuple[InverterMeasurement, ...]
    v_pcc: ThreePhaseSample
    i_grid: ThreePhaseSample
    v_grid_side: ThreePhaseSample
    i_load: ThreePhaseSample
    time: float


@dataclass
class PlantState:
    """Stavový vektor plantu (řádky = stavy, sloupce = fáze a, b, c)."""

    x: np.ndarray
    v_pcc: np.ndarray
    grid_angle: float = 0.0
    time: float = 0.0
    grid_connected: bool = True


@dataclass
class PlantModel:
    """Topologie: N střídačů s LC filtrem, každý vlastním vývodem do PCC."""

    base: PerUnitBase
    names: list[str]
    filters: list[LcFilterParams]
    feeders: list[FeederParams]
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        if not (len(self.names) == len(self.filters) == len(self.feeders)):
            raise ConfigurationError("nesouhlasí počet střídačů, filtrů a vývodů", "network")

    @property
    def n_sources(self) -> int:
        return len(self.names)

    @property
    def n_states(self) -> int:
        return 3 * self.n_sources + 2

    def idx_i_i(self, k: int) -> int:
        return 3 * k

    def idx_v_o(self, k: int) -> int:
        return 3 * k + 1

    def idx_i_o(self, k: int) -> int:
        return 3 * k + 2

    @property
    def idx_i_g(self) -> int:
        return 3 * self.n_sources

    @property
    def idx_i_ld(self) -> int:
        return 3 * self.n_sources + 1

    @property
    def state_names(self) -> list[str]:
        names: list[str] = []
        for name in self.names:
            names.extend([f"{name}.i_i", f"{name}.v_o", f"{name}.i_o"])
        names.extend(["grid.i_g", "load.i_ld"])
        return names

    def zero_state(self) -> PlantState:
        return PlantState(x=np.zeros((self.n_states, 3)), v_pcc=np.zeros(3))

    def _continuous_system(
        self, closed: bool, enabled: tuple[bool, ...], loads: LoadBank, grid: GridEquivalent
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Sestaví matice A, B a vektor g (v_pcc = g·x)."""
        wb = self.base.omega_base
        n = self.n_states
        n_src = self.n_sources
        a = np.zeros((n, n))
        b = np.zeros((n, n_src + 1))
        g = np.zeros(n)

        for k in range(n_src):
            g[self.idx_i_o(k)] = loads.r
        if closed:
            g[self.idx_i_g] = loads.r
        if loads.x is not None:
            g[self.idx_i_ld] = -loads.r

        for k, (lc, feeder) in enumerate(zip(self.filters, self.feeders)):
            ii, vo, io = self.idx_i_i(k), self.idx_v_o(k), self.idx_i_o(k)
            l_f = lc.l_f / wb
            c_f = lc.c_f / wb
            l_l = feeder.x / wb
            if enabled[k]:
                a[ii, ii] = -lc.r_f / l_f
                a[ii, vo] = -1.0 / l_f
                b[ii, k] = 1.0 / l_f
                a[vo, ii] = 1.0 / c_f
            a[vo, io] = -1.0 / c_f
            a[io, vo] = 1.0 / l_l
            a[io, io] = -feeder.r / l_l
            a[io, :] -= g / l_l

        if closed:
            ig = self.idx_i_g
            l_th = grid.x_th / wb
            a[ig, ig] = -grid.r_th / l_th
            a[ig, :] -= g / l_th
            b[ig, n_src] = 1.0 / l_th

        if loads.x is not None:
            a[self.idx_i_ld, :] = g / (loads.x / wb)

        return a, b, g

    def discrete_system(
        self,
        closed: bool,
        enabled: tuple[bool, ...],
        loads: LoadBank,
        grid: GridEquivalent,
        dt: float,
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Lichoběžníková diskretizace: x⁺ = Ad·x + Bd·ū."""
        key = (closed, enabled, loads.r, loads.x, grid.r_th, grid.x_th, dt)
        cached = self._cache.get(key)
        if cached is not None:
            return cached

        a, b, g = self._continuous_system(closed, enabled, loads, grid)
        identity = np.eye(self.n_states)
        lhs = identity - 0.5 * dt * a
        ad = np.linalg.solve(lhs, identity + 0.5 * dt * a)
        bd = np.linalg.solve(lhs, dt * b)
        self._cache[key] = (ad, bd, g)
        logger.debug(
            "Diskrétní matice plantu sestaveny (vypínač=%s, povolení=%s, R_L=%.4f)",
            closed,
            enabled,
            loads.r,
        )
        return ad, bd, g


def _grid_source(grid: GridEquivalent, theta: float) -> np.ndarray:
    return grid.v_th * np.cos(theta + _PHASE_SHIFTS)


def step_plant(
    model: PlantModel,
    state: PlantState,
    modulation_inputs: Sequence[ModulationInput | None],
    breaker: BreakerState,
    loads: LoadBank,
    grid: GridEquivalent,
    dt: float,
) -> PlantState:
    """Jeden krok plantu s napětími střídačů drženými po dobu kroku."""
    n_src = model.n_sources
    if len(modulation_inputs) != n_src:
        raise ConfigurationError(
            f"očekáváno {n_src} modulačních vstupů, předáno {len(modulation_inputs)}", "network"
        )
    enabled = tuple(inp is not None and inp.enabled for inp in modulation_inputs)
    ad, bd, g = model.discrete_system(breaker.closed, enabled, loads, grid, dt)

    u = np.zeros((n_src + 1, 3))
    scale = 0.5 / model.base.v_base_phase_peak
    for k, inp in enumerate(modulation_inputs):
        if enabled[k]:
            gain = inp.v_dc * scale
            u[k, 0] = inp.m_abc.a * gain
            u[k, 1] = inp.m_abc.b * gain
            u[k, 2] = inp.m_abc.c * gain

    omega_g = 2.0 * math.pi * grid.f_grid
    theta_next = state.grid_angle + omega_g * dt
    if breaker.closed:
        u[n_src] = 0.5 * (_grid_source(grid, state.grid_angle) + _grid_source(grid, theta_next))

    x = ad @ state.x + bd @ u
    if not breaker.closed:
        x[model.idx_i_g] = 0.0
    for k in range(n_src):
        if not enabled[k]:
            x[model.idx_i_i(k)] = 0.0

    peak = np.abs(x).max(axis=1)
    if peak.max() > BLOW_UP_LIMIT or not np.all(np.isfinite(peak)):
        first = int(np.argmax((peak > BLOW_UP_LIMIT) | ~np.isfinite(peak)))
        raise SimulationBlowUpError(model.state_names[first], float(peak[first]), state.time + dt)

    return PlantState(
        x=x,
        v_pcc=g @ x,
        grid_angle=wrap_angle(theta_next),
        time=state.time + dt,
        grid_connected=breaker.closed,
    )


def _sample(row: Sequence[float]) -> ThreePhaseSample:
    return ThreePhaseSample(row[0], row[1], row[2])


def measure(model: PlantModel, state: PlantState, grid: GridEquivalent) -> MeasurementSet:
    """Čisté čtení snímaných veličin (I_i, V_o, I_o, V_g) bez změny stavu."""
    rows = state.x.tolist()
    v_pcc = _sample(state.v_pcc.tolist())
    inverters = tuple(
        InverterMeasurement(
            i_i=_sample(rows[model.idx_i_i(k)]),
            v_o=_sample(rows[model.idx_v_o(k)]),
            i_o=_sample(rows[model.idx_i_o(k)]),
            v_g=v_pcc,
        )
        for k in range(model.n_sources)
    )
    i_grid = _sample(rows[model.idx_i_g])
    if state.grid_connected:
        v_grid_side = v_pcc
    else:
        v_grid_side = _sample(_grid_source(grid, state.grid_angle).tolist())
    i_into_pcc = [
        sum(rows[model.idx_i_o(k)][p] for k in range(model.n_sources)) + rows[model.idx_i_g][p]
        for p in range(3)
    ]
    return MeasurementSet(
        inverters=inverters,
        v_pcc=v_pcc,
        i_grid=i_grid,
        v_grid_side=v_grid_side,
        i_load=_sample(i_into_pcc),
        time=state.time,
    )


@dataclass(frozen=True)
class PhasorSolution:
    """Ustálený stav při frekvenci sítě (fázory d + jq vůči úhlu sítě)."""

    v_o: tuple[complex, ...]
    i_o: tuple[complex, ...]
    i_i: tuple[complex, ...]
    v_pcc: complex
    i_g: complex
    i_ld: complex


def solve_phasor_operating_point(
    model: PlantModel,
    grid: GridEquivalent,
    loads: LoadBank,
    injections: Sequence[complex],
    enabled: Sequence[bool] | None = None,
    iterations: int = 200,
    tol: float = 1e-12,
) -> PhasorSolution:
    """Ustálený stav sítě připojené k síti při daných výkonech střídačů.

    injections – komplexní výkony S = P + jQ dodávané do vývodu (p.u.).
    Proudy vývodů I_o = conj(S / V_o) se hledají prostou iterací.
    """
    n_src = model.n_sources
    enabled = tuple(enabled) if enabled is not None else (True,) * n_src
    w = grid.f_grid / model.base.f_base
    z_th = complex(grid.r_th, grid.x_th * w)
    y_load = 1.0 / loads.r + (1.0 / complex(0.0, loads.x * w) if loads.x is not None else 0.0)
    z_lines = [complex(f.r, f.x * w) for f in model.feeders]
    b_caps = [lc.c_f * w for lc in model.filters]
    v_th = complex(grid.v_th, 0.0)

    v_o = [complex(1.0, 0.0)] * n_src
    i_o = [0j] * n_src
    v_pcc = v_th
    for _ in range(iterations):
        i_o = [
            (s / v).conjugate() if enabled[k] else -1j * b_caps[k] * v
            for k, (s, v) in enumerate(zip(injections, v_o))
        ]
        v_pcc = (v_th / z_th + sum(i_o)) / (1.0 / z_th + y_load)
        new_v_o = [v_pcc + z * i for z, i in zip(z_lines, i_o)]
        delta = max(abs(a - b) for a, b in zip(new_v_o, v_o)) if n_src else 0.0
        v_o = new_v_o
        if delta < tol:
            break

    i_i = tuple(
        (i + 1j * b * v) if enabled[k] else 0j
        for k, (i, b, v) in enumerate(zip(i_o, b_caps, v_o))
    )
    i_ld = v_pcc / complex(0.0, loads.x * w) if loads.x is not None else 0j
    return PhasorSolution(
        v_o=tuple(v_o),
        i_o=tuple(i_o),
        i_i=i_i,
        v_pcc=v_pcc,
        i_g=(v_th - v_pcc) / z_th,
        i_ld=i_ld,
    )


def _phasor_row(phasor: complex, theta: float) -> list[float]:
    return list(dq_to_abc(DqQuantity(phasor.real, phasor.imag, theta), theta).as_tuple())


def initial_state(model: PlantModel, solution: PhasorSolution, grid_angle: float = 0.0) -> PlantState:
    """Okamžité hodnoty stavů odpovídající fázorovému řešení v daném úhlu sítě."""
    x = np.zeros((model.n_states, 3))
    for k in range(model.n_sources):
        x[model.idx_i_i(k)] = _phasor_row(solution.i_i[k], grid_angle)
        x[model.idx_v_o(k)] = _phasor_row(solution.v_o[k], grid_angle)
        x[model.idx_i_o(k)] = _phasor_row(solution.i_o[k], grid_angle)
    x[model.idx_i_g] = _phasor_row(solution.i_g, grid_angle)
    x[model.idx_i_ld] = _phasor_row(solution.i_ld, grid_angle)
    v_pcc = np.array(_phasor_row(solution.v_pcc, grid_angle))
    logger.debug("Počáteční stav plantu z fázorového řešení: |V_pcc| = %.4f p.u.", abs(solution.v_pcc))
    return PlantState(x=x, v_pcc=v_pcc, grid_angle=grid_angle, time=0.0, grid_connected=True)


def phasor_magnitude(sample: ThreePhaseSample) -> float:
    """Amplituda (špička) symetrické soustavy z αβ složek."""
    alpha = (2.0 * sample.a - sample.b - sample.c) / 3.0
    beta = (sample.b - sample.c) / math.sqrt(3.0)
    return abs(complex(alpha, beta))


def phasor_angle(sample: ThreePhaseSample) -> float:
    alpha = (2.0 * sample.a - sample.b - sample.c) / 3.0
    beta = (sample.b - sample.c) / math.sqrt(3.0)
    return cmath.phase(complex(alpha, beta))
