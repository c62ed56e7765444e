"""Řídicí struktura střídačů – společná báze a varianty FV a baterie.

Každý krok: PLL na napětí PCC → volba režimu (s beznárazovým přepnutím) →
výpočet reference proudu (CCM: výkonová smyčka, VCM: VSG + virtuální
admitance) → SRF smyčky → modulace.
"""

from __future__ import annotations

import cmath
import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field, replace

from src.control.admittance import VirtualAdmittanceState, virtual_admittance_step
from src.control.ccm import CcmState, ccm_power_loop
from src.control.modes import ControlMode, Mode, select_mode
from src.control.modulation import ZERO_MODULATION, modulation, voltage_to_modulation
from src.control.pll import DsogiPllState, PllOutput, dsogi_pll_step
from src.control.srf import SrfLoopState, srf_current_step, srf_voltage_step
from src.control.vsg import PowerAverager, VsgParams, compute_avg_powers, freq_ref_step, volt_ref
from src.network.params import LcFilterParams
from src.network.plant import InverterMeasurement, ModulationInput, PhasorSolution
from src.pv.array import (
    EnvironmentProfile,
    PvArrayParams,
    default_array,
    mpp_scan,
    open_circuit_voltage,
    pv_current,
)
from src.pv.dc_link import dc_link_step
from src.pv.mppt import MPPT_RATE_HZ, MpptState, mppt_step, restart_mppt
from src.simcore.errors import DcLinkCollapseError
from src.simcore.filters import FirstOrderLagState, lag_step
from src.simcore.per_unit import PerUnitBase
from src.simcore.transforms import DqQuantity, abc_to_dq, rotate_dq, wrap_angle
from src.storage.battery import BatteryParams, BatteryState, battery_step
from src.storage.droop import SocPowerLimiter, bess_droop_step

logger = logging.getLogger(__name__)

# měření frekvence v CCM – odhad PLL vyhlazený přes několik period
FREQUENCY_METER_T = 0.05


@dataclass(frozen=True)
class InverterSettings:
    """Parametry jednoho střídače (výkony ve W, ostatní v p.u.)."""

    name: str
    lc: LcFilterParams = field(default_factory=LcFilterParams)
    vsg: VsgParams = field(default_factory=VsgParams)
    r_v: float = 0.05
    x_v: float = 0.25
    s_rated: float = 25000.0
    current_limit_factor: float = 1.2
    v_bus: float = 800.0
    enabled: bool = True


@dataclass(frozen=True)
class ControlContext:
    """Vstupy sdílené všemi regulátory v jednom kroku."""

    t: float
    grid_connected: bool
    omega_trim: float = 0.0
    v_trim: float = 0.0


def _in_frame(phasor: complex, theta: float) -> complex:
    """Fázor vůči úhlu sítě 0 převedený do rámce s úhlem theta."""
    return phasor * cmath.exp(-1j * theta)


class InverterController(ABC):
    """Společný základ – PLL, průměrování výkonu, VCM cesta a vnitřní smyčky."""

    def __init__(self, settings: InverterSettings, base: PerUnitBase, dt: float):
        self.settings = settings
        self.name = settings.name
        self.base = base
        self.dt = dt
        self.logger = logging.getLogger(f"{self.__class__.__name__}.{settings.name}")
        self.vsg = settings.vsg
        self.en = settings.enabled
        self.current_limit = settings.current_limit_factor * settings.s_rated / base.s_base

        self.pll = DsogiPllState(omega_nom=self.vsg.omega_nom)
        self.averager = PowerAverager()
        self.freq_lag = FirstOrderLagState(t_const=self.vsg.t_w)
        self.freq_meter = FirstOrderLagState(t_const=FREQUENCY_METER_T)
        self.freq_meter.reset(self.vsg.omega_nom)
        self.admittance = VirtualAdmittanceState(
            r_v=settings.r_v, x_v=settings.x_v, omega_base=base.omega_base, limit=self.current_limit
        )
        self.srf = SrfLoopState(current_limit=self.current_limit)
        self.ccm = CcmState()
        self.mode = ControlMode(Mode.OFF, 0.0)

        self.theta = 0.0
        self.frequency = self.vsg.omega_nom
        self.v_ref = self.vsg.v_nom
        self.flags: set[str] = set()
        self._warned: set[str] = set()
        self._e_dq = (0.0, 0.0)
        self._i_i_dq = (0.0, 0.0)

    # --- veřejné rozhraní -------------------------------------------------

    @property
    def p_avg(self) -> float:
        return self.averager.p_avg

    @property
    def q_avg(self) -> float:
        return self.averager.q_avg

    @property
    def frequency_hz(self) -> float:
        return self.frequency / (2.0 * math.pi)

    @property
    def bridge_power(self) -> float:
        """Výkon mostu e·i_i (p.u.) v posledním kroku."""
        if self.mode.mode == Mode.OFF:
            return 0.0
        return self._e_dq[0] * self._i_i_dq[0] + self._e_dq[1] * self._i_i_dq[1]

    def set_enable(self, en: bool, t: float) -> None:
        self.logger.info("EN = %d v čase %.3f s", int(en), t)
        self.en = en

    def set_p_ref(self, value: float, t: float) -> None:
        self.logger.info("P_ref = %.3f p.u. v čase %.3f s", value, t)
        self.vsg = replace(self.vsg, p_ref=value)

    def initial_injection(self) -> complex:
        """Komplexní výkon střídače pro fázorovou inicializaci."""
        return 0j

    def initialize(self, solution: PhasorSolution, index: int, grid_connected: bool = True) -> None:
        """Nastaví všechny stavy na ustálený stav fázorového řešení."""
        v_g = solution.v_pcc
        v_o, i_o, i_i = solution.v_o[index], solution.i_o[index], solution.i_i[index]
        theta_pll = cmath.phase(v_g)
        self.pll = DsogiPllState.locked_to(abs(v_g), theta_pll, self.vsg.omega_nom, self.dt)
        s = v_o * i_o.conjugate()
        self.averager.reset(s.real, s.imag)
        self.mode = self._select_mode(ControlContext(0.0, grid_connected), ControlMode(Mode.OFF, 0.0))

        if self.mode.mode == Mode.CCM:
            self.theta = theta_pll
            self.freq_meter.reset(self.vsg.omega_nom)
        elif self.mode.mode == Mode.VCM:
            e = v_o + complex(self.settings.r_v, self.settings.x_v) * i_o
            self.theta = cmath.phase(e)
            self.freq_lag.reset(self.vsg.k_w * (s.real - self.vsg.p_ref))
            self.v_ref = volt_ref(self.vsg, s.imag)
            v_f = _in_frame(v_o, self.theta)
            i_f = _in_frame(i_o, self.theta)
            self.admittance.preload(i_f.real, i_f.imag, self.v_ref - v_f.real, -v_f.imag)
        else:
            return

        i_o_f = _in_frame(i_o, self.theta)
        i_i_f = _in_frame(i_i, self.theta)
        self.ccm.i_d, self.ccm.i_q = i_o_f.real, i_o_f.imag
        # ustálený úbytek na r_f nese integrátor proudové smyčky
        self.srf.current_d.preload(self.settings.lc.r_f * i_i_f.real)
        self.srf.current_q.preload(self.settings.lc.r_f * i_i_f.imag)
        self._i_i_dq = (i_i_f.real, i_i_f.imag)

    def step(self, meas: InverterMeasurement, ctx: ControlContext) -> ModulationInput:
        """Jeden krok regulace pro měření v čase ctx.t."""
        self.flags = set()
        pll_out = dsogi_pll_step(self.pll, meas.v_g, self.dt)
        if pll_out.out_of_band:
            self._flag("pll_oob", "PLL mimo pásmo")

        wanted = self._select_mode(ctx, self.mode)
        if wanted.mode != self.mode.mode:
            self._transfer(self.mode.mode, wanted.mode, meas, pll_out)
            self.mode = wanted

        if self.mode.mode == Mode.CCM:
            out = self._ccm_step(meas, ctx, pll_out)
        elif self.mode.mode == Mode.VCM:
            out = self._vcm_step(meas, ctx)
        else:
            self.frequency = pll_out.omega_hat
            self._e_dq = (0.0, 0.0)
            out = ModulationInput(ZERO_MODULATION, self.settings.v_bus, False)
        self._after_step(ctx)
        return out

    # --- pro potomky -------------------------------------------------------

    def _select_mode(self, ctx: ControlContext, current: ControlMode) -> ControlMode:
        return select_mode(ctx.grid_connected, self.en, current, ctx.t)

    @abstractmethod
    def _references(self, p_avg: float, q_avg: float, ctx: ControlContext) -> tuple[float, float]:
        """Frekvenční (rad/s) a napěťová (p.u.) reference režimu VCM."""
        ...

    def _power_target(self, ctx: ControlContext) -> float:
        """Žádaný činný výkon v CCM (p.u.)."""
        return self.vsg.p_ref

    def _on_enter_ccm(self) -> None:
        pass

    def _after_step(self, ctx: ControlContext) -> None:
        pass

    # --- vnitřní ------------------------------------------------------------

    def _flag(self, name: str, message: str) -> None:
        self.flags.add(name)
        if name not in self._warned:
            self._warned.add(name)
            self.logger.warning("%s (%s)", message, self.name)

    def _frame(self, meas: InverterMeasurement, theta: float) -> tuple[DqQuantity, DqQuantity, DqQuantity]:
        return abc_to_dq(meas.v_o, theta), abc_to_dq(meas.i_o, theta), abc_to_dq(meas.i_i, theta)

    def _transfer(self, old: Mode, new: Mode, meas: InverterMeasurement, pll_out: PllOutput) -> None:
        theta_pll = pll_out.theta_plus
        if new == Mode.OFF:
            self.srf.reset()
            self.admittance.preload(0.0, 0.0, 0.0, 0.0)
            self.ccm = CcmState()
            return
        if old == Mode.OFF:
            self.srf.reset()
            self.theta = theta_pll
            self.freq_lag.reset(1.0 - pll_out.omega_hat / self.vsg.omega_nom)
            if new == Mode.VCM:
                self.admittance.preload(0.0, 0.0, 0.0, 0.0)
            else:
                self.freq_meter.reset(pll_out.omega_hat)
                self._on_enter_ccm()
            return

        if new == Mode.VCM:
            v_o = abc_to_dq(meas.v_o, theta_pll)
            i_o = abc_to_dq(meas.i_o, theta_pll)
            r_v, x_v = self.settings.r_v, self.settings.x_v
            e_d = v_o.d + r_v * i_o.d - x_v * i_o.q
            e_q = v_o.q + r_v * i_o.q + x_v * i_o.d
            delta = math.atan2(e_q, e_d)
            self.theta = wrap_angle(theta_pll + delta)
            i_d, i_q = rotate_dq(i_o.d, i_o.q, delta)
            v_d, v_q = rotate_dq(v_o.d, v_o.q, delta)
            self.admittance.preload(i_d, i_q, math.hypot(e_d, e_q) - v_d, -v_q)
            self.srf.rotate(delta)
            self.freq_lag.reset(1.0 - pll_out.omega_hat / self.vsg.omega_nom)
        else:
            delta = wrap_angle(theta_pll - self.theta)
            self.srf.rotate(delta)
            i_o = abc_to_dq(meas.i_o, theta_pll)
            self.ccm.i_d, self.ccm.i_q = i_o.d, i_o.q
            self.theta = theta_pll
            self.freq_meter.reset(self.frequency)
            self._on_enter_ccm()

    def _inner_loops(
        self,
        i_o_ref: tuple[float, float],
        v_o: DqQuantity,
        i_o: DqQuantity,
        i_i: DqQuantity,
        theta: float,
        omega: float,
    ) -> ModulationInput:
        lc = self.settings.lc
        omega_pu = omega / self.base.omega_base
        i_i_ref = srf_voltage_step(i_o_ref, i_o, v_o, self.srf, omega_pu, self.dt, lc.c_f)
        if self.srf.limited:
            self._flag("i_limit", "Reference proudu v omezení")
        e_d, e_q = srf_current_step(i_i_ref, i_i, v_o, self.srf, omega_pu, self.dt, lc.l_f)
        self._e_dq = (e_d, e_q)
        self._i_i_dq = (i_i.d, i_i.q)
        m_dq = voltage_to_modulation(e_d, e_q, self.settings.v_bus, self.base)
        out = modulation(m_dq, theta + 0.5 * omega * self.dt, self.settings.v_bus, self.en, self.name)
        if out.overmodulated:
            self._flag("overmod", "Přemodulování")
        return ModulationInput(out.m_abc, self.settings.v_bus, self.en)

    def _vcm_step(self, meas: InverterMeasurement, ctx: ControlContext) -> ModulationInput:
        theta = self.theta
        v_o, i_o, i_i = self._frame(meas, theta)
        p_avg, q_avg = compute_avg_powers(v_o, i_o, self.averager, self.dt)
        omega_ref, v_ref = self._references(p_avg, q_avg, ctx)
        i_o_ref = virtual_admittance_step((v_ref, 0.0), (v_o.d, v_o.q), self.admittance, self.dt, omega_ref)
        if self.admittance.saturated:
            self._flag("adm_sat", "Virtuální admitance v omezení")
        out = self._inner_loops(i_o_ref, v_o, i_o, i_i, theta, omega_ref)
        self.theta = wrap_angle(theta + omega_ref * self.dt)
        self.frequency = omega_ref
        self.v_ref = v_ref
        return out

    def _ccm_step(self, meas: InverterMeasurement, ctx: ControlContext, pll_out: PllOutput) -> ModulationInput:
        theta = pll_out.theta_plus
        omega = pll_out.omega_hat
        v_o, i_o, i_i = self._frame(meas, theta)
        compute_avg_powers(v_o, i_o, self.averager, self.dt)
        i_o_ref = ccm_power_loop(self._power_target(ctx), self.vsg.q_ref, v_o, self.ccm, self.current_limit)
        if self.ccm.ride_through:
            self._flag("ride_through", "Pokles napětí, reference zmrazeny")
        out = self._inner_loops(i_o_ref, v_o, i_o, i_i, theta, omega)
        self.theta = wrap_angle(theta + omega * self.dt)
        self.frequency = lag_step(self.freq_meter, omega, self.dt)
        return out


@dataclass
class PvSettings:
    """DC strana FV zdroje."""

    array: PvArrayParams = field(default_factory=default_array)
    c_dc: float = 0.01
    kp_dc: float = 290.0
    mppt_step: float = 2.0
    irradiance: EnvironmentProfile = field(default_factory=EnvironmentProfile)
    temperature: EnvironmentProfile = field(default_factory=lambda: EnvironmentProfile([0.0], [25.0]))


class PvInverterController(InverterController):
    """FV střídač – CCM s MPPT při připojení, VSG (VCM) v ostrově."""

    def __init__(self, settings: InverterSettings, pv: PvSettings, base: PerUnitBase, dt: float):
        super().__init__(settings, base, dt)
        self.pv = pv
        g0, t0 = pv.irradiance.value_at(0.0), pv.temperature.value_at(0.0)
        mpp = mpp_scan(g0, t0, pv.array)
        self.v_dc = mpp.v_dc
        self.i_pv = mpp.i_dc
        self.mppt = MpptState.for_array(open_circuit_voltage(pv.array, t0), mpp.v_dc, pv.mppt_step)
        # reference DC napětí sleduje krok MPPT rampou, která skončí před dalším krokem
        self.v_dc_ref = mpp.v_dc
        self._v_ref_slew = pv.mppt_step * MPPT_RATE_HZ
        self._mppt_decimation = max(1, round(1.0 / (MPPT_RATE_HZ * dt)))
        self._steps = 0

    @property
    def p_pv(self) -> float:
        """Výkon pole (W)."""
        return self.v_dc * self.i_pv

    def set_irradiance(self, value: float, t: float) -> None:
        self.logger.info("Ozáření %.0f W/m² od %.3f s", value, t)
        self.pv.irradiance.step_to(t, value)

    def initial_injection(self) -> complex:
        if not self.en:
            return 0j
        return complex(self.p_pv / self.base.s_base, -self.vsg.q_ref)

    def _references(self, p_avg: float, q_avg: float, ctx: ControlContext) -> tuple[float, float]:
        omega_ref = freq_ref_step(self.vsg, self.freq_lag, p_avg, self.dt, ctx.omega_trim)
        return omega_ref, volt_ref(self.vsg, q_avg, ctx.v_trim)

    def _power_target(self, ctx: ControlContext) -> float:
        p_w = self.p_pv + self.pv.kp_dc * (self.v_dc - self.v_dc_ref)
        return p_w / self.base.s_base

    def _on_enter_ccm(self) -> None:
        self.mppt = restart_mppt(self.mppt, self.v_dc)
        self.v_dc_ref = self.mppt.v_ref

    def step(self, meas: InverterMeasurement, ctx: ControlContext) -> ModulationInput:
        g = self.pv.irradiance.value_at(ctx.t)
        temp = self.pv.temperature.value_at(ctx.t)
        self.i_pv = pv_current(self.v_dc, g, temp, self.pv.array)
        return super().step(meas, ctx)

    def _after_step(self, ctx: ControlContext) -> None:
        i_inv = self.bridge_power * self.base.s_base / self.v_dc if self.v_dc > 0.0 else 0.0
        update = dc_link_step(self.v_dc, self.i_pv, i_inv, self.pv.c_dc, self.dt)
        if update.collapsed:
            self.logger.error("DC meziobvod %s se zhroutil v čase %.4f s", self.name, ctx.t)
            raise DcLinkCollapseError(self.name, ctx.t)
        self.v_dc = update.v_dc

        if self.mode.mode == Mode.CCM and self._steps % self._mppt_decimation == 0:
            previous = self.mppt.direction
            self.mppt = mppt_step(self.mppt, self.p_pv, self.v_dc)
            if self.mppt.direction != previous:
                self.logger.debug("MPPT obrací směr u %.1f V", self.mppt.v_ref)
        if self.mode.mode == Mode.CCM:
            max_change = self._v_ref_slew * self.dt
            change = min(max(self.mppt.v_ref - self.v_dc_ref, -max_change), max_change)
            self.v_dc_ref += change
        self._steps += 1


class BatteryInverterController(InverterController):
    """Bateriový střídač – vždy grid-forming se statickým droopem."""

    def __init__(
        self,
        settings: InverterSettings,
        battery: BatteryParams,
        base: PerUnitBase,
        dt: float,
        soc0: float = 0.8,
    ):
        super().__init__(settings, base, dt)
        self.battery_params = battery
        self.battery = BatteryState(soc=soc0)
        self.limiter = SocPowerLimiter()
        self._p_rate_pu = battery.p_rate / base.s_base

    def initial_injection(self) -> complex:
        return 0j

    def _select_mode(self, ctx: ControlContext, current: ControlMode) -> ControlMode:
        # síťový stav nemění režim baterie
        return select_mode(False, self.en, current, ctx.t)

    def _references(self, p_avg: float, q_avg: float, ctx: ControlContext) -> tuple[float, float]:
        offset = self.limiter.step(p_avg, self.battery.soc, self.battery_params, self._p_rate_pu, self.dt)
        return bess_droop_step(self.vsg, p_avg, q_avg, ctx.omega_trim, ctx.v_trim, offset)

    def _after_step(self, ctx: ControlContext) -> None:
        self.battery = battery_step(self.battery, self.bridge_power * self.base.s_base, self.dt, self.battery_params)
        if self.battery.at_limit:
            self._flag("soc_limit", "Baterie na mezi SoC")
        if self.battery.rate_limited:
            self._flag("p_limit", "Výkon baterie omezen na jmenovitý")
