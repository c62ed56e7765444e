"""Synchronizace ostrova se sítí před sepnutím vypínače PCC.

Rozdíly se počítají jako ostrov − síť. Korekce (trimy) frekvence a napětí
se rozesílají všem grid-forming zdrojům s periodou 10 ms a uplatní se
o jeden krok později. K proporcionálním členům se přičítají integrály
fázového a napěťového rozdílu, takže ustálená odchylka frekvence ostrova
nezanechá trvalý fázový rozdíl.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import NamedTuple

from src.control.pll import DsogiPllState, PllOutput, dsogi_pll_step
from src.simcore.errors import ConfigurationError
from src.simcore.transforms import ThreePhaseSample, wrap_angle

logger = logging.getLogger(__name__)


class SyncPhase(str, Enum):
    IDLE = "idle"
    UNAVAILABLE = "unavailable"
    SYNCING = "syncing"
    IN_BAND = "in_band"
    GRANTED = "granted"
    RELEASING = "releasing"


@dataclass(frozen=True)
class SyncThresholds:
    max_phase_err: float = math.radians(5.0)
    max_volt_err: float = 0.02
    max_freq_err: float = 0.05
    dwell: float = 0.1

    def __post_init__(self) -> None:
        for name in ("max_phase_err", "max_volt_err", "max_freq_err", "dwell"):
            if not getattr(self, name) > 0.0:
                raise ConfigurationError(f"práh musí být kladný, je {getattr(self, name)!r}", f"synchronizer.{name}")


@dataclass(frozen=True)
class SyncGains:
    k_theta: float = 20.0
    k_f: float = 0.2
    k_v: float = 0.5
    k_theta_i: float = 20.0
    k_v_i: float = 5.0
    omega_clamp: float = math.pi
    v_clamp: float = 0.05

    def __post_init__(self) -> None:
        if min(self.k_theta, self.k_f, self.k_v, self.k_theta_i, self.k_v_i) < 0.0:
            raise ConfigurationError("zesílení synchronizace nesmí být záporná", "synchronizer.gains")
        if not (0.0 <= self.k_f < 1.0 and 0.0 <= self.k_v < 1.0):
            raise ConfigurationError(
                "k_f a k_v musí být menší než 1 (korekce se uplatní se zpožděním)", "synchronizer.gains"
            )


@dataclass(frozen=True)
class SyncStatus:
    delta_theta: float = 0.0
    delta_v: float = 0.0
    delta_f: float = 0.0
    in_band_since: float | None = None
    armed: bool = False
    available: bool = True


class PhaseEstimate(NamedTuple):
    theta: float
    omega: float
    magnitude: float
    out_of_band: bool = False

    @classmethod
    def from_pll(cls, out: PllOutput) -> "PhaseEstimate":
        return cls(out.theta_plus, out.omega_hat, out.v_plus, out.out_of_band)


def sync_error(grid: PhaseEstimate, island: PhaseEstimate, armed: bool = False) -> SyncStatus:
    """Rozdíl úhlu, napětí a frekvence ostrova vůči síti."""
    return SyncStatus(
        delta_theta=wrap_angle(island.theta - grid.theta),
        delta_v=island.magnitude - grid.magnitude,
        delta_f=(island.omega - grid.omega) / (2.0 * math.pi),
        armed=armed,
        available=not (grid.out_of_band or island.out_of_band),
    )


def sync_adjust(
    status: SyncStatus, gains: SyncGains, integral: tuple[float, float] = (0.0, 0.0)
) -> tuple[float, float]:
    """Korekce (ω_trim v rad/s, v_trim v p.u.) s omezením.

    integral nese nasčítané integrální členy (rad/s, p.u.) a odečítá se
    od proporcionální části.
    """
    omega_trim = (
        -gains.k_theta * status.delta_theta - gains.k_f * 2.0 * math.pi * status.delta_f - integral[0]
    )
    v_trim = -gains.k_v * status.delta_v - integral[1]
    omega_trim = min(max(omega_trim, -gains.omega_clamp), gains.omega_clamp)
    v_trim = min(max(v_trim, -gains.v_clamp), gains.v_clamp)
    return omega_trim, v_trim


def in_band(status: SyncStatus, thr: SyncThresholds) -> bool:
    return (
        status.available
        and abs(status.delta_theta) < thr.max_phase_err
        and abs(status.delta_v) < thr.max_volt_err
        and abs(status.delta_f) < thr.max_freq_err
    )


def check_and_close(status: SyncStatus, thr: SyncThresholds, t: float) -> tuple[bool, SyncStatus]:
    """Povolení sepnutí po nepřerušeném setrvání všech rozdílů v pásmu po dobu dwell."""
    if not status.armed or not in_band(status, thr):
        return False, replace(status, in_band_since=None)
    since = status.in_band_since if status.in_band_since is not None else t
    status = replace(status, in_band_since=since)
    return t - since >= thr.dwell - 1e-12, status


class SyncStep(NamedTuple):
    close_permission: bool
    omega_trim: float
    v_trim: float
    phase: SyncPhase


@dataclass
class Synchronizer:
    """Dozorce opětovného připojení – dvě DSOGI-PLL, korekce a povolení sepnutí."""

    dt: float
    thresholds: SyncThresholds = field(default_factory=SyncThresholds)
    gains: SyncGains = field(default_factory=SyncGains)
    rate_hz: float = 100.0
    trim_hold: float = 0.5
    trim_release: float = 1.0
    grid_pll: DsogiPllState = field(default_factory=DsogiPllState)
    island_pll: DsogiPllState = field(default_factory=DsogiPllState)
    status: SyncStatus = field(default_factory=SyncStatus)
    phase: SyncPhase = SyncPhase.IDLE
    closed_at: float | None = None
    _pending: tuple[float, float] = (0.0, 0.0)
    _held: tuple[float, float] = (0.0, 0.0)
    _integral: tuple[float, float] = (0.0, 0.0)
    _steps: int = 0

    def __post_init__(self) -> None:
        self._decimation = max(1, round(1.0 / (self.rate_hz * self.dt)))
        self._period = self._decimation * self.dt

    def request(self, t: float) -> None:
        """Zahájí synchronizaci (událost request_resync)."""
        logger.info("Požadavek na synchronizaci se sítí v čase %.3f s", t)
        self.status = replace(self.status, armed=True, in_band_since=None)
        self.phase = SyncPhase.SYNCING
        self.closed_at = None
        self._integral = (0.0, 0.0)

    def notify_closed(self, t: float) -> None:
        """Vypínač sepnut – korekce se podrží a pak rampou uvolní."""
        self.status = replace(self.status, armed=False, in_band_since=None)
        self.closed_at = t
        self._held = self._pending
        self._integral = (0.0, 0.0)
        self.phase = SyncPhase.RELEASING

    def _integrate(self, status: SyncStatus, trims: tuple[float, float]) -> None:
        """Podmíněná integrace – integrál stojí, dokud je příslušná korekce v omezení."""
        gains = self.gains
        i_omega, i_v = self._integral
        if abs(trims[0]) < gains.omega_clamp:
            i_omega += gains.k_theta_i * status.delta_theta * self._period
        if abs(trims[1]) < gains.v_clamp:
            i_v += gains.k_v_i * status.delta_v * self._period
        i_omega = min(max(i_omega, -gains.omega_clamp), gains.omega_clamp)
        i_v = min(max(i_v, -gains.v_clamp), gains.v_clamp)
        self._integral = (i_omega, i_v)

    def _release_trims(self, t: float) -> tuple[float, float]:
        elapsed = t - self.closed_at - self.trim_hold
        if elapsed <= 0.0:
            return self._held
        if self.trim_release <= 0.0 or elapsed >= self.trim_release:
            self.phase = SyncPhase.IDLE
            self.closed_at = None
            return 0.0, 0.0
        scale = 1.0 - elapsed / self.trim_release
        return self._held[0] * scale, self._held[1] * scale

    def step(self, v_grid_side: ThreePhaseSample, v_pcc: ThreePhaseSample, t: float) -> SyncStep:
        """Krok dozorce; vrací korekce platné pro tento krok (vypočtené dříve)."""
        grid = PhaseEstimate.from_pll(dsogi_pll_step(self.grid_pll, v_grid_side, self.dt))
        island = PhaseEstimate.from_pll(dsogi_pll_step(self.island_pll, v_pcc, self.dt))
        omega_trim, v_trim = self._pending
        permission = False

        if self._steps % self._decimation == 0:
            status = sync_error(grid, island, armed=self.status.armed)
            status = replace(status, in_band_since=self.status.in_band_since)
            if status.armed:
                permission, status = check_and_close(status, self.thresholds, t)
                if not status.available:
                    self.phase = SyncPhase.UNAVAILABLE
                    self._pending = (0.0, 0.0)
                else:
                    self._pending = sync_adjust(status, self.gains, self._integral)
                    self._integrate(status, self._pending)
                    self.phase = SyncPhase.IN_BAND if status.in_band_since is not None else SyncPhase.SYNCING
                if permission:
                    self.phase = SyncPhase.GRANTED
                    logger.info(
                        "Sepnutí povoleno v čase %.3f s (Δθ=%.2f°, ΔV=%.4f p.u., Δf=%.4f Hz)",
                        t,
                        math.degrees(status.delta_theta),
                        status.delta_v,
                        status.delta_f,
                    )
                elif status.in_band_since is None:
                    logger.debug(
                        "Synchronizace mimo pásmo (Δθ=%.2f°, ΔV=%.4f, Δf=%.4f)",
                        math.degrees(status.delta_theta),
                        status.delta_v,
                        status.delta_f,
                    )
            elif self.closed_at is not None:
                self._pending = self._release_trims(t)
            else:
                self._pending = (0.0, 0.0)
            self.status = status

        self._steps += 1
        return SyncStep(permission, omega_trim, v_trim, self.phase)
