"""Elektrický model FV pole – explicitní aproximace jednodiodového modelu.

I(V) = I_ph · (1 − C1·(exp(V / (C2·V_oc)) − 1)),   C1 = 1 / (exp(1/C2) − 1)

I_ph roste lineárně s ozářením a teplotním koeficientem proudu, V_oc klesá
s teplotou. C2 (tvarový parametr) se dopočítá tak, aby křivka prošla bodem
(v_mp, i_mp); I(0) = i_sc a I(v_oc) = 0 platí přesně.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from src.simcore.errors import ConfigurationError

logger = logging.getLogger(__name__)

STC_IRRADIANCE = 1000.0
STC_TEMPERATURE = 25.0


@dataclass(frozen=True)
class PvArrayParams:
    """Katalogové body FV pole při STC (1000 W/m², 25 °C)."""

    i_sc: float = 40.9
    v_oc: float = 700.0
    v_mp: float = 580.0
    i_mp: float = 22000.0 / 580.0
    alpha_isc: float = 0.0005
    beta_voc: float = -0.003
    shape: float | None = None

    def __post_init__(self) -> None:
        if not 0.0 < self.v_mp < self.v_oc:
            raise ConfigurationError(
                f"musí platit 0 < v_mp < v_oc (v_mp={self.v_mp}, v_oc={self.v_oc})", "pv.array.v_mp"
            )
        if not 0.0 < self.i_mp < self.i_sc:
            raise ConfigurationError(
                f"musí platit 0 < i_mp < i_sc (i_mp={self.i_mp}, i_sc={self.i_sc})", "pv.array.i_mp"
            )
        if self.shape is None:
            object.__setattr__(self, "shape", fit_shape_parameter(self))
        elif not self.shape > 0.0:
            raise ConfigurationError(f"tvarový parametr musí být kladný, je {self.shape!r}", "pv.array.shape")

    @property
    def p_mp(self) -> float:
        return self.v_mp * self.i_mp


def _shape_residual(c2: float, ratio_v: float, ratio_i: float) -> float:
    return 1.0 - math.expm1(ratio_v / c2) / math.expm1(1.0 / c2) - ratio_i


def fit_shape_parameter(params: PvArrayParams) -> float:
    """Najde C2, pro které křivka prochází bodem maximálního výkonu."""
    ratio_v = params.v_mp / params.v_oc
    ratio_i = params.i_mp / params.i_sc
    if ratio_v + ratio_i <= 1.0:
        raise ConfigurationError(
            "body (v_mp, i_mp) nelze proložit explicitním modelem", "pv.array"
        )
    c2 = brentq(_shape_residual, 0.01, 10.0, args=(ratio_v, ratio_i), xtol=1e-14)
    logger.debug("Tvarový parametr FV pole C2 = %.6f", c2)
    return float(c2)


def _photocurrent(params: PvArrayParams, irradiance: float, temperature: float) -> float:
    if irradiance <= 0.0:
        return 0.0
    return params.i_sc * (irradiance / STC_IRRADIANCE) * (1.0 + params.alpha_isc * (temperature - STC_TEMPERATURE))


def open_circuit_voltage(params: PvArrayParams, temperature: float = STC_TEMPERATURE) -> float:
    return params.v_oc * (1.0 + params.beta_voc * (temperature - STC_TEMPERATURE))


def pv_current(
    v_dc: float,
    irradiance: float = STC_IRRADIANCE,
    temperature: float = STC_TEMPERATURE,
    params: PvArrayParams | None = None,
) -> float:
    """Proud pole při napětí v_dc (A); nad V_oc je nulový (blokovací dioda)."""
    params = params or default_array()
    if v_dc < 0.0:
        raise ConfigurationError(f"napětí FV pole nesmí být záporné, je {v_dc!r}", "pv.v_dc")
    v_oc = open_circuit_voltage(params, temperature)
    if v_dc >= v_oc:
        return 0.0
    c2 = params.shape
    c1 = 1.0 / math.expm1(1.0 / c2)
    return _photocurrent(params, irradiance, temperature) * (1.0 - c1 * math.expm1(v_dc / (c2 * v_oc)))


def pv_curve(
    voltages: Sequence[float] | np.ndarray,
    irradiance: float = STC_IRRADIANCE,
    temperature: float = STC_TEMPERATURE,
    params: PvArrayParams | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Vektorová I-V a P-V křivka pro zadaná napětí."""
    params = params or default_array()
    v = np.asarray(voltages, dtype=float)
    if np.any(v < 0.0):
        raise ConfigurationError("napětí FV pole nesmí být záporné", "pv.v_dc")
    v_oc = open_circuit_voltage(params, temperature)
    c2 = params.shape
    c1 = 1.0 / math.expm1(1.0 / c2)
    i = _photocurrent(params, irradiance, temperature) * (1.0 - c1 * np.expm1(np.minimum(v, v_oc) / (c2 * v_oc)))
    i = np.where(v >= v_oc, 0.0, i)
    return i, v * i


@dataclass(frozen=True)
class PvOperatingPoint:
    v_dc: float
    i_dc: float
    p: float
    irradiance: float
    temperature: float


def mpp_scan(
    irradiance: float = STC_IRRADIANCE,
    temperature: float = STC_TEMPERATURE,
    params: PvArrayParams | None = None,
    points: int = 20001,
) -> PvOperatingPoint:
    """Bod maximálního výkonu nalezený hrubou silou na jemné mřížce napětí."""
    params = params or default_array()
    v = np.linspace(0.0, open_circuit_voltage(params, temperature), points)
    i, p = pv_curve(v, irradiance, temperature, params)
    k = int(np.argmax(p))
    return PvOperatingPoint(float(v[k]), float(i[k]), float(p[k]), irradiance, temperature)


@dataclass
class EnvironmentProfile:
    """Časová řada (čas, hodnota) s lineární interpolací a skokovými změnami."""

    times: list[float] = field(default_factory=lambda: [0.0])
    values: list[float] = field(default_factory=lambda: [STC_IRRADIANCE])

    def __post_init__(self) -> None:
        if len(self.times) != len(self.values) or not self.times:
            raise ConfigurationError("časová řada musí mít stejný počet časů a hodnot", "pv.profile")
        if any(b < a for a, b in zip(self.times, self.times[1:])):
            raise ConfigurationError("časy řady musí být neklesající", "pv.profile")

    def value_at(self, t: float) -> float:
        return float(np.interp(t, self.times, self.values))

    def step_to(self, t: float, value: float) -> None:
        """Skoková změna na value od času t (nahradí pozdější body)."""
        before = math.nextafter(t, -math.inf)
        keep = [k for k, tk in enumerate(self.times) if tk < before]
        current = self.value_at(before)
        self.times = [self.times[k] for k in keep] + [before, t]
        self.values = [self.values[k] for k in keep] + [current, value]


@lru_cache(maxsize=1)
def default_array() -> PvArrayParams:
    """Výchozí pole 22 kW (parametr C2 se fituje jen jednou)."""
    return PvArrayParams()
