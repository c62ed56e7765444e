"""Parametry elektrické sítě (vše v p.u. na bázi PerUnitBase)."""

from __future__ import annotations

import math
from dataclasses import dataclass

from src.simcore.errors import ConfigurationError


@dataclass(frozen=True)
class LcFilterParams:
    """Výstupní LC filtr střídače – reaktance/susceptance při f_base."""

    l_f: float = 0.08
    c_f: float = 0.05
    r_f: float = 0.005

    def __post_init__(self) -> None:
        for name in ("l_f", "c_f", "r_f"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ConfigurationError(f"parametr filtru musí být kladný, je {value!r}", name)

    def resonance_hz(self, f_base: float) -> float:
        return f_base / math.sqrt(self.l_f * self.c_f)

    def validate_band(self, f_base: float, dt: float) -> None:
        """Rezonance musí ležet nad 10× základní frekvencí a pod Nyquistem kroku."""
        f_res = self.resonance_hz(f_base)
        nyquist = 0.5 / dt
        if not (10.0 * f_base < f_res < nyquist):
            raise ConfigurationError(
                f"rezonance LC filtru {f_res:.0f} Hz mimo pásmo ({10 * f_base:.0f}, {nyquist:.0f}) Hz",
                "lc_filter",
            )


@dataclass(frozen=True)
class FeederParams:
    """Podélná impedance vývodu mezi kondenzátorem filtru a PCC."""

    r: float = 0.02
    x: float = 0.007

    def __post_init__(self) -> None:
        if not (self.r > 0 and self.x > 0):
            raise ConfigurationError("impedance vývodu musí být kladná", "feeder")


@dataclass(frozen=True)
class GridEquivalent:
    """Théveninův ekvivalent transformátoru 11/0.4 kV a VN sítě."""

    v_th: float = 1.0
    r_th: float = 0.01
    x_th: float = 0.05
    f_grid: float = 50.0

    def __post_init__(self) -> None:
        if math.hypot(self.r_th, self.x_th) <= 0 or self.r_th < 0 or self.x_th <= 0:
            raise ConfigurationError("impedance sítě musí být nenulová", "grid")
        if self.f_grid < 0 or not math.isfinite(self.f_grid):
            raise ConfigurationError(f"neplatná frekvence sítě {self.f_grid!r}", "grid.f_grid")

    @property
    def z_th(self) -> complex:
        return complex(self.r_th, self.x_th)


@dataclass(frozen=True)
class LoadBank:
    """Agregovaná zátěž konstantní impedance na PCC.

    r  – paralelní odpor (p.u.), odebírá 1/r při napětí 1 p.u.
    x  – volitelná paralelní indukčnost (reaktance p.u.), None = čistě činná zátěž
    """

    r: float
    x: float | None = None
    bus: str = "pcc"

    def __post_init__(self) -> None:
        if not (math.isfinite(self.r) and self.r > 0):
            raise ConfigurationError(f"odpor zátěže musí být kladný, je {self.r!r}", "load.r")
        if self.x is not None and not self.x > 0:
            raise ConfigurationError(f"reaktance zátěže musí být kladná, je {self.x!r}", "load.x")

    @classmethod
    def from_power(cls, p: float, q: float = 0.0) -> "LoadBank":
        """Zátěž odebírající p (a induktivní q) při napětí 1 p.u."""
        if not p > 0:
            raise ConfigurationError(f"činný výkon zátěže musí být kladný, je {p!r}", "load.p")
        if q < 0:
            raise ConfigurationError("kapacitní zátěž není podporována", "load.q")
        return cls(r=1.0 / p, x=(1.0 / q) if q > 0 else None)

    @property
    def p_nominal(self) -> float:
        return 1.0 / self.r

    @property
    def q_nominal(self) -> float:
        return 0.0 if self.x is None else 1.0 / self.x
