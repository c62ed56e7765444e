"""Poměrné jednotky (p.u.) pro NN síť 400 V.

Báze:
  s_base      – zdánlivý výkon (VA)
  v_base_ll   – sdružené efektivní napětí (V)
  f_base      – frekvence (Hz)
Odvozené báze používají amplitudově invariantní konvenci (špičkové fázové
hodnoty), takže 1 p.u. napětí = 400·√2/√3 = 326.6 V.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from src.simcore.errors import ConfigurationError

QUANTITY_KINDS = (
    "voltage",
    "current",
    "power",
    "frequency",
    "angular_frequency",
    "impedance",
)


@dataclass(frozen=True)
class PerUnitBase:
    """Sada bázových hodnot."""

    s_base: float = 50_000.0
    v_base_ll: float = 400.0
    f_base: float = 50.0

    def __post_init__(self) -> None:
        for name in ("s_base", "v_base_ll", "f_base"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ConfigurationError(f"báze musí být kladná, je {value!r}", name)

    @property
    def omega_base(self) -> float:
        return 2.0 * math.pi * self.f_base

    @property
    def v_base_phase_peak(self) -> float:
        return self.v_base_ll * math.sqrt(2.0) / math.sqrt(3.0)

    @property
    def i_base(self) -> float:
        """Špičkový fázový proud – s_base = 1.5·V_peak·I_peak."""
        return self.s_base / (1.5 * self.v_base_phase_peak)

    @property
    def z_base(self) -> float:
        return self.v_base_ll ** 2 / self.s_base

    def base_of(self, kind: str) -> float:
        """Vrátí bázi pro daný druh veličiny."""
        bases = {
            "voltage": self.v_base_phase_peak,
            "current": self.i_base,
            "power": self.s_base,
            "frequency": self.f_base,
            "angular_frequency": self.omega_base,
            "impedance": self.z_base,
        }
        try:
            return bases[kind]
        except KeyError:
            raise ConfigurationError(
                f"neznámý druh veličiny {kind!r} (povolené: {', '.join(QUANTITY_KINDS)})",
                "kind",
            ) from None


def to_per_unit(x: float, base: PerUnitBase, kind: str) -> float:
    """Převod SI hodnoty na p.u."""
    return x / base.base_of(kind)


def from_per_unit(x: float, base: PerUnitBase, kind: str) -> float:
    """Převod p.u. hodnoty zpět na SI (přesná inverze to_per_unit)."""
    return x * base.base_of(kind)
