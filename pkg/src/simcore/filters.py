"""Diskrétní primitiva – setrvačný člen 1. řádu a PI regulátor.

Všechny spojité bloky se diskretizují bilineárně (lichoběžníkově).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from src.simcore.errors import ConfigurationError


@dataclass(slots=True)
class FirstOrderLagState:
    """Stav členu 1/(T·s + 1)."""

    y: float = 0.0
    t_const: float = 0.0
    u_prev: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.t_const) and self.t_const >= 0.0):
            raise ConfigurationError(f"časová konstanta musí být ≥ 0, je {self.t_const!r}", "t_const")

    def reset(self, value: float) -> None:
        """Nastaví ustálený stav (výstup i paměť vstupu) na value."""
        self.y = value
        self.u_prev = value


def lag_step(state: FirstOrderLagState, u: float, dt: float) -> float:
    """Jeden krok setrvačného členu, vrací nový výstup.

    Pro t_const = 0 je člen průchozí (výstup = vstup).
    """
    if not dt > 0.0:
        raise ConfigurationError(f"krok musí být kladný, je {dt!r}", "dt")
    t_const = state.t_const
    if t_const == 0.0:
        state.y = u
        state.u_prev = u
        return u
    if dt > 0.5 * t_const:
        raise ConfigurationError(
            f"krok {dt} s je větší než polovina časové konstanty {t_const} s", "dt"
        )
    denominator = 2.0 * t_const + dt
    a = (2.0 * t_const - dt) / denominator
    b = dt / denominator
    state.y = a * state.y + b * (u + state.u_prev)
    state.u_prev = u
    return state.y


@dataclass(slots=True)
class PiController:
    """PI regulátor s lichoběžníkovým integrátorem a anti-windupem.

    Výstup = kp·e + integrátor + dopředná vazba, omezený na ±limit.
    Při saturaci se integrátor koriguje zpětným výpočtem (back-calculation)
    a navíc je vždy omezen na ±limit.
    """

    kp: float
    ki: float
    limit: float = math.inf
    kaw: float = 0.0
    integrator: float = 0.0
    e_prev: float = 0.0
    saturated: bool = False

    def step(self, error: float, dt: float, feedforward: float = 0.0) -> float:
        self.integrator += 0.5 * self.ki * dt * (error + self.e_prev)
        self.e_prev = error
        unclamped = self.kp * error + self.integrator + feedforward
        output = min(max(unclamped, -self.limit), self.limit)
        self.saturated = output != unclamped
        if self.saturated and self.kaw > 0.0:
            self.integrator += self.kaw * dt * (output - unclamped)
        # integrátor nikdy neopustí pásmo výstupu
        self.integrator = min(max(self.integrator, -self.limit), self.limit)
        return output

    def preload(self, value: float) -> None:
        """Přednastaví integrátor (beznárazové přepnutí)."""
        self.integrator = min(max(value, -self.limit), self.limit)
        self.e_prev = 0.0

    def reset(self) -> None:
        self.integrator = 0.0
        self.e_prev = 0.0
        self.saturated = False
