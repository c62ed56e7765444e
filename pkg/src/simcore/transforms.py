"""Clarkeova a Parkova transformace (amplitudově invariantní).

Konvence platná v celém projektu:
  α = 2/3·(a − b/2 − c/2),  β = (b − c)/√3,  0 = (a + b + c)/3
  d =  α·cosθ + β·sinθ
  q = −α·sinθ + β·cosθ      (osa q předbíhá osu d o 90°)

Symetrická soustava amplitudy 1 s fází θ transformovaná stejným θ dává
(d, q) = (1, 0); transformace úhlem o 90° zpožděným dává (0, +1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from src.simcore.errors import SignalIntegrityError

_SQRT3 = math.sqrt(3.0)
_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True, slots=True)
class ThreePhaseSample:
    """Okamžité hodnoty fází a, b, c v jednom časovém kroku."""

    a: float
    b: float
    c: float

    @classmethod
    def balanced(cls, amplitude: float, theta: float) -> "ThreePhaseSample":
        """Symetrická soustava se sousledným sledem fází."""
        return cls(
            amplitude * math.cos(theta),
            amplitude * math.cos(theta - _TWO_PI / 3.0),
            amplitude * math.cos(theta + _TWO_PI / 3.0),
        )

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.a, self.b, self.c)

    def is_finite(self) -> bool:
        return math.isfinite(self.a) and math.isfinite(self.b) and math.isfinite(self.c)


@dataclass(frozen=True, slots=True)
class DqQuantity:
    """Dvouosá veličina v rotujícím rámci, označená úhlem transformace."""

    d: float
    q: float
    theta_used: float
    zero: float = 0.0

    @property
    def magnitude(self) -> float:
        return math.hypot(self.d, self.q)


def wrap_angle(theta: float) -> float:
    """Zabalí úhel do intervalu [−π, π)."""
    return (theta + math.pi) % _TWO_PI - math.pi


def abc_to_alpha_beta(x: ThreePhaseSample) -> tuple[float, float, float]:
    """Clarkeova transformace – vrací (α, β, nulová složka)."""
    if not x.is_finite():
        raise SignalIntegrityError(f"Nekonečná hodnota v třífázovém vzorku {x}")
    alpha = (2.0 * x.a - x.b - x.c) / 3.0
    beta = (x.b - x.c) / _SQRT3
    zero = (x.a + x.b + x.c) / 3.0
    return alpha, beta, zero


def alpha_beta_to_abc(alpha: float, beta: float, zero: float = 0.0) -> ThreePhaseSample:
    """Inverzní Clarkeova transformace."""
    half_alpha = -0.5 * alpha
    beta_term = 0.5 * _SQRT3 * beta
    return ThreePhaseSample(alpha + zero, half_alpha + beta_term + zero, half_alpha - beta_term + zero)


def abc_to_dq(x: ThreePhaseSample, theta: float) -> DqQuantity:
    """Clarke + Park pod úhlem theta."""
    if not math.isfinite(theta):
        raise SignalIntegrityError(f"Nekonečný úhel transformace: {theta!r}")
    alpha, beta, zero = abc_to_alpha_beta(x)
    cos_t = math.cos(theta)
    sin_t = math.sin(theta)
    return DqQuantity(
        d=alpha * cos_t + beta * sin_t,
        q=-alpha * sin_t + beta * cos_t,
        theta_used=theta,
        zero=zero,
    )


def dq_to_abc(x: DqQuantity, theta: float) -> ThreePhaseSample:
    """Přesná inverze abc_to_dq pod stejným úhlem."""
    if not (math.isfinite(theta) and math.isfinite(x.d) and math.isfinite(x.q)):
        raise SignalIntegrityError(f"Nekonečná hodnota v dq veličině {x} (θ={theta!r})")
    cos_t = math.cos(theta)
    sin_t = math.sin(theta)
    alpha = x.d * cos_t - x.q * sin_t
    beta = x.d * sin_t + x.q * cos_t
    return alpha_beta_to_abc(alpha, beta, x.zero)


def rotate_dq(d: float, q: float, delta: float) -> tuple[float, float]:
    """Převede dq složky do rámce pootočeného o delta (nový θ = starý θ + delta)."""
    cos_t = math.cos(delta)
    sin_t = math.sin(delta)
    return d * cos_t + q * sin_t, -d * sin_t + q * cos_t
