"""DSOGI-PLL – odhad úhlů sousledné a zpětné složky a frekvence.

Každá osa αβ má vlastní SOGI:
  x1' = k·ω·(u − x1) − ω·x2      (v'  – filtrovaný signál)
  x2' = ω·x1                     (qv' – signál zpožděný o 90°)
diskretizovaný lichoběžníkově s předzkreslenou frekvencí. SOGI se ladí odhadem ω
z PLL; v soustavě otáčející se s ω je sousledná složka setrvačným členem
s pólem a = k·ω/2 uvnitř smyčky PLL. Složky:
  α⁺ = (α' − qβ')/2,  β⁺ = (qα' + β')/2
  α⁻ = (α' + qβ')/2,  β⁻ = (β' − qα')/2
Sousledná složka se sleduje SRF-PLL s normalizovanou chybou v ose q.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import NamedTuple

from src.simcore.filters import PiController
from src.simcore.transforms import ThreePhaseSample, abc_to_alpha_beta, wrap_angle

logger = logging.getLogger(__name__)

OMEGA_NOM = 100.0 * math.pi
SOGI_GAIN = math.sqrt(2.0)
# pól DSOGI a = k·ω/2 ≈ 222 rad/s; s PI tvoří trojnásobný pól v −a/3 (pásmo ≈ 20 Hz)
PLL_KP = 74.0
PLL_KI = 1830.0
MIN_NORMALIZING_VOLTAGE = 0.05


@dataclass(slots=True)
class SogiState:
    x1: float = 0.0
    x2: float = 0.0
    u_prev: float = 0.0


def sogi_step(state: SogiState, u: float, omega: float, k: float, dt: float) -> tuple[float, float]:
    """Jeden lichoběžníkový krok SOGI, vrací (v', qv')."""
    w = (2.0 / dt) * math.tan(0.5 * omega * dt)
    h = 0.5 * dt
    # (I − h·A)·x⁺ = (I + h·A)·x + h·b·(u + u_prev),  A = [[−kw, −w], [w, 0]], b = [kw, 0]
    a11, a12, a21 = -k * w, -w, w
    r1 = state.x1 + h * (a11 * state.x1 + a12 * state.x2) + h * k * w * (u + state.u_prev)
    r2 = state.x2 + h * a21 * state.x1
    m11, m12, m21, m22 = 1.0 - h * a11, -h * a12, -h * a21, 1.0
    det = m11 * m22 - m12 * m21
    state.x1 = (r1 * m22 - m12 * r2) / det
    state.x2 = (m11 * r2 - m21 * r1) / det
    state.u_prev = u
    return state.x1, state.x2


@dataclass(slots=True)
class DsogiPllState:
    """Stav DSOGI-PLL; úhly v intervalu [−π, π)."""

    sogi_alpha: SogiState = field(default_factory=SogiState)
    sogi_beta: SogiState = field(default_factory=SogiState)
    loop: PiController = field(
        default_factory=lambda: PiController(kp=PLL_KP, ki=PLL_KI, limit=0.2 * OMEGA_NOM)
    )
    theta_plus: float = 0.0
    theta_minus: float = 0.0
    omega_hat: float = OMEGA_NOM
    omega_nom: float = OMEGA_NOM
    k: float = SOGI_GAIN
    v_plus: float = 0.0
    v_minus: float = 0.0
    out_of_band: bool = False

    @classmethod
    def locked_to(
        cls, amplitude: float, theta: float, omega_nom: float = OMEGA_NOM, dt: float = 0.0
    ) -> "DsogiPllState":
        """Stav odpovídající ustálenému sledování symetrické soustavy.

        Příští vstupní vzorek má úhel theta; paměť SOGI drží vzorek o krok dt dříve.
        """
        previous = theta - omega_nom * dt
        alpha = amplitude * math.cos(previous)
        beta = amplitude * math.sin(previous)
        # qα' = sinθ·A, qβ' = −cosθ·A
        state = cls(
            sogi_alpha=SogiState(x1=alpha, x2=beta, u_prev=alpha),
            sogi_beta=SogiState(x1=beta, x2=-alpha, u_prev=beta),
            theta_plus=wrap_angle(theta),
            theta_minus=wrap_angle(-theta),
            omega_hat=omega_nom,
            omega_nom=omega_nom,
            v_plus=amplitude,
        )
        return state


class PllOutput(NamedTuple):
    theta_plus: float
    theta_minus: float
    omega_hat: float
    v_plus: float
    v_minus: float
    out_of_band: bool


def dsogi_pll_step(state: DsogiPllState, v_abc: ThreePhaseSample, dt: float) -> PllOutput:
    """Jeden krok PLL pro vzorek v_abc v čase t_n.

    Vrací úhel odhadnutý pro t_n; integrátor úhlu se posune na t_{n+1}.
    """
    alpha, beta, _ = abc_to_alpha_beta(v_abc)
    omega = state.omega_hat
    a1, qa1 = sogi_step(state.sogi_alpha, alpha, omega, state.k, dt)
    b1, qb1 = sogi_step(state.sogi_beta, beta, omega, state.k, dt)

    alpha_p = 0.5 * (a1 - qb1)
    beta_p = 0.5 * (qa1 + b1)
    alpha_n = 0.5 * (a1 + qb1)
    beta_n = 0.5 * (b1 - qa1)
    state.v_plus = math.hypot(alpha_p, beta_p)
    state.v_minus = math.hypot(alpha_n, beta_n)
    state.theta_minus = wrap_angle(math.atan2(beta_n, alpha_n))

    theta = state.theta_plus
    v_q = -alpha_p * math.sin(theta) + beta_p * math.cos(theta)
    error = v_q / max(state.v_plus, MIN_NORMALIZING_VOLTAGE)
    omega_hat = state.omega_nom + state.loop.step(error, dt)

    low, high = 0.8 * state.omega_nom, 1.2 * state.omega_nom
    out_of_band = state.loop.saturated or not low < omega_hat < high
    if out_of_band and not state.out_of_band:
        logger.warning("PLL mimo pásmo: ω = %.2f rad/s", omega_hat)
    state.out_of_band = out_of_band
    omega_hat = min(max(omega_hat, low), high)
    state.omega_hat = omega_hat

    state.theta_plus = wrap_angle(theta + omega_hat * dt)
    return PllOutput(theta, state.theta_minus, omega_hat, state.v_plus, state.v_minus, out_of_band)
