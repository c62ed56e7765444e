"""Výjimky simulátoru – společný základ pro všechny moduly."""


class SimulationError(Exception):
    """Bázová výjimka všech chyb simulace."""


class ConfigurationError(SimulationError):
    """Neplatná konfigurace nebo parametr (nese tečkovou cestu ke klíči)."""

    def __init__(self, message: str, key_path: str = ""):
        self.key_path = key_path
        if key_path:
            message = f"{key_path}: {message}"
        super().__init__(message)


class SignalIntegrityError(SimulationError):
    """Nekonečná nebo NaN hodnota v měřeném signálu."""


class ContractViolationError(SimulationError):
    """Porušení kontraktu mezi bloky (např. veličiny v různých rámcích)."""


class SimulationBlowUpError(SimulationError):
    """Divergence stavu plantu – hlásí první stav mimo povolený rozsah."""

    def __init__(self, state_name: str, value: float, time: float | None = None):
        self.state_name = state_name
        self.value = value
        self.time = time
        where = f" v čase {time:.4f} s" if time is not None else ""
        super().__init__(f"Divergence stavu {state_name} = {value:.3g} p.u.{where}")


class DcLinkCollapseError(SimulationError):
    """Zhroucení DC meziobvodu FV zdroje (nedostatečné ozáření pro zátěž)."""

    def __init__(self, source: str, time: float | None = None):
        self.source = source
        self.time = time
        super().__init__(f"DC meziobvod zdroje {source} se zhroutil (napětí kleslo na 0 V)")


class InverterTripError(SimulationError):
    """Vypnutí střídače (např. nekladné napětí DC sběrnice)."""

    def __init__(self, source: str, reason: str):
        self.source = source
        self.reason = reason
        super().__init__(f"Střídač {source} vypnut: {reason}")
