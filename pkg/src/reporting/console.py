"""Formátovaný výstup do konzole pomocí Rich."""

import logging

from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from src.harness.metrics import RunReport

logger = logging.getLogger(__name__)

# Barvy zdrojů
SOURCE_COLORS = {
    "pv1": "yellow",
    "pv2": "cyan",
    "bess": "magenta",
}


class ConsoleReporter:
    """Vypisuje souhrn běhu a přehled scénářů do konzole."""

    def __init__(self, console: Console | None = None, max_events: int = 20):
        self.console = console or Console()
        self.max_events = max_events

    def print_report(self, report: RunReport, metadata: dict | None = None) -> None:
        """Vypíše kompletní report běhu."""
        self.console.print()
        self._print_header(report, metadata or {})
        self._print_frequency(report)
        if report.sharing_ratios:
            self._print_sharing(report)
        if report.settling_times:
            self._print_transients(report)
        if report.event_log:
            self._print_events(report)
        self.console.print()

    def _print_header(self, report: RunReport, metadata: dict) -> None:
        status = "[red]PŘERUŠEN[/red]" if report.aborted else "[green]dokončen[/green]"
        lines = [
            f"[bold]{report.scenario or 'scénář'}[/bold]",
            f"Simulovaný čas: {report.duration:.3f} s | Stav: {status}",
        ]
        if "wall_time" in metadata:
            lines.append(f"Doba výpočtu: {metadata['wall_time']:.1f} s")
        if "csv_path" in metadata:
            lines.append(f"Telemetrie: {metadata['csv_path']}")
        self.console.print(Panel("\n".join(lines), title="RUN REPORT", border_style="blue"))

    def _print_frequency(self, report: RunReport) -> None:
        table = Table(title="Frekvence", border_style="blue")
        table.add_column("Metrika", style="bold", min_width=24)
        table.add_column("Hodnota", justify="right", min_width=12)

        table.add_row("Max |RoCoF| (Hz/s)", f"{report.max_rocof_hz_s:.4f}")
        table.add_row("Minimum (Hz)", f"{report.freq_nadir_hz:.4f}")
        table.add_row("Maximum (Hz)", f"{report.freq_zenith_hz:.4f}")
        if report.islanded_frequency_hz is not None:
            table.add_row("Ostrov, ustálená (Hz)", f"{report.islanded_frequency_hz:.4f}")
        if report.droop_frequency_hz is not None:
            table.add_row("Ostrov, dle droop (Hz)", f"{report.droop_frequency_hz:.4f}")
        if report.inrush_ratio is not None:
            ratio = report.inrush_ratio
            style = "green" if ratio < 0.2 else "yellow"
            table.add_row("Proudový ráz / zátěž", f"[{style}]{ratio:.3f}[/{style}]")
        self.console.print(table)

    def _print_sharing(self, report: RunReport) -> None:
        table = Table(title="Dělení výkonu v ostrově", border_style="green")
        table.add_column("Zdroj", style="bold", min_width=10)
        table.add_column("P (kW)", justify="right", width=10)
        table.add_column("Podíl", justify="right", width=8)

        for source, ratio in report.sharing_ratios.items():
            color = SOURCE_COLORS.get(source, "white")
            table.add_row(
                f"[{color}]{source}[/{color}]",
                f"{report.islanded_powers_kw.get(source, 0.0):.2f}",
                f"{ratio:.3f}",
            )
        self.console.print(table)

    def _print_transients(self, report: RunReport) -> None:
        table = Table(title="Přechodové děje", border_style="yellow")
        table.add_column("Událost", style="bold", min_width=25)
        table.add_column("Ustálení (s)", justify="right", width=12)
        table.add_column("Překmit (kW)", justify="right", width=12)

        for key, settle in report.settling_times.items():
            table.add_row(key, f"{settle:.3f}", f"{report.overshoots_kw.get(key, 0.0):.2f}")
        self.console.print(table)

    def _print_events(self, report: RunReport) -> None:
        events = report.event_log[: self.max_events]
        lines = [f"  {t:8.4f} s  {name}" for t, name in events]
        hidden = len(report.event_log) - len(events)
        if hidden > 0:
            lines.append(f"  [dim]… a dalších {hidden}[/dim]")
        self.console.print("[bold]Události:[/bold]")
        self.console.print("\n".join(lines))

    def print_scenarios(self, scenarios: list[tuple[str, str]]) -> None:
        """Vypíše tabulku dostupných scénářů."""
        table = Table(title="Scénáře", border_style="blue")
        table.add_column("Jméno", style="bold", min_width=20)
        table.add_column("Popis", min_width=40)
        for name, description in scenarios:
            table.add_row(name, description or "[dim]–[/dim]")
        self.console.print(table)
