"""CLI rozhraní simulátoru LV vývodu se střídači tvořícími síť."""

import io
import logging
import sys
import time
from dataclasses import replace
from pathlib import Path

import click
from rich.console import Console

# Oprava Windows encoding
if sys.platform == "win32":
    sys.stdout = io.TextIOWrapper(sys.stdout.buffer, encoding="utf-8", errors="replace")
    sys.stderr = io.TextIOWrapper(sys.stderr.buffer, encoding="utf-8", errors="replace")

from src.config_loader import list_builtin_scenarios, load_scenario
from src.harness.engine import run_scenario
from src.harness.metrics import summarize
from src.harness.scenario import Scenario
from src.reporting.console import ConsoleReporter
from src.reporting.export import TelemetryWriter, export_report_json, read_telemetry
from src.simcore.errors import ConfigurationError

# Kořenový adresář projektu
PROJECT_ROOT = Path(__file__).parent.parent
DEFAULT_OUT_DIR = PROJECT_ROOT / "runs"

EXIT_OK = 0
EXIT_CONFIG_ERROR = 1
EXIT_ABORTED = 2

console = Console()


def _setup_logging(verbose: bool) -> None:
    """Nastaví logging."""
    level = logging.DEBUG if verbose else logging.INFO
    logging.basicConfig(
        level=level,
        format="%(asctime)s [%(name)s] %(levelname)s: %(message)s",
        datefmt="%H:%M:%S",
    )


def _load(ctx: click.Context, name: str) -> Scenario:
    """Načte scénář; chyba konfigurace ukončí příkaz s kódem 1."""
    try:
        return load_scenario(name)
    except ConfigurationError as e:
        console.print(f"[red]Chyba konfigurace: {e}[/red]")
        ctx.exit(EXIT_CONFIG_ERROR)


@click.group()
@click.option("--verbose", "-v", is_flag=True, help="Podrobný výstup (debug logging)")
@click.pass_context
def main(ctx: click.Context, verbose: bool) -> None:
    """Simulátor LV vývodu – FV střídače tvořící síť, baterie a synchronizace se sítí."""
    _setup_logging(verbose)
    ctx.ensure_object(dict)
    ctx.obj["verbose"] = verbose


@main.command()
@click.argument("scenario")
@click.option(
    "--out",
    "-o",
    "out_dir",
    type=click.Path(file_okay=False, path_type=Path),
    default=DEFAULT_OUT_DIR,
    show_default=True,
    help="Adresář pro CSV telemetrii a JSON report",
)
@click.option("--seed", type=int, default=None, help="Seed generátoru šumu senzorů")
@click.pass_context
def run(ctx: click.Context, scenario: str, out_dir: Path, seed: int | None) -> None:
    """Spustí scénář (jméno vestavěného scénáře nebo cesta k souboru)."""
    start_time = time.time()
    sc = _load(ctx, scenario)
    if seed is not None:
        sc = replace(sc, seed=seed)

    csv_path = out_dir / f"{sc.name}.csv"
    console.print(f"[bold blue]Simulace[/bold blue] {sc.name} ({sc.duration:g} s, krok {sc.dt:g} s)")
    try:
        with TelemetryWriter(csv_path) as writer:
            result = run_scenario(sc, on_record=writer.put)
    except ConfigurationError as e:
        console.print(f"[red]Chyba konfigurace: {e}[/red]")
        ctx.exit(EXIT_CONFIG_ERROR)

    json_path = export_report_json(result.report, out_dir / f"{sc.name}.report.json")
    elapsed = time.time() - start_time
    reporter = ConsoleReporter(console)
    reporter.print_report(result.report, {"wall_time": elapsed, "csv_path": csv_path})
    console.print(f"  JSON report: {json_path}")

    if result.report.aborted:
        console.print("[bold red]Běh přerušen![/bold red]")
        ctx.exit(EXIT_ABORTED)
    console.print(f"\n[bold green]Hotovo![/bold green] ({elapsed:.1f}s)")


@main.command("summarize")
@click.argument("csv_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--warmup", type=float, default=0.0, show_default=True, help="Ignorovaný náběh (s)")
@click.pass_context
def summarize_cmd(ctx: click.Context, csv_file: Path, warmup: float) -> None:
    """Přepočítá report z uložené CSV telemetrie."""
    try:
        records = read_telemetry(csv_file)
    except ValueError as e:
        console.print(f"[red]{e}[/red]")
        ctx.exit(EXIT_CONFIG_ERROR)
    report = summarize(records, warmup=warmup, scenario=csv_file.stem)
    ConsoleReporter(console).print_report(report, {"csv_path": csv_file})


@main.command("list")
def list_cmd() -> None:
    """Vypíše dostupné scénáře."""
    scenarios = list_builtin_scenarios()
    if not scenarios:
        console.print("[yellow]Žádné scénáře nenalezeny[/yellow]")
        return
    ConsoleReporter(console).print_scenarios(scenarios)


@main.command()
@click.argument("scenario")
@click.pass_context
def validate(ctx: click.Context, scenario: str) -> None:
    """Ověří scénář bez spuštění simulace."""
    sc = _load(ctx, scenario)
    console.print(f"  Scénář: [bold]{sc.name}[/bold]")
    console.print(f"  Délka: {sc.duration:g} s, krok {sc.dt:g} s ({sc.n_steps} kroků)")
    console.print(f"  Zdroje: {', '.join(sc.source_names)}")
    for event in sc.events:
        console.print(f"  {event.time:8.3f} s  {event.describe()}")
    console.print("[green]Scénář je validní.[/green]")


if __name__ == "__main__":
    main()
