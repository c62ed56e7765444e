"""CSV telemetrie a JSON report běhu."""

from __future__ import annotations

import csv
import json
import logging
import queue
import threading
from dataclasses import asdict
from pathlib import Path
from typing import Iterable

from src.harness.metrics import RunReport
from src.harness.telemetry import FIELDNAMES, TelemetryRecord, record_to_row, row_to_record

logger = logging.getLogger(__name__)


class TelemetryWriteError(OSError):
    """Chyba zápisu telemetrie (nese cestu k souboru)."""


def write_telemetry(records: Iterable[TelemetryRecord], path: Path) -> Path:
    """Zapíše záznamy do CSV s pevnou hlavičkou (prázdný proud = jen hlavička)."""
    path = Path(path)
    count = 0
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(FIELDNAMES)
            for record in records:
                writer.writerow(record_to_row(record))
                count += 1
    except OSError as e:
        logger.error("Zápis telemetrie do %s selhal: %s", path, e)
        raise TelemetryWriteError(f"zápis telemetrie do {path} selhal: {e}") from e
    logger.info("Telemetrie uložena: %s (%d řádků)", path, count)
    return path


def read_telemetry(path: Path) -> list[TelemetryRecord]:
    """Načte CSV zapsané funkcí write_telemetry."""
    path = Path(path)
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        missing = [name for name in FIELDNAMES if name not in (reader.fieldnames or [])]
        if missing:
            raise ValueError(f"{path}: chybí sloupce {', '.join(missing)}")
        records = [row_to_record(row) for row in reader]
    logger.info("Načtena telemetrie: %s (%d řádků)", path, len(records))
    return records


class TelemetryWriter:
    """Zapisuje hotové záznamy v samostatném vlákně.

    Fronta je omezená, put() při plné frontě blokuje simulační smyčku.
    Obsah souboru je shodný s write_telemetry.
    """

    _STOP = object()

    def __init__(self, path: Path, maxsize: int = 4096):
        self.path = Path(path)
        self._queue: queue.Queue = queue.Queue(maxsize=maxsize)
        self._thread = threading.Thread(target=self._run, name="telemetry-writer", daemon=True)
        self._error: BaseException | None = None
        self.count = 0

    def __enter__(self) -> "TelemetryWriter":
        self.start()
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()

    def start(self) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._thread.start()

    def put(self, record: TelemetryRecord) -> None:
        if self._error is not None:
            raise TelemetryWriteError(f"zápis telemetrie do {self.path} selhal: {self._error}")
        self._queue.put(record)

    def close(self) -> None:
        self._queue.put(self._STOP)
        self._thread.join()
        if self._error is not None:
            raise TelemetryWriteError(f"zápis telemetrie do {self.path} selhal: {self._error}")
        logger.info("Telemetrie uložena: %s (%d řádků)", self.path, self.count)

    def _run(self) -> None:
        try:
            with open(self.path, "w", encoding="utf-8", newline="") as f:
                writer = csv.writer(f, lineterminator="\n")
                writer.writerow(FIELDNAMES)
                while True:
                    item = self._queue.get()
                    if item is self._STOP:
                        break
                    writer.writerow(record_to_row(item))
                    self.count += 1
        except OSError as e:
            logger.error("Zápis telemetrie do %s selhal: %s", self.path, e)
            self._error = e
            # vyprázdnit frontu, aby producent neblokoval
            while self._queue.get() is not self._STOP:
                pass


def export_report_json(report: RunReport, path: Path) -> Path:
    """Uloží souhrnný report běhu jako JSON."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(asdict(report), f, ensure_ascii=False, indent=2)
    logger.info("JSON report uložen: %s", path)
    return path
