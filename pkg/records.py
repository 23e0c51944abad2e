#!/usr/bin/env python3
"""
records.py - Diagnostic record persistence

NDJSON is the primary stream (one DiagnosticRecord per line, keys in record
field order); the CSV file mirrors it. Floats are written with repr, the
shortest decimal string that round-trips.
"""

import csv
import json
import logging
from pathlib import Path
from typing import Any, IO, List, Optional

from diagnostics import FIELD_NAMES, DiagnosticRecord
from errors import RecordError

logger = logging.getLogger(__name__)


class NdjsonSink:
    """DiagnosticSink streaming records as JSON lines."""

    def __init__(self, path: Path):
        self.path = Path(path)
        self._fh: Optional[IO[str]] = open(self.path, "w")
        self.count = 0

    def emit(self, record: DiagnosticRecord) -> None:
        self._fh.write(json.dumps(record.to_dict(), allow_nan=False) + "\n")
        self._fh.flush()
        self.count += 1

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class CsvSink:
    """DiagnosticSink writing a header row and one row per record."""

    def __init__(self, path: Path):
        self.path = Path(path)
        self._fh: Optional[IO[str]] = open(self.path, "w", newline="")
        self._writer = csv.writer(self._fh)
        self._writer.writerow(FIELD_NAMES)

    def emit(self, record: DiagnosticRecord) -> None:
        row = record.to_dict()
        self._writer.writerow([repr(float(row[name])) for name in FIELD_NAMES])
        self._fh.flush()

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class TeeSink:
    """Forwards every record to each wrapped sink in order."""

    def __init__(self, *sinks):
        self.sinks = sinks

    def emit(self, record: DiagnosticRecord) -> None:
        for sink in self.sinks:
            sink.emit(record)


def read_records(path: Path) -> List[DiagnosticRecord]:
    """Parse an NDJSON record file; blank lines are ignored."""
    path = Path(path)
    if not path.exists():
        raise RecordError(f"records file not found: {path}")
    records = []
    with open(path, "r") as f:
        for lineno, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            try:
                data = json.loads(line)
            except json.JSONDecodeError as e:
                raise RecordError(f"{path}:{lineno}: invalid JSON ({e.msg})")
            try:
                records.append(DiagnosticRecord.from_dict(data))
            except RecordError as e:
                raise RecordError(f"{path}:{lineno}: {e}")
    return records


def read_csv_records(path: Path) -> List[DiagnosticRecord]:
    path = Path(path)
    with open(path, "r", newline="") as f:
        reader = csv.DictReader(f)
        return [DiagnosticRecord.from_dict(row) for row in reader]


def write_json(path: Path, data: Any) -> Path:
    """Write a report with indent=2; keys keep insertion order."""
    path = Path(path)
    with open(path, "w") as f:
        json.dump(data, f, indent=2, allow_nan=False)
        f.write("\n")
    logger.debug("wrote %s", path)
    return path
