"""
Line-delimited metrics stream, one MetricsRecord per line.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import IO, Optional

from models import DatasetError, MetricsRecord

logger = logging.getLogger(__name__)


class MetricsWriter:
    """Append-only writer; with no path the records are only kept in memory."""

    def __init__(self, path: Optional[Path] = None) -> None:
        self.path = path
        self.records: list[MetricsRecord] = []
        self._handle: Optional[IO[str]] = None

    def __enter__(self) -> "MetricsWriter":
        if self.path is not None:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self._handle = self.path.open("w", encoding="utf-8")
        return self

    def __exit__(self, *exc_info) -> None:
        if self._handle is not None:
            self._handle.close()
            self._handle = None

    def write(self, record: MetricsRecord) -> None:
        self.records.append(record)
        if self._handle is not None:
            self._handle.write(record.to_json(sort_keys=True) + "\n")
            self._handle.flush()


def read_metrics(path: Path) -> list[MetricsRecord]:
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise DatasetError("cannot read metrics stream", path=str(path)) from exc
    return [MetricsRecord.from_json(line) for line in lines if line.strip()]
