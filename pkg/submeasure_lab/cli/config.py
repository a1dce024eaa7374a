"""Where reports go and how they are written."""
from __future__ import annotations

import csv
import logging
import os
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any

from submeasure_lab.cli.models import ReportEnvelope
from submeasure_lab.utils import save_json, slugify

LOGGER = logging.getLogger(__name__)


class OutputStore:
    """Output directory with JSON and CSV writers."""

    def __init__(self, data_path: str | Path):
        """Initialize the instance, creating the directory."""
        self.data_path = str(data_path)
        if not os.path.isdir(self.data_path):
            os.makedirs(self.data_path)

    def get_path(self, filename: str) -> str:
        """Get path to file at data location."""
        return os.path.join(self.data_path, filename)

    @staticmethod
    def report_name(command: str, input_path: Path | None, name: str | None = None) -> str:
        """Slug of "<command>-<name or input stem>"."""
        stem = name or (input_path.stem if input_path is not None else "default")
        return slugify(f"{command}-{stem}")

    def write_report(self, name: str, envelope: ReportEnvelope) -> str:
        """Write a JSON report and return its path."""
        path = self.get_path(f"{name}.json")
        save_json(path, envelope.model_dump(mode="json"))
        LOGGER.info("Report written to %s", path)
        return path

    def write_csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
        """Write a CSV table with repr-formatted floats."""
        path = self.get_path(f"{name}.csv")
        with open(path, "w", encoding="utf-8", newline="") as file_obj:
            writer = csv.writer(file_obj, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([repr(cell) if isinstance(cell, float) else cell for cell in row])
        LOGGER.info("Table written to %s", path)
        return path
