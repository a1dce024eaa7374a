"""JSON schemas of the input documents and the report envelope, generated from the models."""
from __future__ import annotations

import logging
import os
import sys
from typing import Any

from pydantic import TypeAdapter

from submeasure_lab.cli.models import (
    DistDocument,
    EntropyDocument,
    ExactValue,
    FamilyDocument,
    PathologicalDocument,
    ProbeDocument,
    ReportEnvelope,
    SubmeasureDocument,
    SubmeasureKind,
)
from submeasure_lab.conclab.tail import Scenario
from submeasure_lab.utils import save_json

LOGGER = logging.getLogger(__name__)

SCHEMA_DIALECT = "https://json-schema.org/draft/2020-12/schema"

SCHEMA_SOURCES: dict[str, Any] = {
    "dist": DistDocument,
    "entropy": EntropyDocument,
    "exact": ExactValue,
    "family": FamilyDocument,
    "pathological": PathologicalDocument,
    "probe": ProbeDocument,
    "report": ReportEnvelope,
    "scenario": Scenario,
    "submeasure": SubmeasureKind,
    "submeasure_document": SubmeasureDocument,
}


def schema_filename(name: str) -> str:
    """File name a schema is shipped under."""
    return f"{name}.schema.json"


def generated_schema(name: str) -> dict[str, Any]:
    """The JSON schema pydantic derives for one published document."""
    schema = TypeAdapter(SCHEMA_SOURCES[name]).json_schema()
    return {"$schema": SCHEMA_DIALECT, "$id": schema_filename(name), **schema}


def export_schemas(directory: str) -> list[str]:
    """Write every schema into directory and return the written paths."""
    os.makedirs(directory, exist_ok=True)
    written = []
    for name in SCHEMA_SOURCES:
        path = os.path.join(directory, schema_filename(name))
        save_json(path, generated_schema(name))
        written.append(path)
    LOGGER.info("Wrote %d schemas to %s", len(written), directory)
    return written


if __name__ == "__main__":
    export_schemas(sys.argv[1] if len(sys.argv) > 1 else "schemas")
