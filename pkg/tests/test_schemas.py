"""Shipped JSON schemas against the models they describe."""
import json
from pathlib import Path

import pytest

from submeasure_lab.cli.schemas import (
    SCHEMA_SOURCES,
    export_schemas,
    generated_schema,
    schema_filename,
)
from submeasure_lab.exact import EXACT_JSON_SCHEMA

SHIPPED = Path(__file__).resolve().parent.parent / "schemas"


def _outline(node, found=None):
    """Property names and required fields of every object schema inside node."""
    if found is None:
        found = set()
    if isinstance(node, dict):
        if isinstance(node.get("properties"), dict):
            found.add((tuple(sorted(node["properties"])), tuple(sorted(node.get("required", [])))))
        for key, child in node.items():
            if key not in ("default", "enum", "const"):
                _outline(child, found)
    elif isinstance(node, list):
        for child in node:
            _outline(child, found)
    return found


def _shipped(name):
    return json.loads((SHIPPED / schema_filename(name)).read_text(encoding="utf-8"))


def test_every_schema_is_shipped():
    assert sorted(path.name for path in SHIPPED.glob("*.schema.json")) == sorted(
        schema_filename(name) for name in SCHEMA_SOURCES
    )


@pytest.mark.parametrize("name", sorted(SCHEMA_SOURCES))
def test_shipped_schema_matches_model(name):
    shipped = _shipped(name)
    generated = generated_schema(name)
    assert shipped["$id"] == generated["$id"] == schema_filename(name)
    assert shipped["$schema"] == generated["$schema"]
    assert shipped.get("title") == generated.get("title")
    assert sorted(shipped.get("$defs", {})) == sorted(generated.get("$defs", {}))
    assert _outline(shipped) == _outline(generated)


def test_report_schema_requirements():
    generated = generated_schema("report")
    assert sorted(generated["required"]) == ["command", "result", "seed", "version"]
    assert generated["$defs"]["Command"]["enum"][0] == "covnum"


def test_exact_values_publish_their_json_form():
    schema = generated_schema("exact")
    assert schema["anyOf"] == EXACT_JSON_SCHEMA["anyOf"]
    # every use gets its own copy
    assert "title" not in EXACT_JSON_SCHEMA
    family = generated_schema("submeasure")
    assert family["$defs"]["WeightedSet"]["properties"]["value"]["anyOf"] == EXACT_JSON_SCHEMA["anyOf"]


def test_export_schemas(tmp_path):
    written = export_schemas(str(tmp_path / "schemas"))
    assert len(written) == len(SCHEMA_SOURCES)
    for path in written:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        name = Path(path).name.removesuffix(".schema.json")
        assert data == generated_schema(name)
        assert _outline(data) == _outline(_shipped(name))
