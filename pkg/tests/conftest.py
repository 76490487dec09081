import json
from importlib import resources

import jsonschema
import pytest
from referencing import Registry, Resource


def _schema_registry():
    reg = Registry()
    root = resources.files("lrdlab.schemas")
    for entry in root.iterdir():
        if entry.name.endswith(".schema.json"):
            schema = json.loads(entry.read_text())
            reg = reg.with_resource(schema["$id"], Resource.from_contents(schema))
    return reg


_REGISTRY = _schema_registry()


def validate_payload(payload, schema_name: str) -> None:
    root = resources.files("lrdlab.schemas")
    schema = json.loads(root.joinpath(f"{schema_name}.schema.json").read_text())
    validator = jsonschema.Draft202012Validator(schema, registry=_REGISTRY)
    validator.validate(payload)


@pytest.fixture(scope="session")
def schema_validator():
    return validate_payload
