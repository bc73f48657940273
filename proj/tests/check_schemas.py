"""Validates the sample corpus and CLI report fragments against schemas/."""
import json
import pathlib
import subprocess
import sys
import tempfile

from jsonschema import Draft202012Validator
from referencing import Registry, Resource

root = pathlib.Path(__file__).resolve().parent.parent
binary = sys.argv[1] if len(sys.argv) > 1 else None

schemas = {p.name: json.loads(p.read_text()) for p in (root / "schemas").glob("*.json")}
registry = Registry().with_resources((name, Resource.from_contents(s)) for name, s in schemas.items())


def validator(name):
    return Draft202012Validator(schemas[name], registry=registry)


kinds = {
    "ordinary.json": "crystal.schema.json",
    "supersingular.json": "crystal.schema.json",
    "f4-semilinear.json": "crystal.schema.json",
    "divisible-by-p.json": "crystal.schema.json",
    "legendre-family.json": "family.schema.json",
    "two-param-family.json": "family.schema.json",
    "as-legendre-e1.json": "as_system.schema.json",
    "as-degree-two.json": "as_system.schema.json",
    "as-coupled.json": "as_system.schema.json",
}

failures = 0
for sample in sorted((root / "samples").glob("*.json")):
    schema = kinds.get(sample.name)
    if schema is None:
        print(f"FAIL {sample.name}: no schema assigned")
        failures += 1
        continue
    errors = list(validator(schema).iter_errors(json.loads(sample.read_text())))
    for e in errors:
        print(f"FAIL {sample.name}: {e.json_path}: {e.message}")
    failures += len(errors)
    if not errors:
        print(f"ok   {sample.name} against {schema}")

if binary:
    with tempfile.TemporaryDirectory() as tmp:
        out = pathlib.Path(tmp) / "r.json"
        subprocess.run([binary, "slopes", "-i", str(root / "samples" / "supersingular.json"), "-o", str(out)], check=True,
                       stdout=subprocess.DEVNULL)
        report = json.loads(out.read_text())
        errors = list(validator("polygon.schema.json").iter_errors(report["newton"]))
        failures += len(errors)
        print(("FAIL" if errors else "ok  ") + " report polygon against polygon.schema.json")

sys.exit(1 if failures else 0)
