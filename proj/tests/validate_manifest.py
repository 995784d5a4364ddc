"""Checks a manifest.json against the schema and that every listed output exists."""
import json
import pathlib
import sys

import jsonschema

schema = json.loads(pathlib.Path(sys.argv[1]).read_text())
manifest_path = pathlib.Path(sys.argv[2])
manifest = json.loads(manifest_path.read_text())
jsonschema.validate(manifest, schema)
missing = [f for f in manifest["outputs"] if not (manifest_path.parent / f).is_file()]
if missing:
    sys.exit("missing outputs: " + ", ".join(missing))
