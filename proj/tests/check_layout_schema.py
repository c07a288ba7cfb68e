"""Validate the layout block of an instance file against docs/layout.schema.json."""
import json
import sys

import jsonschema

schema_path, instance_path = sys.argv[1], sys.argv[2]
with open(schema_path) as f:
    schema = json.load(f)
with open(instance_path) as f:
    layout = json.load(f)["layout"]
jsonschema.Draft202012Validator.check_schema(schema)
jsonschema.validate(layout, schema, cls=jsonschema.Draft202012Validator)
