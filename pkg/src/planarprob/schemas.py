"""JSON Schemas for every file the command line writes.

CSV outputs are described by their header and a schema for one row after
numeric columns are parsed.
"""

_TRIPLE = {"type": "array", "items": {"type": "integer"}, "minItems": 3, "maxItems": 3}

SERIES = {
    "type": "object",
    "required": ["mode", "variable", "observable", "couplings", "orders", "coefficients"],
    "properties": {
        "mode": {"enum": ["delta", "oracle"]},
        "variable": {"enum": ["d", "N"]},
        "observable": {"type": "string"},
        "couplings": {"type": "array", "items": {"type": "string"}},
        "orders": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "potential": {"type": "array", "items": {"type": "string"}},
        "coefficients": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["index", "terms"],
                "properties": {
                    "index": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                    "terms": {"type": "array", "items": _TRIPLE, "minItems": 1},
                },
            },
        },
    },
}

SERIES_WITH_ORACLE = {
    "type": "object",
    "required": ["enumerator", "oracle", "planar_diff"],
    "properties": {
        "enumerator": SERIES,
        "oracle": SERIES,
        "planar_diff": {"type": "object", "additionalProperties": {"type": "string"}},
    },
}

MANIFEST = {
    "type": "object",
    "required": ["command", "config", "config_hash", "seed", "versions", "started", "finished", "outputs"],
    "properties": {
        "command": {"type": "array", "items": {"type": "string"}},
        "config": {"type": "object"},
        "config_hash": {"type": "string", "pattern": "^[0-9a-f]{64}$"},
        "seed": {"type": ["integer", "null"]},
        "versions": {"type": "object", "required": ["python"]},
        "started": {"type": "string"},
        "finished": {"type": "string"},
        "outputs": {"type": "array", "items": {"type": "string"}, "minItems": 1},
    },
}

RESULTS_COLUMNS = ["observable", "N", "trials", "mean", "stderr", "seed", "wall_ms"]
RESULTS_ROW = {
    "type": "object",
    "required": RESULTS_COLUMNS,
    "properties": {
        "observable": {"type": "string", "minLength": 1},
        "N": {"type": "integer", "minimum": 8},
        "trials": {"type": "integer", "minimum": 2},
        "mean": {"type": "number"},
        "stderr": {"type": "number", "minimum": 0},
        "seed": {"type": "integer", "minimum": 0},
        "wall_ms": {"type": "number", "minimum": 0},
    },
}

HISTOGRAM_COLUMNS = ["bin_left", "bin_right", "density"]
HISTOGRAM_ROW = {
    "type": "object",
    "required": HISTOGRAM_COLUMNS,
    "properties": {c: {"type": "number"} for c in HISTOGRAM_COLUMNS} | {"density": {"type": "number", "minimum": 0}},
}

MOMENTS_COLUMNS = ["p", "moment"]
ONMODEL_COLUMNS = ["m1", "m2", "coefficient", "value"]
