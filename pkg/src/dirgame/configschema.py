"""JSON schema for the CLI config file.

One document drives every subcommand; flags override single keys.  Unknown
keys are rejected everywhere so that typos fail loudly before any work.
"""

_GRAPH_FAMILIES = [
    {
        "properties": {
            "family": {"const": "dary"},
            "d": {"type": "integer", "minimum": 2},
        },
        "required": ["family", "d"],
        "additionalProperties": False,
    },
    {
        "properties": {"family": {"const": "line"}},
        "required": ["family"],
        "additionalProperties": False,
    },
    {
        "properties": {"family": {"const": "grid"}},
        "required": ["family"],
        "additionalProperties": False,
    },
    {
        "properties": {
            "family": {"const": "lattice"},
            "dim": {"type": "integer", "minimum": 1},
            "offsets": {
                "type": "array",
                "minItems": 1,
                "items": {"type": "array", "items": {"type": "integer"}},
            },
            "direction": {"type": "array", "items": {"type": "integer"}},
            "periods": {"type": "array", "items": {"type": "integer", "minimum": 1}},
            "exclude_residues": {
                "type": "array",
                "items": {"type": "array", "items": {"type": "integer"}},
            },
        },
        "required": ["family", "dim", "offsets", "direction"],
        "additionalProperties": False,
    },
    {
        "properties": {
            "family": {"const": "tiling"},
            "fixture": {"enum": ["unit-square", "mixed-squares"]},
            "period_vectors": {
                "type": "array",
                "items": {"type": "array", "items": {"type": "integer"}},
            },
            "corners": {
                "type": "array",
                "items": {"type": "array", "items": {"type": "integer"}},
            },
            "edges": {"type": "array"},
            "direction": {"type": ["array", "null"]},
            "transitivity_radius": {"type": ["integer", "null"]},
            "initial_corner": {"type": "integer", "minimum": 0},
        },
        "required": ["family"],
        "additionalProperties": False,
    },
    {
        "properties": {
            "family": {"const": "hchain"},
            "h_vertices": {"type": "array", "items": {"type": "string"}},
            "h_edges": {
                "type": "array",
                "items": {"type": "array", "items": {"type": "string"}},
            },
        },
        "required": ["family", "h_vertices", "h_edges"],
        "additionalProperties": False,
    },
    {
        "properties": {
            "family": {"const": "ctree"},
            "levels": {
                "anyOf": [
                    {"enum": ["all", "squares"]},
                    {"type": "array", "items": {"type": "integer", "minimum": 0}},
                ]
            },
            "path_mode": {"type": "boolean"},
        },
        "required": ["family"],
        "additionalProperties": False,
    },
    {
        "properties": {
            "family": {"const": "counterexample"},
            "branch_intervals": {
                "type": ["array", "null"],
                "items": {
                    "type": "array",
                    "items": {"type": "integer"},
                    "minItems": 2,
                    "maxItems": 2,
                },
            },
        },
        "required": ["family"],
        "additionalProperties": False,
    },
    {
        "properties": {
            "family": {"const": "explicit"},
            "initial": {"type": "string"},
            "edges": {
                "type": "object",
                "additionalProperties": {
                    "type": "array",
                    "items": {"type": "string"},
                    "minItems": 1,
                },
            },
        },
        "required": ["family", "initial", "edges"],
        "additionalProperties": False,
    },
]

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "graph": {"type": "object", "oneOf": _GRAPH_FAMILIES},
        "payoffs": {
            "type": "object",
            "properties": {
                "kind": {"enum": ["bernoulli", "uniform", "discrete", "table"]},
                "p": {"type": "number", "minimum": 0, "maximum": 1},
                "values": {"type": "array", "items": {"type": "number"}},
                "weights": {"type": "array", "items": {"type": "number"}},
                "table": {"type": "object", "additionalProperties": {"type": "number"}},
                "default": {"type": "number", "minimum": 0, "maximum": 1},
            },
            "required": ["kind"],
            "additionalProperties": False,
        },
        "run": {
            "type": "object",
            "properties": {
                "n": {"type": "integer"},
                "n_list": {"type": "array", "items": {"type": "integer"}},
                "samples": {"type": "integer", "minimum": 1},
                "master_seed": {"type": "integer"},
                "threads": {"type": "integer", "minimum": 1},
                "solver": {"enum": ["auto", "direct", "tree-pmf"]},
                "budget": {"type": "integer", "minimum": 1},
                "record_timings": {"type": "boolean"},
                "depth": {"type": "integer", "minimum": 0},
            },
            "additionalProperties": False,
        },
        "bounds": {
            "type": "object",
            "properties": {
                "delta": {"type": "number"},
                "t_grid": {"type": "array", "items": {"type": "number"}},
                "epsilon_scale": {"type": "number", "exclusiveMinimum": 0},
                "transience_range": {
                    "type": "array",
                    "items": {"type": "integer", "minimum": 1},
                    "minItems": 2,
                    "maxItems": 3,
                },
            },
            "additionalProperties": False,
        },
        "output": {
            "type": "object",
            "properties": {
                "dir": {"type": "string"},
                "prefix": {"type": "string"},
            },
            "additionalProperties": False,
        },
    },
    "required": ["graph"],
    "additionalProperties": False,
}
