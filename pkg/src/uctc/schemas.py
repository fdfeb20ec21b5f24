"""JSON Schema documents for the ``--json`` output of each subcommand."""

_NUM = {"type": "number"}
_BITS = {"type": "string", "pattern": "^[01]*$"}

SOLVE = {
    "type": "object",
    "required": ["result", "witness", "iterations_used", "total_query_cost", "seed", "policy"],
    "properties": {
        "result": {"enum": ["SAT", "UNSAT"]},
        "witness": {"oneOf": [_BITS, {"type": "null"}]},
        "full_witness": {"oneOf": [_BITS, {"type": "null"}]},
        "iterations_used": {"type": "integer", "minimum": 0},
        "total_query_cost": {"type": "integer", "minimum": 0},
        "seed": {"type": "integer"},
        "policy": {"type": "string"},
    },
    "additionalProperties": False,
}

BRUTE = {
    "type": "object",
    "required": ["num_vars", "count"],
    "properties": {
        "num_vars": {"type": "integer", "minimum": 0},
        "count": {"type": "integer", "minimum": 0},
        "models": {"type": "array", "items": _BITS},
    },
    "additionalProperties": False,
}

VV = {
    "type": "object",
    "required": ["seed", "k", "mode", "dimacs"],
    "properties": {
        "seed": {"type": "integer"},
        "k": {"type": "integer", "minimum": 0},
        "mode": {"enum": ["direct", "auxiliary"]},
        "dimacs": {"type": "string"},
    },
    "additionalProperties": False,
}

ISOLATION_RATE = {
    "type": "object",
    "required": ["rows", "pass"],
    "properties": {
        "pass": {"type": "boolean"},
        "rows": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["input", "n", "satisfiable", "seeds", "rate", "bound", "pass"],
                "properties": {
                    "input": {"type": "string"},
                    "n": {"type": "integer"},
                    "satisfiable": {"type": "boolean"},
                    "seeds": {"type": "integer"},
                    "rate": {"type": "number", "minimum": 0, "maximum": 1},
                    "bound": _NUM,
                    "pass": {"type": "boolean"},
                },
            },
        },
    },
    "additionalProperties": False,
}

PM_CHECK = {
    "type": "object",
    "required": [
        "is_pmg", "is_pure_pmg", "unitarity_residual", "psd_min_eig", "tp_residual",
        "path_disagreement",
    ],
    "properties": {
        "is_pmg": {"type": "boolean"},
        "is_pure_pmg": {"type": "boolean"},
        "unitarity_residual": _NUM,
        "psd_min_eig": _NUM,
        "tp_residual": _NUM,
        "path_disagreement": {"oneOf": [_NUM, {"type": "null"}]},
    },
    "additionalProperties": False,
}

CTC_DEMO = {
    "type": "object",
    "required": ["witness", "verified", "query", "was_valid_pure_pmg", "policy", "total_query_cost"],
    "properties": {
        "witness": _BITS,
        "verified": {"type": "boolean"},
        "query": {
            "type": "object",
            "required": ["m", "r", "k", "size"],
            "properties": {k: {"type": "integer"} for k in ("m", "r", "k", "size")},
        },
        "was_valid_pure_pmg": {"type": "boolean"},
        "policy": {"type": "string"},
        "total_query_cost": {"type": "integer"},
    },
    "additionalProperties": False,
}

CROSS_VALIDATE = {
    "type": "object",
    "required": ["samples", "seed", "max_gap", "tol", "pass"],
    "properties": {
        "samples": {"type": "integer"},
        "seed": {"type": "integer"},
        "max_gap": _NUM,
        "tol": _NUM,
        "pass": {"type": "boolean"},
    },
    "additionalProperties": False,
}

BY_COMMAND = {
    "solve": SOLVE,
    "brute": BRUTE,
    "vv": VV,
    "isolation-rate": ISOLATION_RATE,
    "pm-check": PM_CHECK,
    "ctc-demo": CTC_DEMO,
    "cross-validate": CROSS_VALIDATE,
}
