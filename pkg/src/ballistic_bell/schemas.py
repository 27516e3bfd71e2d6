"""JSON Schemas for the records the command line emits with ``--format json``."""

_NUMBER = {"type": "number"}
_SETTINGS = {
    "type": "object",
    "properties": {k: _NUMBER for k in ("theta_a", "theta_b", "theta_a2", "theta_b2")},
    "required": ["theta_a", "theta_b", "theta_a2", "theta_b2"],
    "additionalProperties": False,
}

CHSH = {
    "type": "object",
    "properties": {
        "alpha": _NUMBER,
        "mode": {"enum": ["exact", "sampled"]},
        "optimized": {"type": "boolean"},
        "settings": _SETTINGS,
        "correlations": {"type": "array", "items": _NUMBER, "minItems": 4, "maxItems": 4},
        "chsh_value": _NUMBER,
        "stderr": {"type": ["number", "null"]},
        "shots": {"type": "integer", "minimum": 0},
        "seed": {"type": ["integer", "null"]},
        "violated": {"type": "boolean"},
    },
    "required": ["alpha", "mode", "optimized", "settings", "chsh_value", "violated"],
    "additionalProperties": False,
}

VIOLATION = {
    "type": "object",
    "properties": {
        "alpha_lo": _NUMBER,
        "alpha_hi": _NUMBER,
        "tolerance": {"type": "number", "exclusiveMinimum": 0},
        "step": {"type": "number", "exclusiveMinimum": 0},
        "chsh_max_at_pi": _NUMBER,
    },
    "required": ["alpha_lo", "alpha_hi", "tolerance"],
    "additionalProperties": False,
}

CALIBRATION = {
    "type": "object",
    "properties": {
        "alpha_true": _NUMBER,
        "alpha_hat": _NUMBER,
        "abs_error": {"type": "number", "minimum": 0},
        "residual_rms": {"type": "number", "minimum": 0},
        "num_points": {"type": "integer", "minimum": 4},
        "shots": {"type": "integer", "minimum": 0},
        "seed": {"type": ["integer", "null"]},
        "low_identifiability": {"type": "boolean"},
    },
    "required": ["alpha_hat", "residual_rms", "num_points", "abs_error"],
    "additionalProperties": False,
}

SAMPLE = {
    "type": "object",
    "properties": {
        "alpha": _NUMBER,
        "theta1": _NUMBER,
        "theta2": _NUMBER,
        "mean": {"type": "number", "minimum": -1, "maximum": 1},
        "stderr": {"type": "number", "minimum": 0},
        "shots": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer"},
        "exact": _NUMBER,
    },
    "required": ["alpha", "theta1", "theta2", "mean", "stderr", "shots", "seed"],
    "additionalProperties": False,
}

_ELEMENT = {
    "type": "object",
    "properties": {
        "index": {"type": "integer", "minimum": 0},
        "name": {"type": "string"},
        "element": {"enum": ["splitter", "well", "step", "ab_loop", "coulomb_coupler"]},
        "logical": {"enum": ["H", "P", "P0", "CP"]},
        "qubits": {"type": "array", "items": {"type": "integer"}},
        "geometry": {"type": "object", "additionalProperties": _NUMBER},
        "verdicts": {"type": "object", "additionalProperties": {"type": "boolean"}},
        "ok": {"type": "boolean"},
    },
    "required": ["index", "element", "logical", "qubits", "geometry", "verdicts", "ok"],
    "additionalProperties": False,
}

COMPILE = {
    "type": "object",
    "properties": {
        "ok": {"type": "boolean"},
        "error": {"type": ["string", "null"]},
        "elements": {"type": "array", "items": _ELEMENT},
    },
    "required": ["ok", "elements"],
    "additionalProperties": False,
}

SWEEP_COLUMNS = ("alpha", "theta", "s_exact", "s_analytic", "s_sampled", "stderr", "shots")
