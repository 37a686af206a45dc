"""
Run configuration: a JSON document, validated against a strict schema.

Quantum numbers are entered doubled (``m2_S = -1`` means m_S = -1/2), angles
in degrees. Every section is optional; missing keys take the defaults in
:data:`DEFAULTS`. Unknown keys are rejected.
"""

from __future__ import annotations

import copy
import hashlib
import json
from pathlib import Path

import jsonschema

from .errors import ConfigError

DEFAULTS = {
    "beam": {
        "p": 0,
        "l": 0,
        "waist_um": 2.7,
        "wavelength_nm": 729.0,
        "power_uW": 1.0,
        "polarization": "sigma+",
    },
    "geometry": {
        "alpha_deg": 45.0,
        "phi_deg": 0.0,
        "B_mT": 13.0,
        "ion_offset_um": [0.0, 0.0, 0.0],
        "sigma_thermal_nm": 0.0,
    },
    "transition": {"m2_S": 1, "m2_D": 3},
    "table": {"l_values": [-1, 0, 1]},
    "scan": {
        "axis": [1.0, 0.0, 0.0],
        "start_um": -5.0,
        "stop_um": 5.0,
        "steps": 101,
        "channels": "ideal",
    },
    "sequence": {
        "omega_kHz": 15.67,
        "detuning_kHz": 0.0,
        "t_start_us": 0.0,
        "t_stop_us": 200.0,
        "t_step_us": 5.0,
        "noise": False,
        "n_shots": 200,
        "delta_S_kHz": 1.54,
        "pi2_omega_kHz": 100.0,
        "pi2_detuning_kHz": 0.0,
        "ramsey_t_stop_us": 1300.0,
        "ramsey_t_step_us": 10.0,
    },
    "stark": {
        "mode": "reproduce",
        "detuning_MHz": 25.0,
        "cases": {
            "A": {"delta_S_kHz": 1.54, "P_delta_mW": 7.50, "omega_kHz": 11.93, "P_omega_uW": 20.0},
            "B": {"delta_S_kHz": 19.1, "P_delta_mW": 1.75, "omega_kHz": 15.67, "P_omega_uW": 2.6},
        },
        "simulate": {
            "kappa": 1.0,
            "omega_scale": 1.0,
            "P_delta_mW": 1.0,
            "P_omega_uW": 10.0,
            "A": {"position_um": [0.0, 0.0, 0.0], "polarization": "H"},
            "B": {"position_um": None, "polarization": "V"},
        },
    },
    "seed": None,
}

_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}
_nonneg = {"type": "number", "minimum": 0}
_vec3 = {"type": "array", "items": _num, "minItems": 3, "maxItems": 3}
_pol = {
    "oneOf": [
        {"type": "string", "enum": ["H", "V", "sigma+", "sigma-", "h", "v"]},
        {
            "type": "array",
            "minItems": 2,
            "maxItems": 2,
            "items": {"type": "array", "items": _num, "minItems": 2, "maxItems": 2},
        },
    ]
}


def _obj(props, required=()):
    return {"type": "object", "properties": props, "additionalProperties": False,
            "required": list(required)}


_case = _obj({"delta_S_kHz": _num, "P_delta_mW": _pos, "omega_kHz": _num, "P_omega_uW": _pos})
_sim_case = _obj({"position_um": {"oneOf": [_vec3, {"type": "null"}]}, "polarization": _pol})

SCHEMA = _obj({
    "beam": _obj({
        "p": {"type": "integer", "minimum": 0, "maximum": 10},
        "l": {"type": "integer", "minimum": -10, "maximum": 10},
        "waist_um": {"type": "number", "exclusiveMinimum": 0, "maximum": 1e4},
        "wavelength_nm": {"type": "number", "exclusiveMinimum": 0, "maximum": 1e5},
        "power_uW": {"type": "number", "minimum": 0, "maximum": 1e9},
        "polarization": _pol,
    }),
    "geometry": _obj({
        "alpha_deg": {"type": "number", "minimum": 0, "maximum": 180},
        "phi_deg": {"type": "number", "minimum": -360, "maximum": 360},
        "B_mT": {"type": "number", "exclusiveMinimum": 0, "maximum": 1e4},
        "ion_offset_um": _vec3,
        "sigma_thermal_nm": {"type": "number", "minimum": 0, "maximum": 1e4},
    }),
    "transition": _obj({
        "m2_S": {"type": "integer", "enum": [-1, 1]},
        "m2_D": {"type": "integer", "enum": [-5, -3, -1, 1, 3, 5]},
    }),
    "table": _obj({
        "l_values": {"type": "array", "items": {"type": "integer", "minimum": -10, "maximum": 10},
                     "minItems": 1},
    }),
    "scan": _obj({
        "axis": _vec3,
        "start_um": _num,
        "stop_um": _num,
        "steps": {"type": "integer", "minimum": 2, "maximum": 100000},
        "channels": {"type": "string", "enum": ["ideal", "full"]},
    }),
    "sequence": _obj({
        "omega_kHz": _pos,
        "detuning_kHz": _num,
        "t_start_us": _nonneg,
        "t_stop_us": _nonneg,
        "t_step_us": _pos,
        "noise": {"type": "boolean"},
        "n_shots": {"type": "integer", "minimum": 1, "maximum": 10**9},
        "delta_S_kHz": _num,
        "pi2_omega_kHz": _pos,
        "pi2_detuning_kHz": _num,
        "ramsey_t_stop_us": _pos,
        "ramsey_t_step_us": _pos,
    }),
    "stark": _obj({
        "mode": {"type": "string", "enum": ["reproduce", "simulate"]},
        "detuning_MHz": _num,
        "cases": _obj({"A": _case, "B": _case}),
        "simulate": _obj({
            "kappa": _num,
            "omega_scale": _pos,
            "P_delta_mW": _pos,
            "P_omega_uW": _pos,
            "A": _sim_case,
            "B": _sim_case,
        }),
    }),
    "seed": {"oneOf": [{"type": "integer", "minimum": 0, "maximum": 2**64 - 1}, {"type": "null"}]},
})


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def _validate(doc) -> None:
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"invalid config at {where}: {exc.message}") from None


def _coerce_floats(value, default):
    # 3 and 3.0 must hash identically: follow the type of the default
    if isinstance(default, dict) and isinstance(value, dict):
        return {k: _coerce_floats(v, default.get(k)) for k, v in value.items()}
    if isinstance(value, list):
        if isinstance(default, list) and default and isinstance(default[0], float):
            return [float(v) for v in value]
        return [_coerce_floats(v, None) for v in value]
    if isinstance(default, float) and isinstance(value, int) and not isinstance(value, bool):
        return float(value)
    return value


def build_config(doc: dict | None = None) -> dict:
    """Validate a (possibly partial) config document and fill in defaults."""
    doc = {} if doc is None else doc
    _validate(doc)
    cfg = _merge(DEFAULTS, doc)
    _validate(cfg)
    seq = cfg["sequence"]
    if seq["t_stop_us"] < seq["t_start_us"]:
        raise ConfigError("sequence.t_stop_us must not be below t_start_us")
    if cfg["scan"]["axis"] == [0, 0, 0] or not any(cfg["scan"]["axis"]):
        raise ConfigError("scan.axis must be nonzero")
    return _coerce_floats(cfg, DEFAULTS)


def parse_config(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    return build_config(doc)


def load_config(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text)


def serialize_config(cfg: dict) -> str:
    return json.dumps(cfg, indent=2, sort_keys=True) + "\n"


def config_hash(cfg: dict) -> str:
    canonical = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
