"""
Experiment configuration: versioned defaults, JSON schema validation and
merging of config files with command-line overrides.
"""
import copy
import json
import os
from importlib import resources

import jsonschema

from .errors import ParameterError

SEED_ENV = "SECANT_LAB_SEED"

_NUM = {"type": "number"}
_CPLX = {"oneOf": [_NUM, {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}]}

WINDOW_SCHEMA = {
    "type": "object",
    "oneOf": [
        {"properties": {"kind": {"const": "secant"}, "a": _CPLX, "b": _CPLX,
                        "coeff_front": _CPLX, "coeff_back": _CPLX},
         "required": ["kind", "a", "b"], "additionalProperties": False},
        {"properties": {"kind": {"const": "gaussian"}, "alpha": _NUM, "sigma": _NUM},
         "required": ["kind", "alpha"], "additionalProperties": False},
    ],
}

POINTSET_SCHEMA = {
    "type": "object",
    "oneOf": [
        {"properties": {"kind": {"const": "periodic"}, "p": _NUM,
                        "offsets": {"type": "array", "items": _NUM, "minItems": 1},
                        "window": _NUM},
         "required": ["kind", "p", "offsets"], "additionalProperties": False},
        {"properties": {"kind": {"const": "lattice"}, "step": _NUM, "offset": _NUM,
                        "window": _NUM},
         "required": ["kind", "step"], "additionalProperties": False},
        {"properties": {"kind": {"enum": ["jittered", "jittered_lattice"]}, "rho": _NUM,
                        "jitter": _NUM, "seed": {"type": "integer"}, "window": _NUM},
         "required": ["kind", "rho", "jitter"], "additionalProperties": False},
        {"properties": {"kind": {"const": "explicit"},
                        "points": {"type": "array", "items": _NUM}, "window": _NUM},
         "required": ["kind", "points"], "additionalProperties": False},
    ],
}

CONFIG_SCHEMA = {
    "type": "object",
    "properties": {
        "version": {"type": "integer"},
        "seed": {"type": "integer"},
        "output": {"type": ["string", "null"]},
        "window": WINDOW_SCHEMA,
        "pointset": POINTSET_SCHEMA,
        "params": {"type": "object"},
        "thresholds": {
            "type": "object",
            "properties": {
                "ladder_ratio": _NUM, "decay_factor": _NUM, "floor_rel": _NUM,
                "critical_eps": _NUM, "fock_rel_tol": _NUM,
                "fock_kernel_bounds": {"type": "array", "items": _NUM, "minItems": 2,
                                       "maxItems": 2},
                "generator_C": _NUM, "hab_kernel_C": _NUM, "kernel_match_C": _NUM,
                "coincidence_C": _NUM, "coincidence_width_tol": _NUM,
                "identity_rel_tol": _NUM, "fs_growth_bad": _NUM, "fs_growth_good": _NUM,
                "fs_agree_growth": _NUM, "validated_on": {"type": "string"},
            },
            "additionalProperties": False,
        },
        "numerics": {
            "type": "object",
            "properties": {
                "quad_tol": _NUM, "theta_grid": {"type": "integer", "minimum": 64},
                "interp_reg": _NUM, "extraction_log_radius": _NUM,
                "x_grid": {"type": "integer", "minimum": 1},
                "N_ladder": {"type": "array", "items": {"type": "integer", "minimum": 1}},
                "N_max": {"type": "integer", "minimum": 1},
                "shift_max": {"type": "integer", "minimum": 0},
                "point_window": _NUM,
            },
            "additionalProperties": False,
        },
    },
    "additionalProperties": False,
}


def load_defaults():
    text = resources.files("secant_lab").joinpath("defaults.json").read_text()
    return json.loads(text)


def _merge(base, override):
    out = copy.deepcopy(base)
    for key, val in override.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], val)
        else:
            out[key] = copy.deepcopy(val)
    return out


def validate(cfg):
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ParameterError(f"config schema violation: {exc.message}") from exc
    return cfg


def resolve(user=None, overrides=None, env=None):
    """
    defaults <- user config <- command-line overrides, then the seed
    environment variable.  Returns (config, list of overridden threshold keys).
    """
    env = os.environ if env is None else env
    user = user or {}
    overrides = overrides or {}
    validate(user)
    cfg = _merge(load_defaults(), user)
    cfg = _merge(cfg, overrides)
    if env.get(SEED_ENV) not in (None, ""):
        try:
            cfg["seed"] = int(env[SEED_ENV])
        except ValueError as exc:
            raise ParameterError(f"{SEED_ENV} must be an integer") from exc
    validate(cfg)
    defaults = load_defaults()["thresholds"]
    changed = sorted(k for k, v in cfg["thresholds"].items() if defaults.get(k) != v)
    return cfg, changed


def load_file(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParameterError(f"malformed JSON config: {exc}") from exc
    except OSError as exc:
        raise ParameterError(f"cannot read config: {exc}") from exc
