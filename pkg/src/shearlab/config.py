"""Run configuration: JSON schema, defaults and flag overrides."""

from __future__ import annotations

import copy
import json
from typing import Any, Dict, Optional

import jsonschema

COMMANDS = ("farey", "shear", "reconstruct", "extend", "beltrami", "counterexample", "metrics", "das", "lemma3")

_complex = {
    "oneOf": [
        {"type": "number"},
        {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
    ]
}

SCHEMA: Dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "$defs": {
        "complex": _complex,
        "map": {
            "type": "object",
            "required": ["kind"],
            "oneOf": [
                {"properties": {"kind": {"const": "identity"}, "model": {"enum": ["disk", "halfplane"]}},
                 "additionalProperties": False},
                {"properties": {"kind": {"const": "moebius"},
                                "matrix": {"type": "array", "items": {"$ref": "#/$defs/complex"}, "minItems": 4, "maxItems": 4},
                                "model": {"enum": ["disk", "halfplane"]}},
                 "required": ["matrix"], "additionalProperties": False},
                {"properties": {"kind": {"const": "piecewise_angle"},
                                "breaks": {"type": "array", "items": {"type": "number"}, "minItems": 1},
                                "images": {"type": "array", "items": {"type": "number"}, "minItems": 1}},
                 "required": ["breaks", "images"], "additionalProperties": False},
                {"properties": {"kind": {"const": "counterexample"}, "n": {"type": "integer", "minimum": 2}},
                 "required": ["n"], "additionalProperties": False},
                {"properties": {"kind": {"const": "compose"},
                                "maps": {"type": "array", "items": {"$ref": "#/$defs/map"}, "minItems": 1}},
                 "required": ["maps"], "additionalProperties": False},
                {"properties": {"kind": {"const": "halfplane_conjugate"}, "map": {"$ref": "#/$defs/map"}},
                 "required": ["map"], "additionalProperties": False},
            ],
        },
        "point": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
        "grid": {
            "type": "object",
            "properties": {
                "radius": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "rings": {"type": "integer", "minimum": 0},
                "per_ring": {"type": "integer", "minimum": 1},
                "points": {"type": "array", "items": {"$ref": "#/$defs/point"}},
            },
            "additionalProperties": False,
        },
    },
    "type": "object",
    "properties": {
        "command": {"enum": list(COMMANDS)},
        "map": {"$ref": "#/$defs/map"},
        "map1": {"$ref": "#/$defs/map"},
        "map2": {"$ref": "#/$defs/map"},
        "depth": {"type": "integer", "minimum": 0},
        "k_max": {"type": ["integer", "null"], "minimum": 0},
        "thresholds": {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 1},
        "n_values": {"type": "array", "items": {"type": "integer", "minimum": 2}, "minItems": 1},
        "points": {"type": "array", "items": {"$ref": "#/$defs/point"}},
        "grid": {"$ref": "#/$defs/grid"},
        "M": {"type": "number", "exclusiveMinimum": 0},
        "input": {"type": "string"},
        "seed": {"type": "integer", "minimum": 0},
        "parallel": {"type": "integer", "minimum": 1},
        "quadrature": {
            "type": "object",
            "properties": {"nodes_per_arc": {"type": "integer", "minimum": 2}, "tol": {"type": "number", "exclusiveMinimum": 0}},
            "additionalProperties": False,
        },
        "unit_cr": {
            "type": "object",
            "properties": {"count": {"type": "integer", "minimum": 1}, "seed": {"type": "integer", "minimum": 0}},
            "additionalProperties": False,
        },
        "degenerating": {
            "type": "object",
            "properties": {
                "scales": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}, "minItems": 1},
                "count": {"type": "integer", "minimum": 1},
                "seed": {"type": "integer", "minimum": 0},
            },
            "additionalProperties": False,
        },
    },
    "additionalProperties": False,
}

IDENTITY = {"kind": "identity"}

DEFAULTS: Dict[str, Dict[str, Any]] = {
    "farey": {"depth": 3},
    "shear": {"map": IDENTITY, "depth": 6, "k_max": None},
    "reconstruct": {},
    "extend": {"map": IDENTITY, "points": [[0.0, 0.0]], "quadrature": {"nodes_per_arc": 64, "tol": 1e-11}, "parallel": 1},
    "beltrami": {"map": IDENTITY, "grid": {"radius": 0.5, "rings": 3, "per_ring": 8}, "parallel": 1},
    "counterexample": {"n_values": [2, 4, 8, 16, 32, 64, 128, 256], "parallel": 1},
    "metrics": {"map1": IDENTITY, "map2": IDENTITY, "seed": 0,
                "unit_cr": {"count": 1000},
                "degenerating": {"scales": [1e-1, 3e-2, 1e-2, 3e-3, 1e-3], "count": 50}},
    "das": {"map1": IDENTITY, "map2": IDENTITY, "depth": 8, "thresholds": [0, 1, 2, 3, 4, 5, 6, 7]},
    "lemma3": {"map": IDENTITY, "M": 1.0, "grid": {"radius": 0.5, "rings": 2, "per_ring": 8}},
}


class ConfigError(ValueError):
    pass


def validate(cfg: Dict[str, Any]) -> None:
    try:
        jsonschema.validate(cfg, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config error at {where}: {exc.message}") from None


def load(path: Optional[str]) -> Dict[str, Any]:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


def resolve(command: str, file_cfg: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    """Defaults for ``command`` updated by the config file and then by flags."""
    validate(file_cfg)
    if file_cfg.get("command", command) != command:
        raise ConfigError(f"config is for command {file_cfg['command']!r}, not {command!r}")
    cfg = copy.deepcopy(DEFAULTS[command])
    for k, v in file_cfg.items():
        if isinstance(v, dict) and isinstance(cfg.get(k), dict) and k not in ("map", "map1", "map2"):
            cfg[k] = {**cfg[k], **v}
        else:
            cfg[k] = v
    cfg.update({k: v for k, v in overrides.items() if v is not None})
    seed = cfg.get("seed")
    if command == "metrics":
        for key in ("unit_cr", "degenerating"):
            if overrides.get("seed") is not None:
                cfg[key]["seed"] = seed
            else:
                cfg[key].setdefault("seed", seed)
    cfg["command"] = command
    validate(cfg)
    return cfg


def header(cfg: Dict[str, Any]) -> str:
    return "# " + json.dumps(cfg, sort_keys=True, separators=(",", ":")) + "\n"
