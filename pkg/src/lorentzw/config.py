"""Surface configuration documents (JSON) and their schema."""

import copy
import json
from dataclasses import dataclass, field

import jsonschema
import numpy as np

from .errors import ConfigError
from .nullcurve import from_dict as curve_from_dict
from .surface import WeierstrassSurface

_NUMBER_PAIR = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
_EXPR = {"type": ["string", "number"]}
_AXIS = {
    "type": "array",
    "prefixItems": [{"type": "number"}, {"type": "number"}, {"type": "integer", "minimum": 2}],
    "minItems": 3, "maxItems": 3,
}

_TYPE2 = {
    "type": "object", "additionalProperties": False,
    "required": ["kind", "f", "g", "h", "domain"],
    "properties": {"kind": {"const": "type2"}, "f": _EXPR, "g": _EXPR, "h": _EXPR,
                   "domain": _NUMBER_PAIR, "t0": {"type": "number"}},
}
_TYPE1 = {
    "type": "object", "additionalProperties": False,
    "required": ["kind", "f", "eps", "domain"],
    "properties": {"kind": {"const": "type1"}, "f": _EXPR,
                   "eps": {"type": "array", "items": {"enum": [-1, 1]}, "minItems": 3, "maxItems": 3},
                   "domain": _NUMBER_PAIR, "t0": {"type": "number"}},
}
_REPARAM = {
    "type": "object", "additionalProperties": False,
    "required": ["kind", "base", "sign", "z0", "map"],
    "properties": {
        "kind": {"const": "reparametrized"}, "base": _TYPE2, "sign": {"enum": [-1, 1]},
        "z0": {"type": "number"},
        "map": {"type": "object", "additionalProperties": False, "required": ["z", "t"],
                "properties": {"z": {"type": "array", "items": {"type": "number"}, "minItems": 2},
                               "t": {"type": "array", "items": {"type": "number"}, "minItems": 2}}},
    },
}
_CURVE = {"oneOf": [_TYPE2, _TYPE1, _REPARAM]}

TOLERANCE_DEFAULTS = {
    "quad": 1e-10,
    "singular": 1e-12,
    "classify": 1e-9,
    "rank": 1e-10,
    "canonical": 1e-6,
    "ode": 1e-10,
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object", "additionalProperties": False,
    "required": ["beta", "theta"],
    "properties": {
        "name": {"type": "string"},
        "beta": _CURVE,
        "theta": _CURVE,
        "grid": {"type": "object", "additionalProperties": False, "required": ["u", "v"],
                 "properties": {"u": _AXIS, "v": _AXIS}},
        "pde_region": {"type": "object", "additionalProperties": False, "required": ["u", "v"],
                       "properties": {"u": _NUMBER_PAIR, "v": _NUMBER_PAIR}},
        "tolerances": {"type": "object", "additionalProperties": False,
                       "properties": {k: {"type": "number", "exclusiveMinimum": 0} for k in TOLERANCE_DEFAULTS}},
    },
}

DEFAULT_GRID = {"u": [-1.0, 1.0, 21], "v": [-1.0, 1.0, 21]}


@dataclass
class SurfaceConfig:
    beta: dict
    theta: dict
    grid: dict = field(default_factory=lambda: copy.deepcopy(DEFAULT_GRID))
    tolerances: dict = field(default_factory=dict)
    pde_region: dict = None
    name: str = None

    @classmethod
    def from_dict(cls, doc):
        try:
            jsonschema.validate(doc, SCHEMA)
        except jsonschema.ValidationError as exc:
            where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
            raise ConfigError(f"{where}: {exc.message}") from None
        for key in ("grid", "pde_region"):
            for axis, spec in (doc.get(key) or {}).items():
                if not spec[0] < spec[1]:
                    raise ConfigError(f"{key}/{axis}: lower bound must be below upper bound")
        return cls(
            beta=doc["beta"], theta=doc["theta"],
            grid=copy.deepcopy(doc.get("grid", DEFAULT_GRID)),
            tolerances={**TOLERANCE_DEFAULTS, **doc.get("tolerances", {})},
            pde_region=doc.get("pde_region"), name=doc.get("name"),
        )

    @classmethod
    def load(cls, path):
        try:
            with open(path) as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read {path}: {exc}") from None
        return cls.from_dict(doc)

    def tol(self, key):
        return self.tolerances.get(key, TOLERANCE_DEFAULTS[key])

    def axes(self):
        """The (u, v) grid axes as 1-D arrays."""
        return tuple(np.linspace(*self.grid[k][:2], int(self.grid[k][2])) for k in ("u", "v"))

    def build_surface(self, check=True):
        beta = curve_from_dict(self.beta, check=check)
        theta = curve_from_dict(self.theta, check=check)
        return WeierstrassSurface(beta, theta, name=self.name)

    def to_dict(self):
        doc = {"beta": self.beta, "theta": self.theta, "grid": self.grid}
        if self.name:
            doc["name"] = self.name
        if self.pde_region:
            doc["pde_region"] = self.pde_region
        if self.tolerances:
            doc["tolerances"] = self.tolerances
        return doc
