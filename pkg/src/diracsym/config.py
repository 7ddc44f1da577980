"""JSON scenario configs: schemas, loading and conversion to solver objects."""

from __future__ import annotations

import json
from pathlib import Path

import jsonschema
import numpy as np

from . import radial, slab
from .catalog import build_candidate
from .errors import UsageError

_NUM = {"type": "number"}
_AXIS = {"oneOf": [{"type": "string"},
                   {"type": "array", "items": {"type": ["number", "string"]},
                    "minItems": 3, "maxItems": 3}]}
_SHAPE = {
    "type": "object",
    "properties": {
        "form": {"enum": ["quadratic", "gauss_well", "gauss", "linear", "constant", "zero",
                          "table"]},
        "params": {"type": "object", "additionalProperties": _NUM},
        "samples": {"type": "array", "items": _NUM},
    },
    "required": ["form"],
    "additionalProperties": False,
}

SLAB_PROPERTIES = {
    "grid": {
        "type": "object",
        "properties": {
            "n": {"type": "integer", "minimum": 64},
            "L": {"type": "number", "exclusiveMinimum": 0},
            "boundary": {"enum": ["periodic", "box"]},
            "coordinate": {"enum": ["x", "z"]},
        },
        "required": ["n", "L"],
        "additionalProperties": False,
    },
    "coupling": {
        "type": "object",
        "properties": {"kind": {"type": "string"}, "axis": _AXIS},
        "required": ["kind"],
        "additionalProperties": False,
    },
    "scenario": {
        "type": "object",
        "properties": {
            "type": {"enum": ["spin", "pseudospin", "broken"]},
            "base": {"enum": ["spin", "pseudospin"]},
            "C": _NUM,
            "mass": _NUM,
            "strength": _NUM,
            "shape": _SHAPE,
        },
        "required": ["type"],
        "additionalProperties": False,
    },
    "potential": _SHAPE,
    "transverse_k": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2},
    "window": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2},
    "pairing_tolerance": {"type": "number", "exclusiveMinimum": 0},
}
_SLAB_REQUIRED = ["grid", "coupling", "scenario", "potential", "window"]


def _schema(props, required):
    return {"type": "object", "properties": props, "required": required,
            "additionalProperties": False}


SOLVE1D_SCHEMA = _schema(SLAB_PROPERTIES, _SLAB_REQUIRED)

SCAN_SCHEMA = _schema({**SLAB_PROPERTIES,
                       "strengths": {"type": "array", "items": _NUM, "minItems": 2}},
                      _SLAB_REQUIRED + ["strengths"])

ORACLE_SCHEMA = _schema({
    **SLAB_PROPERTIES,
    "level_count": {"type": "integer", "minimum": 1},
    "tolerance": {"type": "number", "exclusiveMinimum": 0},
    "oracle": {
        "type": "object",
        "properties": {
            "samples": {"type": "integer", "minimum": 2},
            "kinetic": {"enum": ["fd2", "fd4", "fd6", "fd8", "consistent"]},
            "extra_levels": {"type": "integer", "minimum": 0},
        },
        "additionalProperties": False,
    },
}, _SLAB_REQUIRED)

_RADIAL_POT = {
    "type": "object",
    "properties": {
        "form": {"enum": ["quadratic", "woods_saxon", "constant", "zero", "table"]},
        "params": {"type": "object", "additionalProperties": _NUM},
        "r": {"type": "array", "items": _NUM},
        "values": {"type": "array", "items": _NUM},
    },
    "required": ["form"],
    "additionalProperties": False,
}

RADIAL_SCHEMA = _schema({
    "m": _NUM,
    "symmetry": {"enum": ["spin", "pseudospin", "none"]},
    "sigma": _RADIAL_POT,
    "delta": _RADIAL_POT,
    "kappas": {"type": "array", "items": {"type": "integer", "not": {"const": 0}},
               "minItems": 1},
    "r_max": {"type": "number", "exclusiveMinimum": 0},
    "r_min": {"type": "number", "exclusiveMinimum": 0},
    "n_points": {"type": "integer", "minimum": 100},
    "window": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2},
    "samples": {"type": "integer", "minimum": 2},
    "doublet_mode": {"enum": ["spin", "pseudospin"]},
    "control_threshold": {"type": "number", "minimum": 0},
}, ["m", "symmetry", "sigma", "delta", "kappas", "r_max", "window"])


def load(path, schema) -> dict:
    """Read and validate a JSON config; every problem surfaces as UsageError."""
    p = Path(path)
    try:
        doc = json.loads(p.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise UsageError(f"config file not found: {p}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {p} is not valid JSON: {exc}") from None
    validate(doc, schema)
    return doc


def validate(doc, schema) -> None:
    err = jsonschema.exceptions.best_match(jsonschema.Draft202012Validator(schema).iter_errors(doc))
    if err is not None:
        where = "/".join(str(x) for x in err.absolute_path) or "<root>"
        raise UsageError(f"schema error at {where}: {err.message}")


# --------------------------------------------------------------------------
# slab configs


DEFAULT_BREAKING_SHAPE = {"form": "gauss", "params": {"depth": 1.0, "width": 2.0,
                                                       "center": 1.0}}


def build_slab(cfg: dict):
    """``(grid, coupling, profile, transverse_k, window, breaking_shape)``.

    ``breaking_shape`` is ``(samples, derivative)`` taken from
    ``scenario.shape`` or the default off-centre gaussian.
    """
    g = cfg["grid"]
    grid = slab.Grid1D(g["n"], float(g["L"]), g.get("boundary", "periodic"),
                       g.get("coordinate", "z"))
    c = cfg["coupling"]
    coupling = build_candidate(c["kind"], c.get("axis"))
    pot = cfg["potential"]
    f, df = slab.potential_form(grid, pot["form"], pot.get("params"), pot.get("samples"))
    sc = cfg["scenario"]
    kind = sc["type"]
    base = sc.get("base", "spin") if kind == "broken" else kind
    if kind != "broken" and "base" in sc:
        raise UsageError("scenario.base only applies to broken scenarios")
    shape_cfg = sc.get("shape", DEFAULT_BREAKING_SHAPE)
    shape, dshape = slab.potential_form(grid, shape_cfg["form"], shape_cfg.get("params"),
                                        shape_cfg.get("samples"))
    profile = slab.make_profile(grid, f, df, scenario=base, C=float(sc.get("C", 0.0)),
                                mass=float(sc.get("mass", 0.0)), coupling=coupling)
    if kind == "broken":
        profile = profile.broken(float(sc.get("strength", 0.0)), shape, dshape)
    elif "strength" in sc:
        raise UsageError("scenario.strength only applies to broken scenarios")
    k = tuple(float(x) for x in cfg.get("transverse_k", (0.0, 0.0)))
    window = tuple(float(x) for x in cfg["window"])
    if not window[1] > window[0]:
        raise UsageError("window must satisfy Emin < Emax")
    return grid, coupling, profile, k, window, (shape, dshape)


# --------------------------------------------------------------------------
# radial configs


def radial_potential(spec: dict):
    form = spec["form"]
    params = spec.get("params", {})
    try:
        if form == "quadratic":
            return radial.quadratic(params.get("a", 1.0))
        if form == "woods_saxon":
            return radial.woods_saxon(params["depth"], params["radius"], params["diffuseness"])
        if form == "constant":
            return radial.constant(params.get("value", 0.0))
        if form == "zero":
            return radial.constant(0.0)
        if form == "table":
            return radial.tabulated(spec.get("r", []), spec.get("values", []))
    except KeyError as exc:
        raise UsageError(f"radial potential {form!r} needs parameter {exc.args[0]!r}") from None
    raise UsageError(f"unknown radial potential form {form!r}")


def build_radial(cfg: dict):
    pots = radial.RadialPotentials(float(cfg["m"]), radial_potential(cfg["sigma"]),
                                   radial_potential(cfg["delta"]), cfg["symmetry"])
    grid = radial.RadialGrid(float(cfg["r_max"]), int(cfg.get("n_points", 20000)),
                             float(cfg.get("r_min", 1e-6)))
    window = tuple(float(x) for x in cfg["window"])
    if not window[1] > window[0]:
        raise UsageError("window must satisfy Emin < Emax")
    return pots, grid, window


def well_depth(pots, grid) -> float:
    r = grid.r
    return float(np.max(np.abs(pots.sigma(r))))
