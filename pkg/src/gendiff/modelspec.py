"""Model-spec documents (YAML or JSON) to :class:`DiffusionModel`.

A document either names a catalog model::

    builtin: sticky_bm
    params: {rho: 2}

or spells out the characteristics::

    label: my_model
    interval: {lower: "-inf", upper: "inf"}
    scale: {variant: skew, params: {alpha: 0.3}}
    speed: {density: lebesgue, atoms: [{x: 0, mass: 2}]}
    boundary: {lower: unspecified, upper: unspecified}

Infinite endpoints are written ``"-inf"``/``"inf"``.  An atom of mass
``"inf"`` at a finite endpoint declares that endpoint absorbing.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import yaml

from .characteristics import (
    ABSORBING,
    CATALOG,
    REFLECTING,
    UNSPECIFIED,
    Coefficient,
    CounterexampleLog,
    DiffusionModel,
    NaturalScale,
    SkewPiecewise,
    SpeedMeasure,
    StateInterval,
    Tabulated,
    _skew_density,
    builtin,
    scale_from_coefficients,
    speed_from_coefficients,
    sticky,
)
from .errors import BadParam, GendiffError, ParseError, ValidationError

SCALE_VARIANTS = {
    "natural": "natural", "NaturalScale": "natural",
    "skew": "skew", "SkewPiecewise": "skew",
    "coefficients": "coefficients", "FromCoefficients": "coefficients",
    "counterexample": "counterexample", "CounterexampleLog": "counterexample",
    "table": "table", "Tabulated": "table",
}


def _real(value, where):
    if isinstance(value, bool):
        raise ParseError(f"expected a number, got {value!r}", where)
    if isinstance(value, str):
        v = value.strip().lower()
        if v in ("inf", "+inf", "infinity"):
            return math.inf
        if v in ("-inf", "-infinity"):
            return -math.inf
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ParseError(f"expected a number, got {value!r}", where) from None


def _mapping(doc, where):
    if not isinstance(doc, dict):
        raise ParseError(f"expected a mapping, got {type(doc).__name__}", where)
    return doc


def _coefficient(doc, where):
    if isinstance(doc, (int, float)) and not isinstance(doc, bool):
        return Coefficient.constant(doc)
    doc = _mapping(doc, where)
    kind = doc.get("kind", "constant")
    try:
        return Coefficient(kind, *(_real(doc.get(k, dflt), f"{where}.{k}") for k, dflt in
                                   (("c", 0.0), ("d", 0.0), ("p", 1.0))))
    except BadParam as exc:
        raise ParseError(str(exc), f"{where}.kind") from None


def _interval(doc):
    doc = _mapping(doc, "interval")
    lo = _real(doc.get("lower", "-inf"), "interval.lower")
    hi = _real(doc.get("upper", "inf"), "interval.upper")
    try:
        return StateInterval(lo, hi, bool(doc.get("lower_included", False)), bool(doc.get("upper_included", False)))
    except GendiffError as exc:
        raise ParseError(str(exc), "interval") from None


def _table(doc, where):
    doc = _mapping(doc, where)
    try:
        grid = [_real(v, f"{where}.grid") for v in doc["grid"]]
        values = [_real(v, f"{where}.values") for v in doc["values"]]
    except KeyError as exc:
        raise ParseError(f"missing {exc.args[0]!r}", where) from None
    return np.asarray(grid), np.asarray(values)


def _scale(doc, iv):
    doc = _mapping(doc, "scale")
    variant = SCALE_VARIANTS.get(doc.get("variant"))
    if variant is None:
        raise ParseError(f"unknown variant {doc.get('variant')!r}", "scale.variant")
    params = _mapping(doc.get("params", {}) or {}, "scale.params")
    try:
        if variant == "natural":
            return NaturalScale(iv), None
        if variant == "skew":
            return SkewPiecewise(_real(params.get("alpha"), "scale.params.alpha"), iv), None
        if variant == "counterexample":
            side = params.get("side", "two-sided")
            s = CounterexampleLog(side)
            return s, None
        if variant == "table":
            grid, values = _table(doc.get("table", params), "scale.table")
            return Tabulated(grid, values, iv), None
        drift = _coefficient(params.get("drift", 0.0), "scale.params.drift")
        vol = _coefficient(params.get("vol", 1.0), "scale.params.vol")
        anchor = _real(params.get("anchor", 0.0), "scale.params.anchor")
        return scale_from_coefficients(drift, vol, iv, anchor), (drift, vol)
    except ParseError:
        raise
    except GendiffError as exc:
        raise ParseError(str(exc), "scale.params") from None


def _speed(doc, scale, coeffs, iv):
    doc = _mapping(doc or {}, "speed")
    atoms, absorbing = [], set()
    for k, a in enumerate(doc.get("atoms", []) or []):
        a = _mapping(a, f"speed.atoms[{k}]")
        x = _real(a.get("x"), f"speed.atoms[{k}].x")
        mass = _real(a.get("mass"), f"speed.atoms[{k}].mass")
        if math.isinf(mass):
            if x not in (iv.lower, iv.upper):
                raise ParseError("infinite mass is only allowed at a finite endpoint", f"speed.atoms[{k}].mass")
            absorbing.add("lower" if x == iv.lower else "upper")
            continue
        atoms.append((x, mass))
    density = doc.get("density", "lebesgue")
    if isinstance(density, dict):
        grid, values = _table(density.get("table", density), "speed.density")
        if np.any(values < 0):
            raise ParseError("density values must be nonnegative", "speed.density")
        base = SpeedMeasure(lambda x: np.interp(x, grid, values), density_spec="table")
    elif density == "lebesgue":
        base = SpeedMeasure()
    elif density == "skew":
        if not isinstance(scale, SkewPiecewise):
            raise ParseError("skew density needs a skew scale", "speed.density")
        base = SpeedMeasure(_skew_density(scale.alpha), density_spec={"skew": scale.alpha})
    elif density == "coefficients":
        if coeffs is None:
            raise ParseError("coefficient density needs a coefficient scale", "speed.density")
        base = speed_from_coefficients(coeffs[0], coeffs[1], scale)
    else:
        raise ParseError(f"unknown density {density!r}", "speed.density")
    try:
        return SpeedMeasure(base.density, tuple(atoms), None, None, base.density_spec), absorbing
    except ValidationError as exc:
        raise ParseError("; ".join(exc.violations), "speed.atoms") from None


def _behavior(value, where):
    if value is None or value == "unspecified":
        return UNSPECIFIED
    if value == "absorbing":
        return ABSORBING
    if value in ("reflecting", "instantaneously_reflecting"):
        return REFLECTING
    if isinstance(value, dict) and "sticky" in value:
        try:
            return sticky(_real(value["sticky"], f"{where}.sticky"))
        except BadParam as exc:
            raise ParseError(str(exc), where) from None
    raise ParseError(f"unknown boundary behavior {value!r}", where)


def model_from_dict(doc) -> DiffusionModel:
    doc = _mapping(doc, "<document>")
    if "builtin" in doc:
        name = doc["builtin"]
        if name not in CATALOG:
            raise ParseError(f"unknown catalog model {name!r}", "builtin")
        params = _mapping(doc.get("params", {}) or {}, "params")
        if name == "absorbed_ito":
            params = {k: (_coefficient(v, f"params.{k}") if k in ("drift", "vol") else
                          _interval(v) if k == "interval" else v) for k, v in params.items()}
        try:
            return builtin(name, **params)
        except BadParam as exc:
            raise ParseError(str(exc), "params") from None
    for key in ("interval", "scale"):
        if key not in doc:
            raise ParseError("missing required field", key)
    iv = _interval(doc["interval"])
    scale, coeffs = _scale(doc["scale"], iv)
    if scale.domain != iv:
        raise ParseError(f"scale lives on {scale.domain}, not on {iv}", "scale")
    speed, absorbing = _speed(doc.get("speed"), scale, coeffs, iv)
    bdoc = _mapping(doc.get("boundary", {}) or {}, "boundary")
    lower = ABSORBING if "lower" in absorbing else _behavior(bdoc.get("lower"), "boundary.lower")
    upper = ABSORBING if "upper" in absorbing else _behavior(bdoc.get("upper"), "boundary.upper")
    # a sticky declaration without a listed atom supplies the atom itself
    for side, beh in (("lower", lower), ("upper", upper)):
        b = iv.endpoint(side)
        if beh.kind == "sticky" and math.isfinite(b) and speed.atom_at(b) == 0:
            speed = speed.with_atom(b, beh.mass)
    return DiffusionModel(iv, scale, speed, lower, upper, label=str(doc.get("label", "custom")))


def parse_model_spec(text: str) -> DiffusionModel:
    """Parse YAML (or JSON, which YAML accepts) text."""
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}, column {mark.column + 1}" if mark else None
        raise ParseError(str(getattr(exc, "problem", exc)), where) from None
    return model_from_dict(doc)


def load_model_spec(path) -> DiffusionModel:
    return parse_model_spec(Path(path).read_text())
