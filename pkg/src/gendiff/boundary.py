"""Accessibility and behavior of boundary points and interior bad points."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._numerics import MAX_SHELLS, quad, series_diverges, shells_toward
from .characteristics import DiffusionModel, SpeedMeasure, _num_json
from .errors import BadParam, NeedsDeclaration

ACCESSIBLE = "Accessible"
INACCESSIBLE = "Inaccessible"


@dataclass
class BoundaryClassification:
    point: float
    side: str
    accessibility: str
    behavior: str  # Absorbing | InstantaneouslyReflecting | StickyReflecting | NotApplicable
    integral_estimate: float
    scale_limit: float
    mass: float | None = None
    evidence: list = field(default_factory=list)  # (shell_edge, partial_sum) from far to near
    note: str = ""

    def to_json(self):
        behavior = {"kind": self.behavior, "mass": self.mass} if self.behavior == "StickyReflecting" else self.behavior
        return {
            "side": self.side,
            "point": _num_json(self.point),
            "accessibility": self.accessibility,
            "behavior": behavior,
            "integral_estimate": _num_json(self.integral_estimate),
            "scale_limit": _num_json(self.scale_limit),
            "evidence": [{"shell_edge": _num_json(e), "partial_sum": _num_json(p)} for e, p in self.evidence],
            "note": self.note,
        }


def _continuous(speed: SpeedMeasure, weight, lo, hi, points=None):
    """Plain quadrature of ``weight`` against the continuous part over ``[lo, hi]``."""
    if hi <= lo:
        return 0.0
    if speed.stieltjes is None:
        def fn(x):
            return float(weight(x) * speed.density(x))

        return quad(fn, lo, hi, points)
    s = speed.stieltjes

    def fn_v(v):
        x = s.inverse(v)
        with np.errstate(all="ignore"):
            return float(np.nan_to_num(weight(x) * speed.density(x)))

    return quad(fn_v, float(s(lo)), float(s(hi)))


def reference_point(iv):
    """A fixed interior point of the interval."""
    lo, hi = iv.lower, iv.upper
    if math.isfinite(lo) and math.isfinite(hi):
        return 0.5 * (lo + hi)
    if math.isfinite(lo):
        return lo + max(1.0, abs(lo))
    if math.isfinite(hi):
        return hi - max(1.0, abs(hi))
    return 0.0


def scale_limit(scale, b, shells=None, start=None):
    """``s(b)`` as a limit along geometric shells; ``+-inf`` when the increments diverge."""
    if math.isfinite(b) and scale.domain.contains(b):
        return float(scale(b))
    if shells is None:
        shells = shells_toward(b, start)
    edges = np.array([shells[0][1]] + [near for near, _ in shells])
    with np.errstate(all="ignore"):
        vals = np.asarray(scale(edges), dtype=float)
    if not np.all(np.isfinite(vals)):
        return math.copysign(math.inf, vals[-1] - vals[0])
    steps = np.abs(np.diff(vals))
    if series_diverges(steps):
        return math.copysign(math.inf, vals[-1] - vals[0])
    if math.isfinite(b):
        # geometric increments: remove one more step of the tail
        return float(vals[-1] - (vals[-2] - vals[-1]))
    return float(vals[-1])


def _shell_terms(model, b, c, sb, n_shells):
    """Per-shell contributions to ``int |s(x) - s(b)| m(dx)`` from far to near."""
    scale, speed = model.scale, model.speed
    pts = list(scale.special_points())

    def weight(x):
        return np.abs(np.asarray(scale(x), dtype=float) - sb)

    shells = shells_toward(b, c, n_shells)
    terms, edges = [], []
    for near, far in shells:
        lo, hi = min(near, far), max(near, far)
        cont = _continuous(speed, weight, lo, hi, pts)
        # atoms in the half-open shell, closed on the far side
        closed = (False, True) if near < far else (True, False)
        locs, masses = speed.atoms_in(lo, hi, closed)
        atoms = math.fsum((weight(locs) * masses).tolist()) if locs.size else 0.0
        terms.append(cont + atoms)
        edges.append(near)
    tip = 0.0
    if math.isfinite(b):
        near = shells[-1][0]
        lo, hi = min(b, near), max(b, near)
        closed = (False, True) if b < near else (True, False)
        locs, masses = speed.atoms_in(lo, hi, closed)
        if locs.size:
            order = np.argsort(np.abs(locs - b))[::-1]
            atom_terms = (weight(locs) * masses)[order]
            if series_diverges(np.concatenate([terms, atom_terms])):
                return terms, edges, math.inf
            tip += math.fsum(atom_terms.tolist())
        x_in = 0.5 * (b + near)
        with np.errstate(all="ignore"):
            dens = float(np.asarray(speed.density_at(x_in)))
            t = float(weight(x_in)) * dens * abs(near - b)
        if math.isfinite(t):
            tip += t
    return terms, edges, tip


def classify_boundary(model: DiffusionModel, side: str, n_shells=MAX_SHELLS, stipulate_absorbing=False) -> BoundaryClassification:
    """Feller-type accessibility test in scale coordinates.

    ``b`` is inaccessible when ``s(b)`` is infinite or when
    ``int |s(x) - s(b)| m(dx)`` diverges near ``b``.  For an accessible ``b``
    the behavior comes from the declaration, else from an atom at ``b``.
    With ``stipulate_absorbing`` an undeclared accessible point is reported
    absorbing instead of raising.
    """
    if side not in ("lower", "upper"):
        raise BadParam(f"side must be lower or upper, got {side!r}")
    b = model.interval.endpoint(side)
    c = reference_point(model.interval)
    shells = shells_toward(b, c, n_shells)
    sb = scale_limit(model.scale, b, shells)
    if math.isinf(sb):
        return BoundaryClassification(b, side, INACCESSIBLE, "NotApplicable", math.inf, sb,
                                      note="scale image of the point is infinite")
    terms, edges, tip = _shell_terms(model, b, c, sb, n_shells)
    partial = np.cumsum(terms)
    evidence = list(zip(edges, partial.tolist()))
    if math.isinf(tip) or not np.all(np.isfinite(terms)) or series_diverges(terms):
        return BoundaryClassification(b, side, INACCESSIBLE, "NotApplicable", math.inf, sb, evidence=evidence,
                                      note="speed integral in scale coordinates diverges")
    total = math.fsum(terms) + tip
    if not math.isfinite(b):
        # finite s(+-inf) with finite integral: accessible in finite time, no declaration possible
        return BoundaryClassification(b, side, ACCESSIBLE, "Absorbing", total, sb, evidence=evidence,
                                      note="infinite point with finite scale image; treated as absorbing")
    beh = model.behavior(side)
    atom = model.speed.atom_at(b)
    if beh.kind == "absorbing":
        kind, mass, note = "Absorbing", None, "declared"
    elif beh.kind == "reflecting":
        kind, mass, note = "InstantaneouslyReflecting", None, "declared; no atom at the boundary"
    elif beh.kind == "sticky":
        kind, mass, note = "StickyReflecting", beh.mass, "declared"
    elif atom > 0:
        kind, mass, note = "StickyReflecting", atom, "atom at the boundary"
    elif stipulate_absorbing:
        kind, mass, note = "Absorbing", None, "stipulated"
    else:
        raise NeedsDeclaration(f"{side} boundary {b} is accessible but its behavior is not declared")
    return BoundaryClassification(b, side, ACCESSIBLE, kind, total, sb, mass, evidence, note)


@dataclass
class PointAccessibility:
    point: float
    from_side: str
    verdict: str
    atom_partial_sums: list
    continuous_integral: float

    def to_json(self):
        return {
            "point": self.point,
            "from_side": self.from_side,
            "verdict": self.verdict,
            "atom_partial_sums": self.atom_partial_sums[:64],
            "continuous_integral": _num_json(self.continuous_integral),
        }


def interior_point_accessibility(speed: SpeedMeasure, c: float, from_side: str, x0: float, eps=None) -> PointAccessibility:
    """Whether a natural-scale diffusion with speed ``speed`` started at ``x0``
    can reach ``c``, from the given side.

    Evaluates ``int |x - c| m(dx)`` over the open ``(c, c + eps)`` (above)
    or ``(c - eps, c)`` (below).  Atom terms are summed from far to near and
    reported as partial sums.
    """
    if from_side not in ("above", "below"):
        raise BadParam(f"from_side must be above or below, got {from_side!r}")
    if eps is None:
        eps = min(1.0, abs(x0 - c)) if x0 != c else 1.0
    lo, hi = (c, c + eps) if from_side == "above" else (c - eps, c)
    locs, masses = speed.atoms_in(lo, hi, (False, False))
    dist = np.abs(locs - c)
    order = np.argsort(dist, kind="stable")[::-1]
    terms = (dist * masses)[order]
    partial = np.cumsum(terms).tolist()
    cont_speed = SpeedMeasure(speed.density, (), None, speed.stieltjes, speed.density_spec)
    cont = cont_speed.integrate(lambda x: np.abs(np.asarray(x, dtype=float) - c), lo, hi)
    diverges = math.isinf(cont) or (terms.size > 0 and series_diverges(terms))
    return PointAccessibility(c, from_side, INACCESSIBLE if diverges else ACCESSIBLE, partial, cont)
