"""Three-valued NA / ACLMM decisions with evidence, certificates and rule traces."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .boundary import ACCESSIBLE, INACCESSIBLE, classify_boundary, interior_point_accessibility
from .characteristics import DiffusionModel, SpeedMeasure, StateInterval, _num_json, interval_to_json
from .errors import BadParam, BadStart, NotConverged
from .regularity import (
    blowup_points,
    companion_model,
    companion_speed,
    dc_check,
    is_natural_scale,
    kink_points,
    one_sided_derivative,
)

R4_REASON = "deterministic NA criterion of the companion literature not reproduced in this library"
DC_LEVELS = (12, 14, 16, 18)


def parse_horizon(value):
    """``float`` horizon; ``inf`` (or the string "inf") for the infinite horizon."""
    if isinstance(value, str):
        if value.strip().lower() in ("inf", "infinity", "+inf"):
            return math.inf
        value = float(value)
    value = float(value)
    if not value > 0:
        raise BadParam(f"horizon must be positive, got {value}")
    return value


def horizon_to_json(h):
    return "inf" if math.isinf(h) else h


def _and3(*vals):
    if any(v == "False" for v in vals):
        return "False"
    if all(v == "True" for v in vals):
        return "True"
    return "Unknown"


# --------------------------------------------------------------------------
# Evidence
# --------------------------------------------------------------------------


@dataclass
class ArbitrageDescriptor:
    kind: str  # BuyHoldAfterHit | PostHitClock
    level: float
    direction: str = "long"
    admissibility_bound: float = 0.0

    def to_json(self):
        out = {"kind": self.kind, "level": self.level, "admissibility_bound": self.admissibility_bound}
        if self.kind == "BuyHoldAfterHit":
            out["direction"] = self.direction
        return out


@dataclass
class CompanionDescriptor:
    speed: SpeedMeasure
    interval: StateInterval
    absorbed: list
    bad_points_checked: list  # (point, from_side, verdict)
    note: str = "candidate ACLMM: the natural-scale law with the companion speed"

    def to_json(self):
        return {
            "interval": interval_to_json(self.interval),
            "speed": {"density": self.speed.density_spec,
                      "atoms": [{"x": x, "mass": w} for x, w in self.speed.atoms],
                      "atom_series": self.speed.series.label if self.speed.series else None},
            "absorbed": [_num_json(b) for b in self.absorbed],
            "checked_points": [{"point": _num_json(p), "from_side": s, "verdict": v}
                               for p, s, v in self.bad_points_checked],
            "note": self.note,
        }


@dataclass
class ConditionEvidence:
    c1: str  # True | False | Unknown
    c1_witness: str
    c2: str  # True | False | Inconclusive
    dc_reports: list
    c3: str  # True | False
    boundaries: list
    bad_points: list = field(default_factory=list)

    def to_json(self):
        return {
            "c1_aclmm_exists": {"status": self.c1, "witness": self.c1_witness},
            "c2_scale_dc": {"status": self.c2, "reports": [r.to_json() for r in self.dc_reports]},
            "c3_boundaries_ok": {"status": self.c3, "boundaries": [b.to_json() for b in self.boundaries]},
            "bad_points": [_num_json(p) for p in self.bad_points],
        }


@dataclass
class Verdict:
    horizon: float
    x0: float
    na: str  # Holds | Fails | Unknown
    aclmm: str  # Exists | NotExists | Unknown
    evidence: ConditionEvidence
    certificate: object = None
    rule_trace: list = field(default_factory=list)
    na_reason: str = ""
    aclmm_reason: str = ""
    model_label: str = ""

    def to_json(self):
        return {
            "model": self.model_label,
            "horizon": horizon_to_json(self.horizon),
            "x0": self.x0,
            "na": {"status": self.na, "reason": self.na_reason},
            "aclmm": {"status": self.aclmm, "reason": self.aclmm_reason},
            "evidence": self.evidence.to_json(),
            "certificate": None if self.certificate is None else {
                "type": type(self.certificate).__name__, **self.certificate.to_json()},
            "rule_trace": list(self.rule_trace),
        }


class DemoMarket:
    """Non-Markov demo market: ``dY = -dt + Y dW`` until ``Y`` first hits 0,
    then ``dY = dt``.  Only used for the post-hit clock certificate."""

    label = "demo_25"

    def __init__(self, x0=0.1, horizon=1.0):
        if not x0 > 0:
            raise BadParam("demo market needs x0 > 0")
        self.x0, self.horizon = float(x0), parse_horizon(horizon)


# --------------------------------------------------------------------------
# Condition checks
# --------------------------------------------------------------------------


def _dc_windows(model: DiffusionModel, x0: float):
    """Increasing compact windows around ``x0`` exhausting the interior."""
    iv = model.interval
    out = []
    for k in range(3):
        if math.isfinite(iv.lower):
            lo = iv.lower + (x0 - iv.lower) * 2.0 ** -(k + 1)
        else:
            lo = x0 - 2.0 ** k
        if math.isfinite(iv.upper):
            hi = iv.upper - (iv.upper - x0) * 2.0 ** -(k + 1)
        else:
            hi = x0 + 2.0 ** k
        out.append((lo, hi))
    return out


def scale_dc(model: DiffusionModel, x0: float):
    """``(status, reports)`` for the dc property of ``s`` on the interior.

    Stops at the first window certified NotDc; an Inconclusive window is
    retried on finer grids before it is reported.
    """
    reports = []
    status = "True"
    for window in _dc_windows(model, x0):
        for levels in DC_LEVELS:
            rep = dc_check(model.scale, window, levels=levels)
            if rep.verdict != "Inconclusive":
                break
        reports.append(rep)
        if rep.verdict == "NotDc":
            return "False", reports
        if rep.verdict == "Inconclusive":
            status = "Inconclusive"
    return status, reports


def _boundaries_ok(classes):
    for c in classes:
        if math.isfinite(c.point) and c.accessibility == ACCESSIBLE and c.behavior != "Absorbing":
            return "False"
    return "True"


def _is_blowup(scale, x):
    for side in ("right", "left"):
        try:
            if math.isinf(one_sided_derivative(scale, x, side)):
                return True
        except NotConverged:
            pass
    return False


def _companion_pattern(model, x0, bad, boundaries):
    """Finite-horizon pattern: every point the companion must avoid is
    inaccessible for it from ``x0``'s side.

    Returns ``(ok, descriptor, reason)``.
    """
    kinks = kink_points(model.scale, exclude=tuple(bad))
    if kinks:
        return False, None, f"pattern rule not applicable: s'_+ jumps at {kinks}"
    mt = companion_speed(model)
    iv = model.interval
    lo = max([p for p in bad if p < x0], default=iv.lower)
    hi = min([p for p in bad if p > x0], default=iv.upper)
    checked, absorbed = [], []
    by_side = {c.side: c for c in boundaries}
    comp = companion_model(model, x0, bad)
    for end, side, from_side in ((lo, "lower", "above"), (hi, "upper", "below")):
        if end in bad:
            res = interior_point_accessibility(mt, end, from_side, x0).verdict
        else:
            orig = by_side[side]
            cc = classify_boundary(comp, side, stipulate_absorbing=True)
            if orig.accessibility == ACCESSIBLE and orig.behavior == "Absorbing":
                if cc.accessibility == ACCESSIBLE:
                    absorbed.append(end)
                checked.append((end, from_side, cc.accessibility))
                continue
            res = cc.accessibility
        checked.append((end, from_side, res))
        if res != INACCESSIBLE:
            return False, None, f"companion can reach {end} from {from_side}"
    desc = CompanionDescriptor(comp.speed, comp.interval, absorbed, checked)
    return True, desc, "pattern rule"


def _aclmm(model, x0, horizon, natural, c2, c3, bad, boundaries):
    trace = []
    if _is_blowup(model.scale, x0):
        trace.append("A0: x0 is a blow-up point of s'_+; an ACLMM would force (d), which fails")
        return "False", None, trace, "x0 is a blow-up point of s'_+"
    if natural and c3 == "True":
        trace.append("A1: natural scale and boundaries ok; P itself is a local martingale measure")
        return "True", None, trace, "P itself"
    if math.isfinite(horizon):
        ok, desc, reason = _companion_pattern(model, x0, bad, boundaries)
        if ok:
            trace.append("A2 (pattern rule): all bad points and non-absorbing boundaries are companion-inaccessible")
            return "True", desc, trace, "companion law (pattern rule)"
        trace.append(f"A2 skipped: {reason}")
    elif c2 == "False" or c3 == "False":
        trace.append("A3: infinite horizon with c2 or c3 false; no ACLMM by the infinite-horizon equivalence")
        return "False", None, trace, "infinite-horizon equivalence"
    trace.append("A4: undecided")
    return "Unknown", None, trace, "undecided by the implemented rules"


def _check_start(model, x0):
    if not model.interval.in_interior(x0):
        raise BadStart(f"x0={x0} is not in the interior {model.interval}")


def _conditions(model, x0, horizon):
    boundaries = [classify_boundary(model, "lower"), classify_boundary(model, "upper")]
    c3 = _boundaries_ok(boundaries)
    c2, reports = scale_dc(model, x0)
    natural = is_natural_scale(model.scale)
    bad = [] if natural else blowup_points(model.scale)
    c1, desc, trace, witness = _aclmm(model, x0, horizon, natural, c2, c3, bad, boundaries)
    ev = ConditionEvidence(c1, witness, c2, reports, c3, boundaries, bad)
    return ev, natural, desc, trace


def aclmm_decide(model: DiffusionModel, x0: float, horizon):
    """``(status, companion descriptor or None)`` for the existence of an ACLMM."""
    horizon = parse_horizon(horizon)
    _check_start(model, x0)
    ev, _, desc, _ = _conditions(model, x0, horizon)
    return ev.c1, desc


def arbitrage_certificate(model, x0, horizon, evidence=None):
    """Constructive arbitrage for reflecting boundaries and the demo market."""
    if isinstance(model, DemoMarket):
        return ArbitrageDescriptor("PostHitClock", 0.0, "long", 0.0)
    if evidence is None:
        return None
    for c in evidence.boundaries:
        if c.accessibility == ACCESSIBLE and c.behavior in ("InstantaneouslyReflecting", "StickyReflecting"):
            direction = "long" if c.side == "lower" else "short"
            return ArbitrageDescriptor("BuyHoldAfterHit", float(c.point), direction, 0.0)
    return None


def na_verdict(model: DiffusionModel, x0: float, horizon) -> Verdict:
    horizon = parse_horizon(horizon)
    _check_start(model, x0)
    ev, natural, desc, trace = _conditions(model, x0, horizon)
    c1, c2, c3 = ev.c1, ev.c2, ev.c3
    cert = None
    if natural and c3 == "True":
        na, aclmm, na_reason, ac_reason = "Holds", "Exists", "R1", "P itself"
        trace.append("R1: natural scale and every finite boundary inaccessible or absorbing")
    elif c1 == "False" or c2 == "False" or c3 == "False":
        failed = [n for n, v in (("c1", c1), ("c2", c2), ("c3", c3)) if v == "False"]
        na, na_reason = "Fails", f"R2: {', '.join(failed)} false"
        trace.append(f"R2: {', '.join(failed)} false, so NA fails")
        if math.isinf(horizon):
            aclmm, ac_reason = "NotExists", "infinite-horizon equivalence"
            trace.append("R2: infinite horizon, so no ACLMM")
        else:
            aclmm, ac_reason = {"True": ("Exists", ev.c1_witness), "False": ("NotExists", ev.c1_witness),
                                "Unknown": ("Unknown", ev.c1_witness)}[c1]
        cert = arbitrage_certificate(model, x0, horizon, ev)
    elif c1 == "True" and c2 == "True" and c3 == "True":
        na, aclmm, na_reason, ac_reason = "Holds", "Exists", "R3", ev.c1_witness
        trace.append("R3: c1, c2 and c3 hold")
    else:
        na, na_reason = "Unknown", R4_REASON
        aclmm, ac_reason = ("Exists", ev.c1_witness) if c1 == "True" else ("Unknown", ev.c1_witness)
        trace.append("R4: undecided")
    if cert is None and desc is not None:
        cert = desc
    return Verdict(horizon, float(x0), na, aclmm, ev, cert, trace, na_reason, ac_reason, model.label)


# --------------------------------------------------------------------------
# Consistency with the equivalences
# --------------------------------------------------------------------------


def theorem_consistency(evidence: ConditionEvidence, horizon, verdict: Verdict | None = None):
    """Statuses of the theorem's statements derivable from ``evidence``.

    Each entry is ``(statement, status)`` with status True, False, Unknown,
    PartiallyDetermined or Contradiction.
    """
    horizon = parse_horizon(horizon)
    c1 = evidence.c1
    c2 = {"True": "True", "False": "False"}.get(evidence.c2, "Unknown")
    c3 = evidence.c3
    c = _and3(c1, c2, c3)
    out = [("c1", c1), ("c2", c2), ("c3", c3), ("c", c)]
    if c == "True":
        d1 = "True"
    elif c1 == "False":
        d1 = "False"
    elif c1 == "True" and c == "False":
        # an ACLMM at this x0 does not settle the "for all x0" clause
        d1 = "PartiallyDetermined"
    else:
        d1 = "Unknown"
    d = c  # (c) and (d) are equivalent
    a = c
    if math.isinf(horizon):
        # infinite horizon: NA holds iff an ACLMM exists
        if c1 != "Unknown" and c != "Unknown" and c1 != c:
            a = "Contradiction"
        elif c == "Unknown":
            a = c1
    out += [("a", a), ("b", a), ("d1", d1), ("d2", c3), ("d", d)]
    if verdict is not None:
        na = {"Holds": "True", "Fails": "False"}.get(verdict.na, "Unknown")
        status = "True"
        if na != "Unknown" and a in ("True", "False") and na != a:
            status = "Contradiction"
        ac = {"Exists": "True", "NotExists": "False"}.get(verdict.aclmm, "Unknown")
        if ac != "Unknown" and c1 != "Unknown" and ac != c1:
            status = "Contradiction"
        out.append(("verdict", status))
    return out


def contradictions(entries):
    return [name for name, status in entries if status == "Contradiction"]


def verdict_invariant_violations(v: Verdict):
    """Propositional checks of a verdict against the two theorems."""
    ev, out = v.evidence, []
    if math.isfinite(v.horizon):
        if v.na == "Holds" and not (v.aclmm == "Exists" and ev.c2 == "True" and ev.c3 == "True"):
            out.append("na Holds without aclmm Exists, c2 and c3")
        if ev.c1 == "True" and ev.c2 == "True" and ev.c3 == "True" and v.na != "Holds":
            out.append("c1, c2, c3 hold but na is not Holds")
    else:
        if v.na != "Unknown" and v.aclmm != "Unknown" and (v.na == "Holds") != (v.aclmm == "Exists"):
            out.append("infinite horizon: na and aclmm disagree")
    if (ev.c2 == "False" or ev.c3 == "False") and v.na != "Fails":
        out.append("c2 or c3 false but na is not Fails")
    if v.na == "Fails" and any(b.accessibility == ACCESSIBLE and b.behavior in
                               ("InstantaneouslyReflecting", "StickyReflecting") for b in ev.boundaries):
        if not isinstance(v.certificate, ArbitrageDescriptor):
            out.append("reflecting boundary without an arbitrage certificate")
    out += [f"theorem: {n}" for n in contradictions(theorem_consistency(ev, v.horizon, v))]
    return out
