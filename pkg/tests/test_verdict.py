import math
from functools import lru_cache

import pytest

from gendiff.characteristics import CATALOG, builtin
from gendiff.errors import BadParam, BadStart
from gendiff.verdict import (
    R4_REASON,
    ArbitrageDescriptor,
    CompanionDescriptor,
    ConditionEvidence,
    DemoMarket,
    aclmm_decide,
    arbitrage_certificate,
    contradictions,
    na_verdict,
    parse_horizon,
    theorem_consistency,
    verdict_invariant_violations,
)

START_POINTS = {
    "brownian": (-1.0, 0.0, 2.0),
    "sticky_bm": (-1.0, 0.0, 2.0),
    "skew_bm": (-1.0, 0.0, 2.0),
    "absorbed_ito": (0.5, 1.0, 3.0),
    "counterexample_nondc": (-0.5, 1.0, 2.0),
    "counterexample_reflecting": (0.5, 1.0, 2.0),
}
SWEEP = [(n, x0, h) for n in CATALOG for x0 in START_POINTS[n] for h in (1.0, math.inf)]


@lru_cache(maxsize=None)
def verdict(name, x0, horizon):
    return na_verdict(builtin(name), x0, horizon)


def test_parse_horizon():
    assert parse_horizon("inf") == math.inf
    assert parse_horizon(2) == 2.0
    with pytest.raises(BadParam):
        parse_horizon(0)


# ---------------------------------------------------------------- pinned examples


def test_sticky_r1():
    v = verdict("sticky_bm", 0.0, 1.0)
    assert (v.na, v.aclmm, v.na_reason) == ("Holds", "Exists", "R1")
    assert v.aclmm_reason == "P itself"


def test_reflecting_fails_with_aclmm():
    v = verdict("counterexample_reflecting", 1.0, 1.0)
    assert (v.na, v.aclmm) == ("Fails", "Exists")
    assert v.evidence.c3 == "False"
    assert v.certificate == ArbitrageDescriptor("BuyHoldAfterHit", 0.0, "long", 0.0)


def test_nondc_infinite_horizon():
    v = verdict("counterexample_nondc", 1.0, math.inf)
    assert (v.na, v.aclmm) == ("Fails", "NotExists")


def test_nondc_finite_horizon_companion():
    v = verdict("counterexample_nondc", 1.0, 1.0)
    assert (v.na, v.aclmm) == ("Fails", "Exists")
    assert v.evidence.c2 == "False"
    assert isinstance(v.certificate, CompanionDescriptor)
    assert any("pattern rule" in step for step in v.rule_trace)


def test_nondc_from_origin_no_aclmm():
    status, _ = aclmm_decide(builtin("counterexample_nondc"), 0.0, 1.0)
    assert status == "False"
    assert verdict("counterexample_nondc", 0.0, 1.0).aclmm == "NotExists"


def test_aclmm_examples():
    status, desc = aclmm_decide(builtin("counterexample_nondc"), 1.0, 1.0)
    assert status == "True"
    assert desc.speed.atom_at(2.0**-4) == pytest.approx(2.0**4 / 4)
    assert all(v == "Inaccessible" for _, _, v in desc.bad_points_checked)
    for h in (1.0, 7.0, math.inf):
        assert aclmm_decide(builtin("brownian"), 0.0, h)[0] == "True"


def test_skew_is_unknown():
    v = verdict("skew_bm", 0.0, 1.0)
    assert (v.na, v.aclmm) == ("Unknown", "Unknown")
    assert v.na_reason == R4_REASON


def test_certificates():
    assert arbitrage_certificate(DemoMarket(0.1, 1.0), 0.1, 1.0) == ArbitrageDescriptor("PostHitClock", 0.0)
    ev = verdict("counterexample_nondc", 1.0, 1.0).evidence
    assert arbitrage_certificate(builtin("counterexample_nondc"), 1.0, 1.0, ev) is None


def test_bad_start():
    with pytest.raises(BadStart):
        na_verdict(builtin("counterexample_reflecting"), 0.0, 1.0)
    with pytest.raises(BadStart):
        na_verdict(builtin("absorbed_ito"), -1.0, 1.0)


# ---------------------------------------------------------------- theorem consistency


def _ev(c1, c2, c3):
    return ConditionEvidence(c1, "", c2, [], c3, [])


def test_consistency_all_true():
    d = dict(theorem_consistency(_ev("True", "True", "True"), 1.0))
    assert all(d[k] == "True" for k in ("a", "b", "c", "d"))


def test_consistency_c2_false():
    d = dict(theorem_consistency(_ev("True", "False", "True"), 1.0))
    assert d["c"] == "False" and d["a"] == "False"
    assert d["d1"] == "PartiallyDetermined"


def test_consistency_unknown_propagates():
    d = dict(theorem_consistency(_ev("Unknown", "True", "True"), 1.0))
    assert d["a"] == "Unknown"


def test_consistency_flags_contradiction():
    assert contradictions(theorem_consistency(_ev("True", "False", "True"), math.inf)) == ["a", "b"]


# ---------------------------------------------------------------- catalog sweep


@pytest.mark.parametrize("name, x0, horizon", SWEEP)
def test_sweep_invariants(name, x0, horizon):
    v = verdict(name, x0, horizon)
    assert verdict_invariant_violations(v) == []
    assert contradictions(theorem_consistency(v.evidence, horizon, v)) == []
    assert v.rule_trace


@pytest.mark.parametrize("name", CATALOG)
@pytest.mark.parametrize("horizon", [1.0, math.inf])
def test_start_point_invariance(name, horizon):
    decided = {verdict(name, x0, horizon).na for x0 in START_POINTS[name]} - {"Unknown"}
    assert len(decided) <= 1


@pytest.mark.parametrize("name", CATALOG)
def test_horizon_monotonicity(name):
    for x0 in START_POINTS[name]:
        if verdict(name, x0, 1.0).na == "Fails":
            assert verdict(name, x0, 2.0).na == "Fails"
            assert verdict(name, x0, math.inf).na == "Fails"


def test_verdict_json_roundtrip_fields():
    j = verdict("counterexample_reflecting", 1.0, math.inf).to_json()
    assert j["horizon"] == "inf"
    assert j["certificate"]["type"] == "ArbitrageDescriptor"
    assert j["evidence"]["c3_boundaries_ok"]["status"] == "False"
