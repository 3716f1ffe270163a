import math

import numpy as np
import pytest

from gendiff.boundary import (
    ACCESSIBLE,
    INACCESSIBLE,
    classify_boundary,
    interior_point_accessibility,
    scale_limit,
)
from gendiff.characteristics import (
    ABSORBING,
    CATALOG,
    DiffusionModel,
    NaturalScale,
    SpeedMeasure,
    StateInterval,
    builtin,
    lebesgue_speed,
    sticky,
)
from gendiff.errors import BadParam, NeedsDeclaration
from gendiff.regularity import companion_model

HALF = StateInterval(0.0, math.inf, True)


def _half_line_bm(lower, atoms=()):
    return DiffusionModel(HALF, NaturalScale(HALF), lebesgue_speed(atoms), lower=lower)


def test_nondc_infinite_ends_inaccessible():
    m = builtin("counterexample_nondc")
    lo, hi = classify_boundary(m, "lower"), classify_boundary(m, "upper")
    assert lo.accessibility == hi.accessibility == INACCESSIBLE
    assert lo.scale_limit == -math.inf and hi.scale_limit == math.inf
    assert lo.behavior == hi.behavior == "NotApplicable"


def test_reflecting_origin():
    c = classify_boundary(builtin("counterexample_reflecting"), "lower")
    assert c.accessibility == ACCESSIBLE
    assert c.behavior == "InstantaneouslyReflecting"
    assert 0 < c.integral_estimate < math.inf


def test_gbm_type_origin_inaccessible():
    c = classify_boundary(builtin("absorbed_ito"), "lower")
    assert c.accessibility == INACCESSIBLE
    assert math.isfinite(c.scale_limit)
    # log divergence: shell contributions settle to a constant, so partial sums grow linearly
    partial = np.array([p for _, p in c.evidence])
    steps = np.diff(partial)
    assert np.all(steps > 0) and steps[-1] > 0.5 * steps[len(steps) // 2]


@pytest.mark.parametrize("lower, expected", [
    (ABSORBING, "Absorbing"),
    (sticky(1.5), "StickyReflecting"),
])
def test_declared_behavior(lower, expected):
    atoms = [(0.0, lower.mass)] if lower.kind == "sticky" else []
    c = classify_boundary(_half_line_bm(lower, atoms), "lower")
    assert c.accessibility == ACCESSIBLE and c.behavior == expected
    if expected == "StickyReflecting":
        assert c.mass == 1.5
        assert c.to_json()["behavior"] == {"kind": "StickyReflecting", "mass": 1.5}


def test_atom_without_declaration_is_sticky():
    c = classify_boundary(_half_line_bm(sticky(2.0), [(0.0, 2.0)]), "lower")
    assert c.behavior == "StickyReflecting"


def test_needs_declaration():
    iv = StateInterval(0.0, 1.0)
    m = DiffusionModel(iv, NaturalScale(iv), lebesgue_speed())
    with pytest.raises(NeedsDeclaration):
        classify_boundary(m, "lower")
    assert classify_boundary(m, "upper", stipulate_absorbing=True).behavior == "Absorbing"


def test_bm_integral_on_unit_interval():
    # int_0^1/2 x dx = 1/8 from the reference point 1/2
    iv = StateInterval(0.0, 1.0)
    m = DiffusionModel(iv, NaturalScale(iv), lebesgue_speed(), lower=ABSORBING, upper=ABSORBING)
    c = classify_boundary(m, "lower")
    assert c.integral_estimate == pytest.approx(0.125, rel=1e-6)


def test_symmetry_of_nondc():
    m = builtin("counterexample_nondc")
    a, b = classify_boundary(m, "lower"), classify_boundary(m, "upper")
    assert (a.accessibility, a.behavior) == (b.accessibility, b.behavior)


@pytest.mark.parametrize("name", CATALOG)
def test_not_applicable_iff_inaccessible(name):
    m = builtin(name)
    for side in ("lower", "upper"):
        c = classify_boundary(m, side, stipulate_absorbing=True)
        assert (c.behavior == "NotApplicable") == (c.accessibility == INACCESSIBLE)
        if math.isinf(c.scale_limit):
            assert c.accessibility == INACCESSIBLE


def test_bad_side():
    with pytest.raises(BadParam):
        classify_boundary(builtin("brownian"), "left")


def test_scale_limit_finite_excluded_endpoint():
    s = builtin("absorbed_ito").scale
    assert scale_limit(s, 0.0, start=1.0) == pytest.approx(-1.0, abs=1e-6)


# ---------------------------------------------------------------- interior points


def _companion():
    return companion_model(builtin("counterexample_nondc"), 1.0)


def test_companion_origin_inaccessible_harmonic_partial_sums():
    r = interior_point_accessibility(_companion().speed, 0.0, "above", 1.0)
    assert r.verdict == INACCESSIBLE
    harmonic = np.cumsum(1.0 / np.arange(1, 31))
    np.testing.assert_allclose(r.atom_partial_sums[:30], harmonic, rtol=1e-12)


@pytest.mark.parametrize("k", [2, 5, 8])
def test_detector_matches_closed_form(k):
    eps = 2.0**-k
    r = interior_point_accessibility(_companion().speed, 0.0, "above", 1.0, eps=eps)
    # atoms strictly inside (0, eps): n > k, terms 1/n
    assert r.verdict == INACCESSIBLE
    assert r.atom_partial_sums[0] == pytest.approx(1.0 / (k + 1))


def test_bm_speed_accessible():
    r = interior_point_accessibility(SpeedMeasure(), 0.0, "above", 0.5)
    assert r.verdict == ACCESSIBLE
    assert r.continuous_integral == pytest.approx(0.5**2 / 2)


def test_inverse_density_accessible():
    r = interior_point_accessibility(SpeedMeasure(lambda x: 1 / np.asarray(x)), 0.0, "above", 0.5)
    assert r.verdict == ACCESSIBLE
    assert r.continuous_integral == pytest.approx(0.5, rel=1e-6)


def test_from_below_uses_left_neighborhood():
    r = interior_point_accessibility(SpeedMeasure(), 0.0, "below", -2.0)
    assert r.continuous_integral == pytest.approx(0.5)
    with pytest.raises(BadParam):
        interior_point_accessibility(SpeedMeasure(), 0.0, "left", -2.0)
