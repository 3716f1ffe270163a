import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gendiff.characteristics import (
    CATALOG,
    Coefficient,
    NaturalScale,
    SkewPiecewise,
    StateInterval,
    builtin,
    counterexample_density,
    scale_from_coefficients,
    speed_mass,
)
from gendiff.errors import AtomAtBlowUp, NotDc
from gendiff.regularity import (
    InverseScale,
    blowup_points,
    companion_model,
    companion_speed,
    dc_check,
    is_natural_scale,
    kink_points,
    one_sided_derivative,
    second_derivative_measure,
)

LINE = StateInterval.real_line()


def test_skew_one_sided_derivatives():
    s = builtin("skew_bm", alpha=0.3).scale
    assert one_sided_derivative(s, 0.0, "right") == pytest.approx(0.7, rel=1e-8)
    assert one_sided_derivative(s, 0.0, "left") == pytest.approx(0.3, rel=1e-8)


def test_counterexample_blowup():
    s = builtin("counterexample_nondc").scale
    assert one_sided_derivative(s, 0.0, "right") == math.inf


def test_smooth_derivative():
    s = scale_from_coefficients(Coefficient.constant(1.0), Coefficient.constant(1.0), LINE, 0.0)
    assert one_sided_derivative(s, 0.5, "right") == pytest.approx(math.exp(-1.0), rel=1e-6)


# ---------------------------------------------------------------- dc_check


def test_skew_is_dc_with_constant_tv():
    r = dc_check(builtin("skew_bm", alpha=0.3).scale, (-1.0, 1.0), levels=8)
    assert r.verdict == "Dc"
    for _, tv in r.levels:
        assert tv == pytest.approx(0.4, abs=1e-9)


def test_counterexample_not_dc_inverse_dc():
    s = builtin("counterexample_nondc").scale
    r = dc_check(s, (-0.5, 0.5), levels=12)
    assert r.verdict == "NotDc" and r.divergence_ratio >= 1.5
    q = InverseScale(s)
    r2 = dc_check(q, (float(s(-0.5)), float(s(0.5))), levels=12)
    assert r2.target == "inverse_scale"
    assert r2.verdict == "Dc" and r2.divergence_ratio <= 1.01


def test_dc_report_shape():
    r = dc_check(NaturalScale(LINE), (-1.0, 1.0), levels=6)
    steps = [h for h, _ in r.levels]
    assert steps == sorted(steps, reverse=True) and len(steps) == 6
    assert r.to_csv().splitlines()[0] == "grid_step,total_variation_of_slopes"
    assert r.to_json()["verdict"] == "Dc"


@pytest.mark.parametrize("name", CATALOG)
def test_slope_tv_nondecreasing(name):
    m = builtin(name)
    lo, hi = (0.25, 3.0) if name in ("counterexample_reflecting", "absorbed_ito") else (-0.5, 0.5)
    tvs = [tv for _, tv in dc_check(m.scale, (lo, hi), levels=10).levels]
    for a, b in zip(tvs, tvs[1:]):
        assert b >= a - 1e-9 * max(1.0, a)


@pytest.mark.parametrize("name", CATALOG)
def test_inverse_scale_dc_for_every_catalog_model(name):
    m = builtin(name)
    lo, hi = (0.25, 3.0) if name in ("counterexample_reflecting", "absorbed_ito") else (-0.5, 0.5)
    image = (float(m.scale(lo)), float(m.scale(hi)))
    r = dc_check(InverseScale(m.scale), image, levels=14)
    assert r.verdict == "Dc", (name, r.levels[-4:])


# ---------------------------------------------------------------- second derivative measure


def test_skew_inverse_kink_mass():
    q = InverseScale(SkewPiecewise(0.3, LINE))
    grid = np.linspace(-0.5, 0.5, 17) + 0.013
    sdm = second_derivative_measure(q, grid)
    nz = np.flatnonzero(np.abs(sdm.masses) > 1e-9)
    assert nz.size == 1
    assert sdm.masses[nz[0]] == pytest.approx(1 / 0.7 - 1 / 0.3, rel=1e-8)
    assert sdm.breakpoints[nz[0]] <= 0.0 < sdm.breakpoints[nz[0] + 1]


def test_identity_masses_zero():
    sdm = second_derivative_measure(NaturalScale(LINE), np.linspace(-2, 3, 33))
    assert np.allclose(sdm.masses, 0.0, atol=1e-12)
    assert sdm.total_variation == pytest.approx(0.0, abs=1e-10)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(min_value=-1, max_value=1), min_size=3, max_size=12, unique=True),
       st.integers(min_value=0, max_value=5), st.integers(min_value=0, max_value=5))
def test_telescoping(points, i, j):
    s = scale_from_coefficients(Coefficient.constant(1.0), Coefficient.constant(1.0), LINE, 0.0)
    grid = np.array(sorted(points))
    if np.min(np.diff(grid)) < 1e-3:
        return
    sdm = second_derivative_measure(s, grid)
    n = len(grid)
    a, b = sorted((i % n, j % n))
    lhs = sdm.mass_between(grid[a], grid[b])
    rhs = sdm.left_slopes[b] - sdm.left_slopes[a]
    assert lhs == pytest.approx(rhs, rel=1e-8, abs=1e-12)


def test_second_derivative_measure_rejects_not_dc():
    with pytest.raises(NotDc):
        second_derivative_measure(builtin("counterexample_nondc").scale, np.linspace(-0.5, 0.5, 9))


# ---------------------------------------------------------------- scale diagnostics


def test_bad_point_scans():
    assert blowup_points(builtin("counterexample_nondc").scale) == [0.0]
    assert blowup_points(builtin("brownian").scale) == []
    assert kink_points(builtin("skew_bm").scale) == [0.0]
    assert is_natural_scale(builtin("sticky_bm").scale)
    assert not is_natural_scale(builtin("skew_bm").scale)


# ---------------------------------------------------------------- companion speed


def test_companion_sticky_unchanged():
    m = builtin("sticky_bm", rho=2)
    c = companion_speed(m)
    assert c.atoms == ((0.0, 2.0),)
    assert c.density_at(0.7) == pytest.approx(1.0)


def test_companion_skew_is_lebesgue():
    c = companion_speed(builtin("skew_bm", alpha=0.3))
    for x in (-2.0, -0.1, 0.1, 3.0):
        assert c.density_at(x) == pytest.approx(1.0)


@pytest.mark.parametrize("n", [1, 2, 3, 7, 20])
def test_companion_counterexample_atoms(n):
    m = companion_model(builtin("counterexample_nondc"), 1.0)
    assert m.speed.atom_at(2.0**-n) == pytest.approx(2.0**n / n, rel=1e-12)
    x = 0.37
    assert m.speed.density_at(x) == pytest.approx(counterexample_density(x))


def test_companion_valid_speed_on_compacts():
    comp = companion_model(builtin("counterexample_nondc"), 1.0)
    for a, b in ((0.1, 0.2), (2.0**-10, 1.0), (1.0, 5.0)):
        assert 0 < speed_mass(comp.speed, a, b) < math.inf
    for name in ("brownian", "sticky_bm", "skew_bm"):
        c = companion_speed(builtin(name))
        assert 0 < speed_mass(c, -1.0, 1.0) < math.inf


def test_atom_at_blowup_rejected():
    from gendiff.characteristics import DiffusionModel

    base = builtin("counterexample_nondc")
    m = DiffusionModel(base.interval, base.scale, base.speed.with_atom(0.0, 1.0))
    with pytest.raises(AtomAtBlowUp):
        companion_speed(m)
