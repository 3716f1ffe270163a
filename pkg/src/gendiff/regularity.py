"""dc-regularity of scale functions, one-sided derivatives, companion speed."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .characteristics import (
    ABSORBING,
    DiffusionModel,
    DyadicAtoms,
    NaturalScale,
    ScaleFunction,
    SpeedMeasure,
    StateInterval,
)
from .errors import AtomAtBlowUp, BadParam, NotConverged, NotDc

# dc_check thresholds
NOTDC_GROWTH = 1.5
DC_GROWTH = 1.01
BASE_CELLS = 16
VALUE_NOISE = 8 * np.finfo(float).eps  # relative roundoff of scale evaluations

# one_sided_derivative settings
H0 = 1e-2
HALVINGS = 20
BLOWUP_CAP = 1e5
DERIV_RTOL = 1e-6


class InverseScale(ScaleFunction):
    """``q = s^{-1}`` on the image of the state interval, as a scale-like map."""

    variant = "inverse"

    def __init__(self, scale: ScaleFunction):
        from .boundary import reference_point, scale_limit

        dom = scale.domain
        c = reference_point(dom)
        lo, hi = (scale_limit(scale, dom.endpoint(side), start=c) for side in ("lower", "upper"))
        super().__init__(StateInterval(lo, hi, dom.lower_included, dom.upper_included))
        self.scale = scale

    def _eval(self, y):
        return self.scale._inv(y)

    def _inv(self, x):
        return self.scale._eval(x)

    def _deriv(self, y, side):
        with np.errstate(divide="ignore"):
            return 1.0 / self.scale._deriv(self.scale._inv(y), side)

    def special_points(self):
        return tuple(float(self.scale(p)) for p in self.scale.special_points())


def one_sided_derivative(s, x, side="right", h0=None, halvings=HALVINGS, cap=BLOWUP_CAP, rtol=DERIV_RTOL):
    """Limit of one-sided difference quotients of ``s`` at ``x``.

    Quotients are taken over ``h0 * 2**-k``; first-order Richardson values
    ``2 D_k - D_(k-1)`` are scanned for the first run of three that agrees
    to ``rtol``.  Returns
    ``math.inf`` when the quotients keep increasing past ``cap`` (blow-up).
    """
    if h0 is None:
        h0 = H0 * max(1.0, abs(x))
    dom = s.domain
    room = (dom.upper - x) if side == "right" else (x - dom.lower)
    if not room > 0:
        raise BadParam(f"no room on the {side} of {x}")
    h0 = min(h0, 0.5 * room)
    hs = h0 * 2.0 ** -np.arange(halvings + 1)
    sx = s(x)
    pts = x + hs if side == "right" else x - hs
    vals = np.asarray(s(pts), dtype=float)
    quot = (vals - sx) / hs if side == "right" else (sx - vals) / hs
    tail = quot[-5:]
    if np.all(np.diff(tail) > 0) and tail[-1] > cap:
        return math.inf
    rich = 2.0 * quot[1:] - quot[:-1]
    best = math.inf
    for k in range(2, rich.size):
        trip = rich[k - 2:k + 1]
        spread = trip.max() - trip.min()
        if spread <= rtol * (1.0 + abs(trip[-1])):
            # coarsest settled run: least roundoff
            return float(trip[-1])
        best = min(best, spread)
    raise NotConverged(f"{side} difference quotients at {x} did not settle (spread {best:.3g})")


@dataclass
class DcReport:
    target: str
    window: tuple
    levels: list  # (grid_step, total_variation_of_slopes), coarse to fine
    verdict: str  # Dc | NotDc | Inconclusive
    divergence_ratio: float

    def to_json(self):
        return {
            "target": self.target,
            "window": list(self.window),
            "levels": [{"grid_step": h, "total_variation_of_slopes": tv} for h, tv in self.levels],
            "verdict": self.verdict,
            "divergence_ratio": self.divergence_ratio,
        }

    def to_csv(self):
        rows = ["grid_step,total_variation_of_slopes"]
        rows += [f"{float(h)!r},{float(tv)!r}" for h, tv in self.levels]
        return "\n".join(rows) + "\n"


def _ratio(num, den):
    if den == 0:
        return 1.0 if num == 0 else math.inf
    return num / den


def dc_check(g, window, levels=12, base_cells=BASE_CELLS) -> DcReport:
    """Total variation of secant slopes of ``g`` on nested dyadic grids.

    A dc function has finite slope variation on compacts, so geometric growth
    of the variation across the finest levels certifies failure (NotDc);
    stabilization is reported as Dc.  Levels whose variation is within the
    roundoff floor of ``g`` count as zero variation.
    """
    if levels < 4:
        raise BadParam("dc_check needs at least 4 levels")
    a, b = float(window[0]), float(window[1])
    if not (math.isfinite(a) and math.isfinite(b) and a < b):
        raise BadParam(f"window must be a finite nonempty interval, got {window}")
    n_fine = base_cells * 2 ** (levels - 1)
    x = np.linspace(a, b, n_fine + 1)
    vals = np.asarray(g(x), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise BadParam("function is not finite on the window")
    # worst-case slope variation produced by roundoff in the values alone
    eps_f = getattr(g, "value_noise", VALUE_NOISE) * max(1.0, float(np.max(np.abs(vals))))
    table, tvs = [], []
    for j in range(levels):
        stride = 2 ** (levels - 1 - j)
        xs, vs = x[::stride], vals[::stride]
        slopes = np.diff(vs) / np.diff(xs)
        tv = float(np.sum(np.abs(np.diff(slopes))))
        h = (b - a) / (base_cells * 2 ** j)
        table.append((h, tv))
        floor = 4.0 * (base_cells * 2 ** j) * eps_f / h
        tvs.append(tv if tv > floor else 0.0)
    steps = [_ratio(tvs[-i], tvs[-i - 1]) for i in (3, 2, 1)]
    total = _ratio(tvs[-1], tvs[-4])
    ratio = total ** (1.0 / 3.0) if math.isfinite(total) else math.inf
    if all(r >= NOTDC_GROWTH for r in steps):
        verdict = "NotDc"
    elif ratio <= DC_GROWTH:
        verdict = "Dc"
    else:
        verdict = "Inconclusive"
    target = "inverse_scale" if isinstance(g, InverseScale) else "scale"
    return DcReport(target, (a, b), table, verdict, ratio)


@dataclass
class SignedGridMeasure:
    breakpoints: np.ndarray
    masses: np.ndarray
    left_slopes: np.ndarray = field(repr=False, default=None)

    @property
    def total_variation(self):
        return float(np.sum(np.abs(self.masses)))

    def mass_between(self, a, b):
        """Signed mass of ``[a, b)``."""
        sel = (self.breakpoints >= a) & (self.breakpoints < b)
        return float(np.sum(self.masses[sel]))


def second_derivative_measure(g, grid) -> SignedGridMeasure:
    """Grid version of ``g''``: cell ``[x_i, x_(i+1))`` carries ``g'_-(x_(i+1)) - g'_-(x_i)``.

    ``breakpoints`` are the left cell edges; sums over consecutive cells
    telescope exactly to differences of the left derivatives.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 3 or np.any(np.diff(grid) <= 0):
        raise BadParam("grid must be strictly increasing with at least 3 points")
    report = dc_check(g, (grid[0], grid[-1]), levels=8)
    if report.verdict == "NotDc":
        raise NotDc(f"function is not dc on [{grid[0]}, {grid[-1]}]")
    h0 = min(H0, 0.5 * float(np.min(np.diff(grid))))
    left = np.array([one_sided_derivative(g, x, "left", h0=h0) for x in grid])
    return SignedGridMeasure(grid[:-1], np.diff(left), left)


# --------------------------------------------------------------------------
# Scale diagnostics used by the verdict engine
# --------------------------------------------------------------------------


def _scan_points(scale, n=33):
    lo, hi = scale.domain.lower, scale.domain.upper
    lo = lo if math.isfinite(lo) else -4.0
    hi = hi if math.isfinite(hi) else 4.0
    if lo >= hi:
        lo, hi = scale.domain.lower, scale.domain.upper
    pts = np.linspace(lo, hi, n + 2)[1:-1]
    return [float(p) for p in pts if scale.domain.in_interior(p)]


def blowup_points(scale: ScaleFunction):
    """Interior points where ``s'_+`` or ``s'_-`` blows up."""
    out = []
    for p in sorted(set(scale.special_points()) | set(_scan_points(scale))):
        if not scale.domain.in_interior(p):
            continue
        for side in ("right", "left"):
            try:
                d = one_sided_derivative(scale, p, side)
            except NotConverged:
                continue
            if math.isinf(d):
                out.append(p)
                break
    return out


def kink_points(scale: ScaleFunction, exclude=()):
    """Interior points where left and right derivatives of ``s`` differ."""
    out = []
    for p in scale.special_points():
        if p in exclude or not scale.domain.in_interior(p):
            continue
        try:
            r = one_sided_derivative(scale, p, "right")
            l_ = one_sided_derivative(scale, p, "left")
        except NotConverged:
            out.append(p)
            continue
        if math.isinf(r) or math.isinf(l_):
            continue
        if abs(r - l_) > 1e-6 * (1.0 + abs(r)):
            out.append(p)
    return out


def is_natural_scale(scale: ScaleFunction, rtol=1e-9):
    """True when ``s`` is affine on the interior (natural scale up to an affine map)."""
    if isinstance(scale, NaturalScale):
        return True
    if scale.special_points():
        return False
    pts = np.asarray(_scan_points(scale))
    d = np.asarray(scale.derivative(pts), dtype=float)
    if not np.all(np.isfinite(d)):
        return False
    return bool(np.all(np.abs(d - d[0]) <= rtol * abs(d[0])))


# --------------------------------------------------------------------------
# Companion speed
# --------------------------------------------------------------------------


def companion_speed(model: DiffusionModel) -> SpeedMeasure:
    """``m~ = s'_+ dm`` as a speed measure.

    The continuous part becomes ``density ds``; atoms are rescaled by
    ``s'_+`` at their locations.
    """
    speed, scale = model.speed, model.scale
    if speed.stieltjes is not None:
        raise BadParam("speed is already given relative to a scale")
    atoms = []
    for x, w in speed.atoms:
        if model.interval.in_interior(x):
            d = float(scale.derivative(x, "right"))
            if not math.isfinite(d):
                raise AtomAtBlowUp(f"atom at {x} where s'_+ blows up")
            atoms.append((x, w * d))
        else:
            atoms.append((x, w))
    series = None
    if speed.series is not None:
        series = speed.series.rescaled(lambda x: scale.derivative(x, "right"), label=f"s'_+ * ({speed.series.label})")
    spec = {"companion_of": speed.density_spec, "scale": scale.variant}
    return SpeedMeasure(speed.density, tuple(atoms), series, scale, spec)


def _restrict_series(series: DyadicAtoms, lo, hi):
    signs = tuple(sg for sg in series.signs if (sg > 0 and hi > 0) or (sg < 0 and lo < 0))
    return DyadicAtoms(series.weight, signs, series.n_max, series.label) if signs else None


def companion_model(model: DiffusionModel, x0: float, bad_points=None) -> DiffusionModel:
    """Natural-scale diffusion with speed ``s'_+ dm`` on the component of
    ``J`` minus the blow-up points that contains ``x0``.  Accessible
    boundaries of the companion are declared absorbing.
    """
    from .boundary import classify_boundary

    if bad_points is None:
        bad_points = blowup_points(model.scale)
    lo, hi = model.interval.lower, model.interval.upper
    lo_inc, hi_inc = model.interval.lower_included, model.interval.upper_included
    for p in bad_points:
        if lo < p < x0:
            lo, lo_inc = p, False
        elif x0 < p < hi:
            hi, hi_inc = p, False
    mt = companion_speed(model)
    atoms = tuple((x, w) for x, w in mt.atoms if lo < x < hi)
    series = _restrict_series(mt.series, lo, hi) if mt.series is not None else None
    speed = SpeedMeasure(mt.density, atoms, series, mt.stieltjes, mt.density_spec)
    iv = StateInterval(lo, hi, False, False)
    draft = DiffusionModel(iv, NaturalScale(iv), speed, label=f"companion({model.label})")
    behaviors = {}
    for side in ("lower", "upper"):
        b = iv.endpoint(side)
        if math.isfinite(b) and classify_boundary(draft, side, stipulate_absorbing=True).accessibility == "Accessible":
            behaviors[side] = ABSORBING
    iv = StateInterval(lo, hi, "lower" in behaviors, "upper" in behaviors)
    return DiffusionModel(
        iv, NaturalScale(iv), speed,
        behaviors.get("lower", draft.lower), behaviors.get("upper", draft.upper),
        label=draft.label,
    )
