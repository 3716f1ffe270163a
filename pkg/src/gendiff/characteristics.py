"""Diffusion characteristics: state interval, scale function, speed measure.

A general diffusion on an interval ``J`` is described by a strictly increasing
continuous scale ``s`` and a speed measure ``m``.  The speed convention is
fixed so that standard Brownian motion has Lebesgue speed; expected exit
times therefore read ``E_x[exit] = 2 * int G(x, y) m(dy)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from . import _counterexample
from ._numerics import bisect_inverse, improper_integral, quad, series_diverges
from .errors import BadParam, DomainError, QuadratureDiverged, UnknownModel, ValidationError, VolVanishes

SPEED_CONVENTION = "BM-speed=Lebesgue"
VOL_THRESHOLD = 1e-12


def _out(arr, like):
    return float(arr) if np.ndim(like) == 0 else arr


# --------------------------------------------------------------------------
# State interval
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class StateInterval:
    lower: float
    upper: float
    lower_included: bool = False
    upper_included: bool = False

    def __post_init__(self):
        lo, hi = float(self.lower), float(self.upper)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        if not lo < hi:
            raise DomainError(f"empty interval: lower={lo} >= upper={hi}")
        if self.lower_included and not math.isfinite(lo):
            raise DomainError("an infinite endpoint cannot be included")
        if self.upper_included and not math.isfinite(hi):
            raise DomainError("an infinite endpoint cannot be included")

    @classmethod
    def real_line(cls):
        return cls(-math.inf, math.inf)

    def interior(self):
        return (self.lower, self.upper)

    def in_interior(self, x):
        return self.lower < x < self.upper

    def contains(self, x):
        if self.lower < x < self.upper:
            return True
        return (x == self.lower and self.lower_included) or (x == self.upper and self.upper_included)

    def endpoint(self, side):
        return self.lower if side == "lower" else self.upper

    def __str__(self):
        lb = "[" if self.lower_included else "("
        rb = "]" if self.upper_included else ")"
        return f"{lb}{self.lower}, {self.upper}{rb}"


# --------------------------------------------------------------------------
# Scale functions
# --------------------------------------------------------------------------


class ScaleFunction:
    """Strictly increasing continuous map on a :class:`StateInterval`.

    Subclasses implement vectorized ``_eval``, ``_inv`` and ``_deriv``.
    ``special_points`` lists interior points where the derivative may jump
    or blow up.
    """

    variant = "abstract"

    def __init__(self, domain: StateInterval):
        self.domain = domain

    def __call__(self, x):
        return _out(self._eval(np.asarray(x, dtype=float)), x)

    def inverse(self, y):
        return _out(self._inv(np.asarray(y, dtype=float)), y)

    def derivative(self, x, side="right"):
        return _out(self._deriv(np.asarray(x, dtype=float), side), x)

    def special_points(self):
        return ()

    def params(self) -> dict:
        return {}

    def _inv(self, y):
        lo, hi = self._bracket()
        return bisect_inverse(self._eval, y, lo, hi)

    def _bracket(self):
        lo, hi = self.domain.lower, self.domain.upper
        if not math.isfinite(lo):
            lo = -1e300
        if not math.isfinite(hi):
            hi = 1e300
        return lo, hi

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.params().items())
        return f"{type(self).__name__}({args})"


class NaturalScale(ScaleFunction):
    variant = "natural"

    def __init__(self, domain=None):
        super().__init__(domain or StateInterval.real_line())

    def _eval(self, x):
        return x.astype(float, copy=True)

    def _inv(self, y):
        return y.astype(float, copy=True)

    def _deriv(self, x, side):
        return np.ones_like(x, dtype=float)


class SkewPiecewise(ScaleFunction):
    """``(1 - alpha) x`` for ``x >= 0`` and ``alpha x`` for ``x < 0``."""

    variant = "skew"

    def __init__(self, alpha, domain=None):
        alpha = float(alpha)
        if not (0.0 < alpha < 1.0) or alpha == 0.5:
            raise BadParam(f"skewness alpha must lie in (0,1) minus 1/2, got {alpha}")
        super().__init__(domain or StateInterval.real_line())
        self.alpha = alpha

    def _eval(self, x):
        return np.where(x >= 0, (1.0 - self.alpha) * x, self.alpha * x)

    def _inv(self, y):
        return np.where(y >= 0, y / (1.0 - self.alpha), y / self.alpha)

    def _deriv(self, x, side):
        pos = (x > 0) | ((x == 0) & (side == "right"))
        return np.where(pos, 1.0 - self.alpha, self.alpha)

    def special_points(self):
        return (0.0,)

    def params(self):
        return {"alpha": self.alpha}


class CounterexampleLog(ScaleFunction):
    """``s(x) = int_0^x f(|y|) dy`` with the dyadic-spike density ``f``.

    ``side="two-sided"`` lives on the real line, ``side="half-line"`` on
    ``[0, inf)``.
    """

    variant = "counterexample"

    def __init__(self, side="two-sided"):
        if side not in ("two-sided", "half-line"):
            raise BadParam(f"unknown side {side!r}")
        dom = StateInterval.real_line() if side == "two-sided" else StateInterval(0.0, math.inf, True, False)
        super().__init__(dom)
        self.side = side

    def _eval(self, x):
        return np.sign(x) * _counterexample.integral(np.abs(x))

    def _inv(self, y):
        return np.sign(y) * _counterexample.integral_inverse(np.abs(y))

    def _deriv(self, x, side):
        with np.errstate(invalid="ignore"):
            out = _counterexample.density(np.abs(x))
        return np.where(x == 0, np.inf, out)

    def special_points(self):
        return (0.0,) if self.side == "two-sided" else ()

    def params(self):
        return {"side": self.side}


class Tabulated(ScaleFunction):
    """Monotone piecewise-linear interpolation of tabulated values."""

    variant = "table"

    def __init__(self, grid, values, domain=None):
        grid = np.asarray(grid, dtype=float)
        values = np.asarray(values, dtype=float)
        if grid.ndim != 1 or grid.shape != values.shape or grid.size < 2:
            raise BadParam("grid and values must be equal-length 1-d arrays (>= 2 points)")
        if np.any(np.diff(grid) <= 0) or np.any(np.diff(values) <= 0):
            raise BadParam("grid and values must be strictly increasing")
        super().__init__(domain or StateInterval(grid[0], grid[-1], True, True))
        self.grid, self.values = grid, values
        self._slopes = np.diff(values) / np.diff(grid)

    def _eval(self, x):
        return np.interp(x, self.grid, self.values)

    def _inv(self, y):
        return np.interp(y, self.values, self.grid)

    def _deriv(self, x, side):
        if side == "right":
            i = np.searchsorted(self.grid, x, side="right") - 1
        else:
            i = np.searchsorted(self.grid, x, side="left") - 1
        return self._slopes[np.clip(i, 0, self._slopes.size - 1)]

    def special_points(self):
        return tuple(self.grid[1:-1].tolist())

    def params(self):
        return {"grid": self.grid.tolist(), "values": self.values.tolist()}


# --------------------------------------------------------------------------
# Coefficient handles and the Engelbert--Schmidt scale
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Coefficient:
    """Serializable coefficient ``x -> value``.

    kinds: ``constant`` (c), ``linear`` (c * x + d), ``power`` (c * x**p).
    """

    kind: str
    c: float = 0.0
    d: float = 0.0
    p: float = 1.0

    def __post_init__(self):
        if self.kind not in ("constant", "linear", "power"):
            raise BadParam(f"unknown coefficient kind {self.kind!r}")

    @classmethod
    def constant(cls, c):
        return cls("constant", c=float(c))

    @classmethod
    def linear(cls, c, d=0.0):
        return cls("linear", c=float(c), d=float(d))

    @classmethod
    def power(cls, c, p):
        return cls("power", c=float(c), p=float(p))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "constant":
            out = np.full(x.shape, self.c)
        elif self.kind == "linear":
            out = self.c * x + self.d
        else:
            out = self.c * np.abs(x) ** self.p
        return float(out) if out.ndim == 0 else out

    def to_dict(self):
        if self.kind == "constant":
            return {"kind": "constant", "c": self.c}
        if self.kind == "linear":
            return {"kind": "linear", "c": self.c, "d": self.d}
        return {"kind": "power", "c": self.c, "p": self.p}


class FromCoefficients(ScaleFunction):
    """``s(x) = int_anchor^x exp(-int_anchor^y 2 mu / sigma^2 dz) dy``.

    Evaluated by integrating the ODE ``I' = 2 mu / sigma^2``, ``s' = exp(-I)``
    outward from the anchor; dense solutions are cached per side and extended
    on demand.
    """

    variant = "coefficients"
    value_noise = 1e-13  # dense ODE output, relative
    rtol = 1e-12
    atol = 1e-14

    def __init__(self, drift, vol, domain, anchor):
        super().__init__(domain)
        if not domain.in_interior(anchor):
            raise DomainError(f"anchor {anchor} not in the interior of {domain}")
        self.drift, self.vol, self.anchor = drift, vol, float(anchor)
        self._sol = {1: None, -1: None}
        self._reach = {1: self.anchor, -1: self.anchor}

    def _rhs(self, t, z):
        sig = float(self.vol(t))
        if sig == 0.0:
            raise VolVanishes(t)
        return [2.0 * float(self.drift(t)) / sig**2, math.exp(-z[0]) if z[0] < 700 else 0.0]

    def _target_limit(self, direction):
        end = self.domain.upper if direction > 0 else self.domain.lower
        return end

    def _ensure(self, direction, far):
        reach = self._reach[direction]
        if self._sol[direction] is not None and direction * (far - reach) <= 0:
            return
        end = self._target_limit(direction)
        if math.isfinite(end):
            goal = far
        else:
            span = max(abs(far - self.anchor), 2 * abs(reach - self.anchor), 1.0)
            goal = self.anchor + direction * span
        res = integrate.solve_ivp(
            self._rhs, (self.anchor, goal), [0.0, 0.0], method="DOP853",
            rtol=self.rtol, atol=self.atol, dense_output=True,
        )
        if res.status != 0:
            raise QuadratureDiverged(f"scale ODE failed toward {goal}: {res.message}")
        self._sol[direction] = res.sol
        self._reach[direction] = goal

    def _state(self, x):
        out = np.zeros((2,) + x.shape)
        for direction in (1, -1):
            mask = (x - self.anchor) * direction > 0
            if np.any(mask):
                xs = x[mask]
                self._ensure(direction, xs.max() if direction > 0 else xs.min())
                out[:, mask] = self._sol[direction](xs)
        return out

    def _eval(self, x):
        return self._state(x)[1]

    def _deriv(self, x, side):
        with np.errstate(over="ignore"):
            return np.exp(-self._state(x)[0])

    def _inv(self, y):
        if y.size == 0:
            return y.astype(float)
        a = self.anchor
        ends = []
        for direction, target in ((-1, np.min(y)), (1, np.max(y))):
            end = self.domain.lower if direction < 0 else self.domain.upper
            x = a
            for k in range(64):
                if math.isfinite(end):
                    cand = end + (a - end) * 2.0 ** -(k + 1)
                else:
                    cand = a + direction * 2.0 ** k
                try:
                    val = float(self._eval(np.asarray([cand]))[0])
                except QuadratureDiverged:
                    break
                x = cand
                if direction * (val - target) >= 0:
                    break
            ends.append(x)
        return bisect_inverse(self._eval, y, ends[0], ends[1])

    def params(self):
        d = {"anchor": self.anchor}
        if isinstance(self.drift, Coefficient):
            d["drift"] = self.drift.to_dict()
        if isinstance(self.vol, Coefficient):
            d["vol"] = self.vol.to_dict()
        return d


def _check_engelbert_schmidt(drift, vol, interval, anchor, n_samples=65):
    lo, hi = interval.lower, interval.upper
    left = anchor - 0.5 * (anchor - lo) if math.isfinite(lo) else anchor - 4.0
    right = anchor + 0.5 * (hi - anchor) if math.isfinite(hi) else anchor + 4.0
    xs = np.linspace(left, right, n_samples)
    sig = np.abs(np.asarray([vol(x) for x in xs], dtype=float))
    bad = np.flatnonzero(sig < VOL_THRESHOLD)
    if bad.size:
        raise VolVanishes(float(xs[bad[0]]))
    ratio = lambda z: (1.0 + abs(float(drift(z)))) / float(vol(z)) ** 2  # noqa: E731
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, _ = integrate.quad(ratio, left, right, limit=200)
        except (integrate.IntegrationWarning, ZeroDivisionError) as exc:
            raise QuadratureDiverged(f"(1+|mu|)/sigma^2 not integrable on [{left}, {right}]") from exc
    if not math.isfinite(val):
        raise QuadratureDiverged(f"(1+|mu|)/sigma^2 not integrable on [{left}, {right}]")


def scale_from_coefficients(drift, vol, interval: StateInterval, anchor: float) -> FromCoefficients:
    """Scale function of ``dY = drift(Y) dt + vol(Y) dW`` with ``s(anchor) = 0``."""
    _check_engelbert_schmidt(drift, vol, interval, anchor)
    return FromCoefficients(drift, vol, interval, anchor)


# --------------------------------------------------------------------------
# Speed measures
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class DyadicAtoms:
    """Countable atom family at ``sign * 2**-n`` (``n >= 1``) for each sign.

    ``weight(n, sign)`` returns the masses for an integer array ``n``.
    Enumeration stops at ``n_max``, deep enough that every tabulated location
    is a normal double.
    """

    weight: Callable
    signs: tuple = (1, -1)
    n_max: int = 1000
    label: str = "dyadic"

    def in_range(self, a, b, closed=(True, True)):
        locs, masses = [], []
        for sign in self.signs:
            n = np.arange(1, self.n_max + 1)
            x = sign * np.ldexp(1.0, -n)
            keep = ((x > a) | (closed[0] & (x == a))) & ((x < b) | (closed[1] & (x == b)))
            if np.any(keep):
                locs.append(x[keep])
                masses.append(np.asarray(self.weight(n[keep], sign), dtype=float))
        if not locs:
            return np.empty(0), np.empty(0)
        locs, masses = np.concatenate(locs), np.concatenate(masses)
        order = np.argsort(locs)
        return locs[order], masses[order]

    def rescaled(self, factor, label=None):
        """New family with masses multiplied by ``factor(location)``."""
        base = self.weight

        def weight(n, sign):
            return base(n, sign) * np.asarray(factor(sign * np.ldexp(1.0, -np.asarray(n))), dtype=float)

        return DyadicAtoms(weight, self.signs, self.n_max, label or self.label)


def _one(x):
    return np.ones_like(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class SpeedMeasure:
    """Absolutely continuous part plus atoms.

    If ``stieltjes`` is a scale function, the continuous part is
    ``density(x) ds(x)`` rather than ``density(x) dx``; this is how companion
    speeds ``s'_+ dm`` are stored, so that integrals never have to resolve
    spikes of ``s'``.
    """

    density: Callable = _one
    atoms: tuple = ()
    series: Optional[DyadicAtoms] = None
    stieltjes: Optional[ScaleFunction] = None
    density_spec: object = "lebesgue"
    convention_note: str = SPEED_CONVENTION

    def __post_init__(self):
        atoms = tuple(sorted((float(x), float(w)) for x, w in self.atoms))
        locs = [x for x, _ in atoms]
        if len(set(locs)) != len(locs):
            raise ValidationError(["at most one atom per location"])
        if any(not (w > 0) for _, w in atoms):
            raise ValidationError(["atom masses must be positive"])
        object.__setattr__(self, "atoms", atoms)

    def density_at(self, x):
        """Lebesgue density of the continuous part (``inf`` where it blows up)."""
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            d = np.asarray(self.density(x), dtype=float)
            if self.stieltjes is not None:
                d = d * self.stieltjes.derivative(x)
        return d

    def atoms_in(self, a, b, closed=(True, True)):
        locs = [x for x, _ in self.atoms if (x > a or (closed[0] and x == a)) and (x < b or (closed[1] and x == b))]
        masses = [w for x, w in self.atoms if (x > a or (closed[0] and x == a)) and (x < b or (closed[1] and x == b))]
        locs, masses = np.asarray(locs, dtype=float), np.asarray(masses, dtype=float)
        if self.series is not None:
            sl, sm = self.series.in_range(a, b, closed)
            locs, masses = np.concatenate([locs, sl]), np.concatenate([masses, sm])
            order = np.argsort(locs, kind="stable")
            locs, masses = locs[order], masses[order]
        return locs, masses

    def atom_at(self, x):
        _, m = self.atoms_in(x, x)
        return float(m.sum()) if m.size else 0.0

    def integrate(self, weight, a, b):
        """``int_(a,b) weight(x) (continuous part)(dx)``; ``inf`` on divergence.

        Atoms are excluded.  ``weight`` must be vectorized and nonnegative.
        """
        if b <= a:
            return 0.0
        if self.stieltjes is None:
            fn = lambda x: float(weight(x) * self.density(x))  # noqa: E731
            return improper_integral(fn, a, b)
        s = self.stieltjes
        va, vb = s(a), s(b)
        fn = lambda v: float(np.nan_to_num(weight(s.inverse(v)) * self.density(s.inverse(v))))  # noqa: E731
        return improper_integral(fn, va, vb)

    def with_atom(self, x, mass):
        return SpeedMeasure(self.density, self.atoms + ((x, mass),), self.series, self.stieltjes, self.density_spec)


def lebesgue_speed(atoms=()):
    return SpeedMeasure(_one, tuple(atoms))


def speed_from_coefficients(drift, vol, scale: ScaleFunction) -> SpeedMeasure:
    """``m(dx) = dx / (s'(x) sigma(x)^2)``; no atoms."""

    def density(x):
        x = np.asarray(x, dtype=float)
        sig = np.asarray(vol(x), dtype=float)
        if np.any(sig == 0.0):
            raise VolVanishes(float(np.ravel(np.asarray(x)[sig == 0.0])[0]))
        with np.errstate(divide="ignore", over="ignore"):
            return 1.0 / (scale.derivative(x) * sig**2)

    return SpeedMeasure(density, density_spec="coefficients")


def speed_mass(m: SpeedMeasure, a: float, b: float) -> float:
    """``m([a, b])`` with closed-interval atom semantics; ``inf`` on divergence."""
    if b < a:
        raise DomainError(f"need a <= b, got [{a}, {b}]")
    _, masses = m.atoms_in(a, b, (True, True))
    atoms = math.fsum(masses.tolist())
    if not math.isfinite(atoms):
        return math.inf
    if m.series is not None and masses.size:
        # accumulating atom families: test the tail of the enumerated series
        if series_diverges(np.sort(masses)[::-1]):
            return math.inf
    cont = m.integrate(_one, a, b)
    return cont + atoms


# --------------------------------------------------------------------------
# Boundary declarations and the model
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundaryBehavior:
    kind: str = "unspecified"  # unspecified | absorbing | reflecting | sticky
    mass: Optional[float] = None

    KINDS = ("unspecified", "absorbing", "reflecting", "sticky")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise BadParam(f"unknown boundary behavior {self.kind!r}")
        if self.kind == "sticky" and not (self.mass and self.mass > 0 and math.isfinite(self.mass)):
            raise BadParam("sticky boundary needs a finite positive mass")

    def to_json(self):
        if self.kind == "sticky":
            return {"kind": "sticky", "mass": self.mass}
        return self.kind


UNSPECIFIED = BoundaryBehavior()
ABSORBING = BoundaryBehavior("absorbing")
REFLECTING = BoundaryBehavior("reflecting")


def sticky(mass):
    return BoundaryBehavior("sticky", float(mass))


@dataclass(frozen=True)
class DiffusionModel:
    interval: StateInterval
    scale: ScaleFunction
    speed: SpeedMeasure
    lower: BoundaryBehavior = UNSPECIFIED
    upper: BoundaryBehavior = UNSPECIFIED
    label: str = "model"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        problems = self.violations()
        if problems:
            raise ValidationError(problems)

    def behavior(self, side):
        return self.lower if side == "lower" else self.upper

    def violations(self):
        out = []
        if self.scale.domain != self.interval:
            out.append(f"scale domain {self.scale.domain} differs from interval {self.interval}")
        for x, _ in self.speed.atoms:
            if not (self.interval.contains(x) or x in (self.interval.lower, self.interval.upper)):
                out.append(f"atom at {x} outside the state interval")
        for side in ("lower", "upper"):
            b = self.interval.endpoint(side)
            beh = self.behavior(side)
            if not math.isfinite(b):
                if beh.kind != "unspecified":
                    out.append(f"{side} endpoint is infinite but declared {beh.kind}")
                continue
            atom = self.speed.atom_at(b)
            if beh.kind == "sticky" and not math.isclose(atom, beh.mass, rel_tol=1e-12):
                out.append(f"sticky {side} boundary needs an atom of mass {beh.mass} at {b}, found {atom}")
            if beh.kind == "reflecting" and atom != 0:
                out.append(f"instantaneously reflecting {side} boundary must carry no atom (found {atom})")
        return out

    def summary(self):
        return {
            "label": self.label,
            "interval": interval_to_json(self.interval),
            "scale": {"variant": self.scale.variant, **self.scale.params()},
            "speed": {"density": self.speed.density_spec,
                      "atoms": [{"x": x, "mass": w} for x, w in self.speed.atoms],
                      "atom_series": self.speed.series.label if self.speed.series else None},
            "boundary": {"lower": self.lower.to_json(), "upper": self.upper.to_json()},
            "params": self.params,
        }


def _num_json(v):
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def interval_to_json(iv: StateInterval):
    return {"lower": _num_json(iv.lower), "upper": _num_json(iv.upper),
            "lower_included": iv.lower_included, "upper_included": iv.upper_included}


# --------------------------------------------------------------------------
# Catalog
# --------------------------------------------------------------------------


def counterexample_density(x: float) -> float:
    """Smoothed spike density used by the non-dc counterexample scale."""
    if not x > 0:
        raise DomainError(f"density defined for x > 0, got {x}")
    return float(_counterexample.density(x))


def _inv_square_weight(n, sign):
    return 1.0 / np.asarray(n, dtype=float) ** 2


def _skew_density(alpha):
    def density(x):
        x = np.asarray(x, dtype=float)
        return np.where(x >= 0, 1.0 / (1.0 - alpha), 1.0 / alpha)

    return density


CATALOG = (
    "brownian",
    "sticky_bm",
    "skew_bm",
    "absorbed_ito",
    "counterexample_nondc",
    "counterexample_reflecting",
)

DEFAULT_PARAMS = {
    "brownian": {},
    "sticky_bm": {"rho": 2.0},
    "skew_bm": {"alpha": 0.3},
    "absorbed_ito": {"drift": Coefficient.constant(0.0), "vol": Coefficient.linear(1.0),
                     "interval": StateInterval(0.0, math.inf), "anchor": 1.0},
    "counterexample_nondc": {},
    "counterexample_reflecting": {},
}


def builtin(name: str, **params) -> DiffusionModel:
    """Catalog models; unspecified parameters take their defaults."""
    if name not in CATALOG:
        raise UnknownModel(name)
    p = {**DEFAULT_PARAMS[name], **params}
    unknown = set(p) - set(DEFAULT_PARAMS[name])
    if unknown:
        raise BadParam(f"unexpected parameters for {name}: {sorted(unknown)}")
    line = StateInterval.real_line()
    if name == "brownian":
        return DiffusionModel(line, NaturalScale(line), lebesgue_speed(), label=name)
    if name == "sticky_bm":
        rho = float(p["rho"])
        if not rho > 0:
            raise BadParam(f"stickiness rho must be positive, got {rho}")
        return DiffusionModel(line, NaturalScale(line), lebesgue_speed([(0.0, rho)]), label=name, params={"rho": rho})
    if name == "skew_bm":
        scale = SkewPiecewise(p["alpha"], line)
        speed = SpeedMeasure(_skew_density(scale.alpha), density_spec={"skew": scale.alpha})
        return DiffusionModel(line, scale, speed, label=name, params={"alpha": scale.alpha})
    if name == "absorbed_ito":
        iv, anchor = p["interval"], float(p["anchor"])
        scale = scale_from_coefficients(p["drift"], p["vol"], iv, anchor)
        speed = speed_from_coefficients(p["drift"], p["vol"], scale)
        lower = ABSORBING if math.isfinite(iv.lower) else UNSPECIFIED
        upper = ABSORBING if math.isfinite(iv.upper) else UNSPECIFIED
        shown = {k: (v.to_dict() if isinstance(v, Coefficient) else v) for k, v in p.items() if k != "interval"}
        shown["interval"] = interval_to_json(iv)
        return DiffusionModel(iv, scale, speed, lower, upper, label=name, params=shown)
    if name == "counterexample_nondc":
        scale = CounterexampleLog("two-sided")
        speed = SpeedMeasure(_one, (), DyadicAtoms(_inv_square_weight, (1, -1), label="n^-2 at +-2^-n"))
        return DiffusionModel(line, scale, speed, label=name)
    scale = CounterexampleLog("half-line")
    speed = SpeedMeasure(_one, (), DyadicAtoms(_inv_square_weight, (1,), label="n^-2 at 2^-n"))
    return DiffusionModel(scale.domain, scale, speed, lower=REFLECTING, label=name)
