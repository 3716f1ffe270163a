"""Shared numerical helpers: shell integration and divergence detection."""

import math
import warnings

import numpy as np
from scipy import integrate

# Divergence detector settings (see ``series_diverges``).
BLOWUP_BOUND = 1e6
GROWTH_STEP = 0.10
TAIL_EXPONENT = -1.1
MAX_SHELLS = 40


def series_diverges(terms, blowup=BLOWUP_BOUND):
    """Decide whether a nonnegative series given by its leading terms diverges.

    Two independent triggers:

    * the partial sums exceed ``blowup`` while each of the last three terms
      grows the running total by at least 10%;
    * the tail of the terms decays no faster than ``k**-1.1`` in the term
      index ``k`` (least-squares slope of ``log term`` against ``log k`` over
      the second half of the terms).  Geometric decay gives a very steep
      slope, harmonic-type tails a slope near -1.
    """
    t = np.asarray(terms, dtype=float)
    if t.size == 0:
        return False
    if not np.all(np.isfinite(t)):
        return True
    partial = np.cumsum(t)
    if partial[-1] > blowup and t.size >= 4:
        prev = partial[-4:-1]
        if np.all(t[-3:] >= GROWTH_STEP * np.maximum(prev, 1e-300)):
            return True
    k = np.arange(1, t.size + 1, dtype=float)
    tail = slice(t.size // 2, None)
    kt, tt = k[tail], t[tail]
    pos = tt > 0
    if pos.sum() < 4:
        return False
    slope = np.polyfit(np.log(kt[pos]), np.log(tt[pos]), 1)[0]
    return bool(slope > TAIL_EXPONENT)


def shells_toward(point, start, n_shells=MAX_SHELLS):
    """Edges of geometric shells from ``start`` toward ``point``.

    For a finite ``point`` the k-th shell is the half-open interval between
    ``point + w 2**-k`` and ``point + w 2**-(k-1)`` with ``w = start - point``.
    For an infinite ``point`` the shells grow outward: ``start * 2**k``-type
    edges measured from ``start``.  Returns a list of ``(near, far)`` pairs
    ordered from far to near.
    """
    out = []
    if math.isfinite(point):
        w = start - point
        for k in range(1, n_shells + 1):
            out.append((point + w * 2.0 ** -k, point + w * 2.0 ** -(k - 1)))
    else:
        sign = 1.0 if point > 0 else -1.0
        base = max(1.0, abs(start))
        for k in range(1, n_shells + 1):
            far = start + sign * base * (2.0 ** (k - 1) - 1.0)
            near = start + sign * base * (2.0 ** k - 1.0)
            out.append((near, far))
    return out


def quad(fn, a, b, points=None):
    """``scipy.integrate.quad`` over ``[min, max]`` returning a nonnegative float."""
    lo, hi = min(a, b), max(a, b)
    if hi <= lo:
        return 0.0
    if points is not None:
        points = [p for p in points if lo < p < hi][:100] or None
    with np.errstate(all="ignore"), warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, _ = integrate.quad(fn, lo, hi, limit=400, points=points)
    if not math.isfinite(val):
        return math.inf
    return val


def bisect_inverse(fn, y, lo, hi, iters=200, xtol=0.0):
    """Vectorized bisection for an increasing ``fn`` on ``[lo, hi]``."""
    y = np.asarray(y, dtype=float)
    a = np.array(np.broadcast_to(np.asarray(lo, dtype=float), y.shape))
    b = np.array(np.broadcast_to(np.asarray(hi, dtype=float), y.shape))
    for _ in range(iters):
        m = 0.5 * (a + b)
        stop = (m == a) | (m == b)
        if np.all(stop) or np.all(b - a <= xtol):
            break
        below = fn(m) < y
        a = np.where(below & ~stop, m, a)
        b = np.where(~below & ~stop, m, b)
    return 0.5 * (a + b)


def pairwise_sum(values):
    """Fixed-order summation so reductions do not depend on chunking."""
    return math.fsum(np.asarray(values, dtype=float).ravel().tolist())


def improper_integral(fn, a, b, points=None, n_shells=MAX_SHELLS):
    """Integral of a nonnegative ``fn`` over ``(a, b)``, ``inf`` on divergence.

    The interval is split at an interior point and each half is covered by
    geometric shells toward its outer endpoint; per-shell values go through
    :func:`series_diverges`.
    """
    if b <= a:
        return 0.0
    if math.isfinite(a) and math.isfinite(b):
        c = 0.5 * (a + b)
    elif math.isfinite(a):
        c = a + max(1.0, abs(a))
    elif math.isfinite(b):
        c = b - max(1.0, abs(b))
    else:
        c = 0.0
    total = 0.0
    for end in (a, b):
        terms = [quad(fn, lo, hi, points) for lo, hi in shells_toward(end, c, n_shells)]
        if series_diverges(terms):
            return math.inf
        total += math.fsum(terms)
        if math.isfinite(end):
            w = abs(c - end) * 2.0 ** -n_shells
            x_in = end + math.copysign(0.5 * w, c - end)
            with np.errstate(all="ignore"):
                tip = float(fn(x_in)) * w
            if math.isfinite(tip):
                total += tip
    return total
