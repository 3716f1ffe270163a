"""Continuous density with dyadic spikes and its closed-form integral.

On each dyadic block ``[2**-(n+1), 2**-n]`` (``n >= 1``) we work in the
coordinate ``u = log2(x)`` with ``g(u) = x * f(x)``.  ``log g`` is piecewise
linear with knots

    u0 = -n-1,  u1 = u0 + d,  u2 = -n - d,  u3 = -n,     d = min(1/4, n**-3)

and values ``n+1`` at ``u0``, ``n`` at ``u3`` (the spike peaks ``|log2 x|/x``)
and ``1/u**2`` at ``u1, u2`` (the lower envelope ``1/(x log2(x)**2)``).
Convexity of ``log(1/u**2)`` and concavity of ``log|u|`` in ``u`` keep every
piece between the two envelopes; ``d ~ n**-3`` makes the spike areas
summable so ``f`` is integrable at the origin.  For ``x >= 1/2``, ``f = 2``.
"""

import math

import numpy as np

LN2 = math.log(2.0)
N_BLOCKS = 1080  # covers every positive double
_TAIL_BLOCKS = 1_000_000


def _block_knots(n):
    n = np.asarray(n, dtype=float)
    d = np.minimum(0.25, n ** -3.0)
    u0, u3 = -n - 1.0, -n
    u1, u2 = u0 + d, u3 - d
    lg = np.stack([np.log(n + 1.0), -2.0 * np.log(-u1), -2.0 * np.log(-u2), np.log(n)], axis=-1)
    u = np.stack([u0, u1, u2, u3], axis=-1)
    return u, lg


def _piece_integral(du, lga, lgb):
    """``ln2 * int exp(linear)`` over a ``u``-interval of length ``du``."""
    slope = (lgb - lga) / du
    ga = np.exp(lga)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = ga * np.expm1(slope * du) / slope
    val = np.where(np.abs(slope * du) < 1e-12, ga * du, val)
    return LN2 * val


def _block_integrals(n):
    n = np.asarray(n, dtype=float)
    _, lg = _block_knots(n)
    d = np.minimum(0.25, n ** -3.0)
    du = np.stack([d, 1.0 - 2.0 * d, d], axis=-1)
    return _piece_integral(du, lg[..., :-1], lg[..., 1:])


class _Table:
    """Knots in ascending ``x`` order with cumulative integrals from 0."""

    def __init__(self):
        n = np.arange(N_BLOCKS, 0, -1)  # ascending x: deepest block first
        u, lg = _block_knots(n)
        pieces = _piece_integral(u[:, 1:] - u[:, :-1], lg[:, :-1], lg[:, 1:])
        # tail below the deepest tabulated block
        tail_n = np.arange(N_BLOCKS + 1, _TAIL_BLOCKS + 1)
        tail = math.fsum(_block_integrals(tail_n).sum(axis=1).tolist())
        tail += LN2 / (_TAIL_BLOCKS + 1)
        self.tail = tail
        # piece arrays, ascending
        self.ua = u[:, :-1].ravel()
        self.ub = u[:, 1:].ravel()
        self.lga = lg[:, :-1].ravel()
        self.lgb = lg[:, 1:].ravel()
        self.slope = (self.lgb - self.lga) / (self.ub - self.ua)
        widths = pieces.ravel()
        self.cum_lo = tail + np.concatenate([[0.0], np.cumsum(widths)[:-1]])
        self.cum_hi = self.cum_lo + widths
        self.s_half = float(self.cum_hi[-1])


_TABLE = None


def table():
    global _TABLE
    if _TABLE is None:
        _TABLE = _Table()
    return _TABLE


def density(x):
    """Smoothed spike density ``f`` on ``(0, inf)``; vectorized."""
    x = np.array(x, dtype=float)
    out = np.full(x.shape, 2.0)
    small = (x < 0.5) & (x > 0)
    if np.any(small):
        t = table()
        xs = x[small]
        u = np.log2(xs)
        i = np.clip(np.searchsorted(t.ub, u, side="left"), 0, t.ub.size - 1)
        lg = t.lga[i] + t.slope[i] * (u - t.ua[i])
        val = np.exp(lg) / xs
        # exact peak values at dyadic points
        mant, ex = np.frexp(xs)
        dy = mant == 0.5
        val[dy] = (1.0 - ex[dy]) * np.ldexp(1.0, 1 - ex[dy])
        out[small] = val
    out[x <= 0] = np.nan
    return out


def integral(x):
    """``int_0^x f`` for ``x >= 0``; vectorized."""
    x = np.array(x, dtype=float)
    t = table()
    out = np.array(t.s_half + 2.0 * (x - 0.5))
    small = (x < 0.5) & (x > 0)
    if np.any(small):
        u = np.log2(x[small])
        i = np.clip(np.searchsorted(t.ub, u, side="left"), 0, t.ub.size - 1)
        part = _piece_integral(u - t.ua[i], t.lga[i], t.lga[i] + t.slope[i] * (u - t.ua[i]))
        out[small] = t.cum_lo[i] + part
    out[x == 0] = 0.0
    return out


def integral_inverse(y):
    """Inverse of :func:`integral` for ``y >= 0``; vectorized."""
    y = np.array(y, dtype=float)
    t = table()
    out = np.array(0.5 + (y - t.s_half) / 2.0)
    small = (y < t.s_half) & (y > 0)
    if np.any(small):
        ys = y[small]
        i = np.clip(np.searchsorted(t.cum_hi, ys, side="left"), 0, t.cum_hi.size - 1)
        rem = ys - t.cum_lo[i]
        ga = np.exp(t.lga[i])
        b = t.slope[i]
        with np.errstate(divide="ignore", invalid="ignore"):
            du = np.log1p(b * rem / (LN2 * ga)) / b
        du = np.where(np.abs(b) < 1e-300, rem / (LN2 * ga), du)
        u = np.where(ys < t.tail, -LN2 / np.maximum(ys, 1e-300), t.ua[i] + du)
        out[small] = np.exp2(u)
    out[y <= 0] = 0.0
    return out


def lower_envelope(x):
    x = np.asarray(x, dtype=float)
    return 1.0 / (x * np.log2(x) ** 2)


def upper_envelope(x):
    x = np.asarray(x, dtype=float)
    return np.abs(np.log2(x)) / x
