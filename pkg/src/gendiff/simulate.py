"""Monte Carlo for general diffusions via a scale/speed grid chain.

The chain lives on nodes that are uniform in scale coordinates.  From an
interior node it jumps to a neighbor with the scale-fair probabilities and
waits the mean exit time of the two-neighbor cell, computed from the Green
kernel against the speed measure.  Holding times are deterministic means
(weak order 1), so sticky atoms show up directly as inflated holding times.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from ._numerics import pairwise_sum, series_diverges
from .boundary import _continuous, reference_point, scale_limit
from .characteristics import DiffusionModel
from .errors import AtomOutsideTruncation, BadParam, EmptyTruncation, NoExits

BLOCK = 16384  # paths per RNG stream
TRUNCATION_SCALE_UNITS = 8.0
MAX_STEPS = 50_000_000
EVENT_CAP = 1000
CI_LEVEL = 0.99
THREADS_ENV = "GENDIFF_THREADS"

INTERIOR, ATOM, ABSORBING, REFLECTING = "interior", "atom", "absorbing", "reflecting"


@dataclass
class GridChain:
    nodes: np.ndarray
    s_nodes: np.ndarray
    p_up: np.ndarray
    holding_time: np.ndarray
    node_kind: list
    truncated: np.ndarray  # absorbing because the state space was cut here
    label: str = ""
    scale: object = None

    @property
    def descriptor(self):
        return {
            "model": self.label,
            "n_nodes": int(self.nodes.size),
            "truncation": [float(self.nodes[0]), float(self.nodes[-1])],
            "kinds": {k: self.node_kind.count(k) for k in (INTERIOR, ATOM, ABSORBING, REFLECTING)},
        }

    def node_index(self, x):
        """Index of the node nearest to ``x``."""
        return int(np.argmin(np.abs(self.nodes - x)))


def default_truncation(model: DiffusionModel, x0: float):
    """Finite endpoints with a finite scale image are kept; otherwise cut at
    ``TRUNCATION_SCALE_UNITS`` scale units from ``x0``."""
    scale, iv = model.scale, model.interval
    sx = float(scale(x0))
    out = []
    for side, sign in (("lower", -1.0), ("upper", 1.0)):
        b = iv.endpoint(side)
        sb = scale_limit(scale, b, start=reference_point(iv))
        if math.isfinite(b) and math.isfinite(sb):
            out.append(b)
            continue
        target = sx + sign * TRUNCATION_SCALE_UNITS
        if math.isfinite(sb) and sign * (sb - target) <= 0:
            target = sx + 0.999 * (sb - sx)
        out.append(float(scale.inverse(target)))
    return tuple(out)


def _insert_nodes(nodes, s_nodes, extra, scale, min_gap):
    for x in extra:
        sx = float(scale(x))
        if not (s_nodes[0] < sx < s_nodes[-1]):
            continue
        k = int(np.argmin(np.abs(s_nodes - sx)))
        if abs(s_nodes[k] - sx) < min_gap and 0 < k < nodes.size - 1:
            nodes[k], s_nodes[k] = x, sx
        elif abs(s_nodes[k] - sx) >= min_gap:
            pos = int(np.searchsorted(s_nodes, sx))
            nodes = np.insert(nodes, pos, x)
            s_nodes = np.insert(s_nodes, pos, sx)
    return nodes, s_nodes


def _series_terms_ok(locs, terms, speed):
    if speed.series is None or terms.size == 0:
        return True
    order = np.argsort(np.abs(locs))[::-1]
    return not series_diverges(terms[order])


def _interior_holding(model, xl, xk, xr, sl, sk, sr):
    scale, speed = model.scale, model.speed
    span = sr - sl
    pts = list(scale.special_points())

    def left(y):
        return 2.0 * (np.asarray(scale(y), dtype=float) - sl) * (sr - sk) / span

    def right(y):
        return 2.0 * (sk - sl) * (sr - np.asarray(scale(y), dtype=float)) / span

    cont = _continuous(speed, left, xl, xk, pts) + _continuous(speed, right, xk, xr, pts)
    locs, masses = speed.atoms_in(xl, xr, (False, False))
    if locs.size == 0:
        return cont
    sy = np.asarray(scale(locs), dtype=float)
    g = 2.0 * (np.minimum(sy, sk) - sl) * (sr - np.maximum(sy, sk)) / span
    terms = g * masses
    if not _series_terms_ok(locs, terms, speed):
        return math.inf
    return cont + pairwise_sum(terms)


def _reflecting_holding(model, xb, x1, sb, s1):
    """``2 int_(b, x1] (s(x1) - s(y)) m(dy) + 2 (s(x1) - s(b)) m({b})``."""
    scale, speed = model.scale, model.speed
    lo, hi = min(xb, x1), max(xb, x1)

    def w(y):
        return 2.0 * np.abs(s1 - np.asarray(scale(y), dtype=float))

    cont = _continuous(speed, w, lo, hi, list(scale.special_points()))
    closed = (False, True) if xb < x1 else (True, False)
    locs, masses = speed.atoms_in(lo, hi, closed)
    terms = w(locs) * masses if locs.size else np.empty(0)
    if not _series_terms_ok(locs, terms, speed):
        return math.inf
    return cont + pairwise_sum(terms) + 2.0 * abs(s1 - sb) * speed.atom_at(xb)


def build_chain(model: DiffusionModel, n_cells: int = 128, truncation=None, extra_nodes=()) -> GridChain:
    """Scale-uniform grid chain on ``truncation`` (default: :func:`default_truncation`
    around the first extra node, or the interval midpoint).

    Atoms, kinks of ``s`` and ``extra_nodes`` inside the truncation are
    inserted as nodes.
    """
    if n_cells < 16:
        raise BadParam("n_cells must be at least 16")
    scale, iv = model.scale, model.interval
    if truncation is None:
        ref = extra_nodes[0] if len(extra_nodes) else 0.0
        truncation = default_truncation(model, ref)
    a, b = float(truncation[0]), float(truncation[1])
    if not a < b:
        raise EmptyTruncation(f"empty truncation [{a}, {b}]")
    if a < iv.lower or b > iv.upper:
        raise EmptyTruncation(f"truncation [{a}, {b}] leaves the state interval {iv}")
    sa, sb = float(scale(a)), float(scale(b))
    if not (math.isfinite(sa) and math.isfinite(sb)):
        raise EmptyTruncation("truncation endpoints must have finite scale values")
    s_nodes = np.linspace(sa, sb, n_cells + 1)
    nodes = np.asarray(scale.inverse(s_nodes), dtype=float)
    nodes[0], nodes[-1] = a, b
    min_gap = 0.25 * (sb - sa) / n_cells
    atom_locs = [x for x, _ in model.speed.atoms if a < x < b]
    dropped = [x for x, _ in model.speed.atoms if x < a or x > b]
    if dropped:
        warnings.warn(f"atoms at {dropped} lie outside the truncation [{a}, {b}] and are dropped",
                      AtomOutsideTruncation, stacklevel=2)
    extra = sorted(set(atom_locs) | {p for p in scale.special_points() if a < p < b} | {float(x) for x in extra_nodes})
    nodes, s_nodes = _insert_nodes(nodes, s_nodes, extra, scale, min_gap)

    n = nodes.size
    p_up = np.full(n, np.nan)
    hold = np.full(n, math.inf)
    kind = [INTERIOR] * n
    trunc = np.zeros(n, dtype=bool)
    atoms = {x for x, _ in model.speed.atoms}
    for k in range(1, n - 1):
        sl, sk, sr = s_nodes[k - 1], s_nodes[k], s_nodes[k + 1]
        p_up[k] = (sk - sl) / (sr - sl)
        hold[k] = _interior_holding(model, nodes[k - 1], nodes[k], nodes[k + 1], sl, sk, sr)
        if nodes[k] in atoms:
            kind[k] = ATOM
    for k, nb, side in ((0, 1, "lower"), (n - 1, n - 2, "upper")):
        x = nodes[k]
        beh = model.behavior(side)
        at_endpoint = x == iv.endpoint(side)
        if at_endpoint and beh.kind in ("reflecting", "sticky"):
            kind[k] = REFLECTING
            p_up[k] = 1.0 if side == "lower" else 0.0
            hold[k] = _reflecting_holding(model, x, nodes[nb], s_nodes[k], s_nodes[nb])
        else:
            kind[k] = ABSORBING
            trunc[k] = not at_endpoint
    return GridChain(nodes, s_nodes, p_up, hold, kind, trunc, model.label, scale)


# --------------------------------------------------------------------------
# Path ensembles
# --------------------------------------------------------------------------


@dataclass
class PathEnsemble:
    seed: int
    horizon: float
    label: str
    grid: dict
    x0: float
    final_state: np.ndarray
    final_time: np.ndarray
    absorbed: np.ndarray
    truncated: np.ndarray
    unfinished: np.ndarray
    watch_levels: np.ndarray
    first_hit: np.ndarray  # (n_paths, n_levels), inf if never hit
    post_min: np.ndarray  # running min after the first hit of each level
    post_max: np.ndarray
    checkpoints: np.ndarray
    checkpoint_states: np.ndarray  # (n_paths, n_checkpoints)
    events: list = field(default_factory=list)  # per recorded path: list of (time, state)
    s_of: object = None  # scale function for s(X) statistics

    @property
    def n_paths(self):
        return int(self.final_state.size)

    def level_index(self, level):
        hits = np.flatnonzero(np.isclose(self.watch_levels, level, rtol=0, atol=1e-12))
        if hits.size == 0:
            raise BadParam(f"{level} is not a watch level of this ensemble")
        return int(hits[0])

    def hit_frequency(self, level):
        return float(np.mean(np.isfinite(self.first_hit[:, self.level_index(level)])))

    def summary(self):
        return {
            "model": self.label,
            "seed": self.seed,
            "x0": self.x0,
            "horizon": "inf" if math.isinf(self.horizon) else self.horizon,
            "n_paths": self.n_paths,
            "grid": self.grid,
            "mean_final_state": pairwise_sum(self.final_state) / self.n_paths,
            "frac_absorbed": float(np.mean(self.absorbed)),
            "frac_truncated": float(np.mean(self.truncated)),
            "frac_unfinished": float(np.mean(self.unfinished)),
            "levels": [{"level": float(lv), "hit_frequency": float(np.mean(np.isfinite(self.first_hit[:, j])))}
                       for j, lv in enumerate(self.watch_levels)],
        }

    def to_json(self):
        return json.dumps(self.summary(), sort_keys=True, indent=2)

    def hitting_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["level", "hit_frequency", "mean_first_hit_time"])
        for j, lv in enumerate(self.watch_levels):
            t = self.first_hit[:, j]
            hit = np.isfinite(t)
            w.writerow([repr(float(lv)), repr(float(hit.mean())),
                        repr(float(pairwise_sum(t[hit]) / hit.sum())) if hit.any() else ""])
        return buf.getvalue()

    def events_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["path", "time", "state"])
        for i, ev in enumerate(self.events):
            for t, x in ev:
                w.writerow([i, repr(t), repr(x)])
        return buf.getvalue()


def default_workers():
    """Thread count from ``GENDIFF_THREADS``, else 1."""
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise BadParam(f"{THREADS_ENV} must be an integer, got {raw!r}") from None


def _block_rng(seed, block):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block,))))


COMPRESS_EVERY = 128


def _run_block(chain, start, horizon, n, rng, watch_idx, track, cps, record, max_steps):
    """Advance ``n`` paths of one RNG block.

    Stopped paths (absorbed, or whose next jump falls after the horizon) stay
    frozen in place until the active set is compressed.
    """
    nodes = chain.nodes
    absorbing = np.array([k == ABSORBING for k in chain.node_kind])
    hold = np.where(absorbing, 0.0, chain.holding_time)
    p_up = np.where(absorbing, 0.0, np.nan_to_num(chain.p_up)).astype(np.float32)
    moves = np.where(absorbing, 0, 2).astype(np.int32)  # step = moves * (u < p) - moves/2
    half = moves // 2
    L, C = watch_idx.size, cps.size
    level_of = np.full(nodes.size, -1, dtype=np.int32)
    level_of[watch_idx] = np.arange(L)
    cps_ext = np.append(cps, math.inf)

    first = np.full((n, L), math.inf)
    pmin = np.full((n, L), np.nan)
    pmax = np.full((n, L), np.nan)
    for j in range(L):
        if watch_idx[j] == start:
            first[:, j] = 0.0
        if track[j]:
            pmin[:, j], pmax[:, j] = math.inf, -math.inf
    cp_state = np.full((n, C), np.nan)
    final_idx = np.full(n, start, dtype=np.int64)
    final_t = np.zeros(n)
    events = [[(0.0, float(nodes[start]))] for _ in range(record)]

    pid = np.arange(n)
    cur = np.full(n, start, dtype=np.int32)
    t = np.zeros(n)
    cp_next = np.zeros(n, dtype=np.int64)
    tracked = [j for j in range(L) if track[j]]
    finite = math.isfinite(horizon)
    steps = 0
    while pid.size and steps < max_steps:
        steps += 1
        h = hold[cur]
        t_new = t + h
        if C:
            while True:
                due = cps_ext[cp_next] < t_new
                if not due.any():
                    break
                cp_state[pid[due], cp_next[due]] = nodes[cur[due]]
                cp_next += due
        u = rng.random(pid.size, dtype=np.float32)
        step = moves[cur] * (u < p_up[cur]) - half[cur]
        if finite:
            ok = t_new <= horizon
            cur = cur + step * ok
            t = np.where(ok, t_new, t)
        else:
            ok = True
            cur = cur + step
            t = t_new
        lv = level_of[cur]
        hit = lv >= 0
        if hit.any():
            ph, lh = pid[hit], lv[hit]
            fresh = np.isinf(first[ph, lh])
            first[ph[fresh], lh[fresh]] = t[hit][fresh]
        for j in tracked:
            seen = np.isfinite(first[pid, j])
            x = nodes[cur]
            pmin[pid[seen], j] = np.minimum(pmin[pid[seen], j], x[seen])
            pmax[pid[seen], j] = np.maximum(pmax[pid[seen], j], x[seen])
        if record:
            for pos in np.flatnonzero((pid < record) & ok & (step != 0)):
                events[pid[pos]].append((float(t[pos]), float(nodes[cur[pos]])))
        if steps % COMPRESS_EVERY == 0:
            live = ~absorbing[cur] & (t + hold[cur] <= horizon)
            if C:
                live |= cps_ext[cp_next] < math.inf
                live &= ~absorbing[cur] | (cps_ext[cp_next] < t)
            gone = ~live
            final_idx[pid[gone]], final_t[pid[gone]] = cur[gone], t[gone]
            pid, cur, t, cp_next = pid[live], cur[live], t[live], cp_next[live]
    final_idx[pid], final_t[pid] = cur, t
    absorbed = absorbing[final_idx]
    unfinished = np.zeros(n, dtype=bool)
    if steps >= max_steps:
        unfinished[pid] = ~absorbing[cur] & (t + hold[cur] <= horizon)
    # checkpoints after the path stopped moving
    for c in range(C):
        rest = np.isnan(cp_state[:, c])
        cp_state[rest, c] = nodes[final_idx[rest]]
    # running extremes include the state at the first hit itself
    for j in tracked:
        seen = np.isfinite(first[:, j])
        pmin[seen, j] = np.minimum(pmin[seen, j], nodes[watch_idx[j]])
        pmax[seen, j] = np.maximum(pmax[seen, j], nodes[watch_idx[j]])
    return final_idx, final_t, absorbed, unfinished, first, pmin, pmax, cp_state, events


def simulate_paths(chain: GridChain, x0: float, horizon: float, n_paths: int, seed: int,
                   watch_levels=(), checkpoints=(), record_paths=0, max_steps=MAX_STEPS,
                   extreme_levels=(), workers=None) -> PathEnsemble:
    """Run ``n_paths`` chain paths from the node nearest ``x0`` up to ``horizon``.

    Paths are split into blocks of ``BLOCK`` with one RNG stream per block,
    derived from ``(seed, block)``, so the ensemble does not depend on how
    blocks are scheduled.  The chain's end nodes are always watch levels.
    Running extremes after the first hit are kept for ``extreme_levels``.
    ``workers`` threads run blocks concurrently (default: ``default_workers()``).
    """
    if not horizon > 0:
        raise BadParam("horizon must be positive")
    if n_paths < 1:
        raise BadParam("n_paths must be positive")
    start = chain.node_index(x0)
    levels = [float(chain.nodes[0]), float(chain.nodes[-1])] + [float(v) for v in watch_levels]
    levels += [float(v) for v in extreme_levels]
    watch_idx = []
    for v in levels:
        k = chain.node_index(v)
        if not math.isclose(chain.nodes[k], v, rel_tol=0, abs_tol=1e-9 * max(1.0, abs(v))):
            raise BadParam(f"watch level {v} is not a chain node; pass it in extra_nodes")
        watch_idx.append(k)
    watch_idx = np.array(sorted(set(watch_idx)), dtype=np.int64)
    track = np.array([any(chain.node_index(v) == k for v in extreme_levels) for k in watch_idx])
    cps = np.sort(np.asarray(checkpoints, dtype=float))
    record = min(record_paths, EVENT_CAP, n_paths)

    def job(block):
        n = min(BLOCK, n_paths - block * BLOCK)
        return _run_block(chain, start, horizon, n, _block_rng(seed, block), watch_idx, track, cps,
                          record if block == 0 else 0, max_steps)

    blocks = range(-(-n_paths // BLOCK))
    workers = default_workers() if workers is None else max(1, int(workers))
    if workers == 1 or len(blocks) == 1:
        parts = [job(b) for b in blocks]
    else:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(job, blocks))
    cat = [np.concatenate([p[k] for p in parts]) for k in range(8)]
    idx, t, absorbed, unfinished, first, pmin, pmax, cp_state = cat
    truncated = chain.truncated[idx] & absorbed
    return PathEnsemble(
        seed, float(horizon), chain.label, chain.descriptor, float(chain.nodes[start]),
        chain.nodes[idx], t, absorbed, truncated, unfinished,
        chain.nodes[watch_idx], first, pmin, pmax, cps, cp_state, parts[0][8][:record], chain.scale,
    )


# --------------------------------------------------------------------------
# Statistics
# --------------------------------------------------------------------------


@dataclass
class HittingStats:
    a: float
    b: float
    p_hit_b_first: float
    p_se: float
    mean_exit_time: float
    time_se: float
    n_exited: int
    n_paths: int

    def to_json(self):
        return dict(self.__dict__)


def hitting_stats(ens: PathEnsemble, a: float, b: float) -> HittingStats:
    """First exit of ``(a, b)``: probability of leaving at ``b`` and mean exit time."""
    if not a < ens.x0 < b:
        raise BadParam(f"need a < x0 < b, got {a}, {ens.x0}, {b}")
    ta = ens.first_hit[:, ens.level_index(a)]
    tb = ens.first_hit[:, ens.level_index(b)]
    tau = np.minimum(ta, tb)
    ex = np.isfinite(tau)
    n = int(ex.sum())
    if n == 0:
        raise NoExits(f"no path left ({a}, {b}) before the horizon")
    at_b = (tb < ta)[ex].astype(float)
    p = pairwise_sum(at_b) / n
    times = tau[ex]
    mean = pairwise_sum(times) / n
    sd = float(np.std(times, ddof=1)) if n > 1 else 0.0
    return HittingStats(a, b, p, math.sqrt(p * (1 - p) / n), mean, sd / math.sqrt(n), n, ens.n_paths)


def clopper_pearson(k, n, level=CI_LEVEL):
    ci = stats.binomtest(int(k), int(n)).proportion_ci(confidence_level=level, method="exact")
    return float(ci.low), float(ci.high)


@dataclass
class PayoffStats:
    n: int
    min_payoff: float
    mean: float
    std_err: float
    frac_positive: float
    frac_positive_ci: tuple
    admissibility_violations: int
    admissibility_bound: float

    def to_json(self):
        d = dict(self.__dict__)
        d["frac_positive_ci"] = list(self.frac_positive_ci)
        return d


def payoff_stats(payoff, running_min, c):
    payoff = np.asarray(payoff, dtype=float)
    n = payoff.size
    k = int(np.sum(payoff > 0))
    sd = float(np.std(payoff, ddof=1)) if n > 1 else 0.0
    return PayoffStats(
        n, float(payoff.min()), pairwise_sum(payoff) / n, sd / math.sqrt(n), k / n,
        clopper_pearson(k, n), int(np.sum(np.asarray(running_min) < -c - 1e-12)), float(c),
    )


def evaluate_strategy(ens: PathEnsemble, strategy, c=None) -> PayoffStats:
    """Pathwise value of a certificate strategy over the ensemble.

    ``None`` (or the zero position) gives identically zero payoffs.
    """
    if c is None:
        c = 0.0 if strategy is None else strategy.admissibility_bound
    if strategy is None:
        z = np.zeros(ens.n_paths)
        return payoff_stats(z, z, c)
    j = ens.level_index(strategy.level)
    hit = ens.first_hit[:, j] <= ens.horizon
    if strategy.kind == "BuyHoldAfterHit":
        sign = 1.0 if strategy.direction == "long" else -1.0
        payoff = np.where(hit, sign * (ens.final_state - strategy.level), 0.0)
        worst = ens.post_min[:, j] if sign > 0 else ens.post_max[:, j]
        if np.isnan(worst).any():
            raise BadParam(f"ensemble did not track extremes at {strategy.level}; pass it in extreme_levels")
        running = np.where(hit, np.minimum(0.0, sign * (worst - strategy.level)), 0.0)
        return payoff_stats(payoff, running, c)
    if strategy.kind == "PostHitClock":
        # value of holding one unit after the hit grows like the clock
        payoff = np.where(hit, ens.horizon - np.minimum(ens.first_hit[:, j], ens.horizon), 0.0)
        return payoff_stats(payoff, np.zeros_like(payoff), c)
    raise BadParam(f"unknown strategy kind {strategy.kind!r}")


def simulate_demo_25(x0: float, T: float, dt: float, n_paths: int, seed: int) -> PathEnsemble:
    """Euler scheme for ``dY = -dt + Y dW`` until ``Y`` first drops to 0 at a
    grid time, then ``Y`` is set to 0 and grows like ``dY = dt``."""
    if not x0 > 0:
        raise BadParam("x0 must be positive")
    if not (T > 0 and 0 < dt <= T / 100):
        raise BadParam("need T > 0 and 0 < dt <= T/100")
    n_steps = int(round(T / dt))
    sq = math.sqrt(dt)
    finals, hits = [], []
    for block, lo in enumerate(range(0, n_paths, BLOCK)):
        n = min(BLOCK, n_paths - lo)
        rng = _block_rng(seed, block)
        y = np.full(n, float(x0))
        t0 = np.full(n, math.inf)
        alive = np.arange(n)
        for k in range(1, n_steps + 1):
            if alive.size == 0:
                break
            ya = y[alive]
            ya = ya - dt + ya * sq * rng.standard_normal(alive.size)
            down = ya <= 0.0
            y[alive] = ya
            hit = alive[down]
            t0[hit] = k * dt
            y[hit] = 0.0
            alive = alive[~down]
        # after the hit the path is deterministic
        post = np.isfinite(t0)
        y[post] = T - t0[post]
        finals.append(y)
        hits.append(t0)
    y, t0 = np.concatenate(finals), np.concatenate(hits)
    first = t0[:, None]
    post_min = np.where(np.isfinite(first), 0.0, math.inf)
    post_max = np.where(np.isfinite(first), y[:, None], -math.inf)
    n = y.size
    return PathEnsemble(
        seed, float(T), "demo_25", {"scheme": "euler", "dt": dt, "steps": n_steps}, float(x0),
        y, np.full(n, float(T)), np.zeros(n, bool), np.zeros(n, bool), np.zeros(n, bool),
        np.array([0.0]), first, post_min, post_max, np.empty(0), np.empty((n, 0)),
    )


@dataclass
class MartingaleReport:
    transform: str
    band: tuple
    x0: float
    rows: list  # (t, mean, se, passed)

    @property
    def passed(self):
        return all(r[3] for r in self.rows)

    def to_json(self):
        return {"transform": self.transform, "band": list(self.band), "x0": self.x0, "passed": self.passed,
                "checkpoints": [{"t": t, "mean": m, "se": se, "pass": ok} for t, m, se, ok in self.rows]}

    def to_csv(self):
        rows = ["t,mean,se,pass"] + [f"{float(t)!r},{float(m)!r},{float(se)!r},{int(ok)}" for t, m, se, ok in self.rows]
        return "\n".join(rows) + "\n"


def martingale_test(ens: PathEnsemble, checkpoints=None, stop_band=None, transform="identity", k_se=3.0):
    """Stopped-martingale check ``E[Z_(t ^ tau)] = Z_0`` at each checkpoint,
    with ``tau`` the exit time of ``stop_band`` and ``Z`` either ``X`` or ``s(X)``."""
    cps = ens.checkpoints if checkpoints is None else np.asarray(checkpoints, dtype=float)
    lo, hi = stop_band
    jl, jh = ens.level_index(lo), ens.level_index(hi)
    tl, th = ens.first_hit[:, jl], ens.first_hit[:, jh]
    tau = np.minimum(tl, th)
    exit_val = np.where(tl < th, lo, hi)
    if transform == "identity":
        f = lambda v: np.asarray(v, dtype=float)  # noqa: E731
    elif transform == "scale":
        if ens.s_of is None:
            raise BadParam("ensemble carries no scale function")
        f = lambda v: np.asarray(ens.s_of(v), dtype=float)  # noqa: E731
    else:
        raise BadParam(f"unknown transform {transform!r}")
    z0 = float(f(ens.x0))
    rows = []
    for t in cps:
        c = int(np.flatnonzero(ens.checkpoints == t)[0])
        vals = np.where(tau <= t, exit_val, ens.checkpoint_states[:, c])
        z = f(vals)
        n = z.size
        mean = pairwise_sum(z) / n
        se = float(np.std(z, ddof=1)) / math.sqrt(n)
        rows.append((float(t), mean, se, bool(abs(mean - z0) <= k_se * se + 1e-12)))
    return MartingaleReport(transform, (float(lo), float(hi)), float(ens.x0), rows)
