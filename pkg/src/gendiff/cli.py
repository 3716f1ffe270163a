"""Command-line front end.

    gendiff catalog
    gendiff classify  --model counterexample_nondc
    gendiff verdict   --model sticky_bm --rho 2 --x0 0 --horizon 1
    gendiff simulate  --model skew_bm --alpha 0.3 --x0 0 --horizon 5 --seed 1 --exit -1 1
    gendiff arbitrage --model counterexample_reflecting --x0 1 --horizon 1 --n-paths 100000 --seed 7
    gendiff report    --model sticky_bm --x0 0 --horizon 1 --seed 3

``--model`` is a catalog name, ``demo_25`` (arbitrage only) or a path to a
YAML/JSON model spec.  Exit status: 0 ok, 2 invalid input, 3 a
theorem-consistency contradiction.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import characteristics as ch
from .boundary import classify_boundary, reference_point
from .errors import GendiffError, NeedsDeclaration, ParseError, ValidationError
from .modelspec import load_model_spec
from .regularity import InverseScale, dc_check
from .reports import dumps, envelope
from .simulate import build_chain, evaluate_strategy, hitting_stats, simulate_demo_25, simulate_paths
from .verdict import (
    ArbitrageDescriptor,
    DemoMarket,
    _dc_windows,
    arbitrage_certificate,
    contradictions,
    horizon_to_json,
    na_verdict,
    parse_horizon,
    theorem_consistency,
    verdict_invariant_violations,
)

COMMANDS = ("catalog", "classify", "verdict", "simulate", "arbitrage", "report")
EXIT_OK, EXIT_INVALID, EXIT_INCONSISTENT = 0, 2, 3
DEMO = "demo_25"


@dataclass
class RunConfig:
    command: str
    model: str | None = None
    x0: float | None = None
    horizon: object = 1.0
    n_paths: int = 100_000
    cells: int = 128
    seed: int | None = None
    out: str | None = None
    format: str = "json"
    params: dict = field(default_factory=dict)
    exit_interval: tuple | None = None
    window: tuple | None = None
    dc_levels: int = 12
    dt: float = 1e-4

    def validate(self):
        problems = []
        if self.command not in COMMANDS:
            problems.append(f"unknown command {self.command!r}")
        if self.command != "catalog" and not self.model:
            problems.append("--model is required")
        if self.command in ("simulate", "arbitrage") and self.seed is None:
            problems.append("--seed is required for simulate and arbitrage")
        try:
            h = parse_horizon(self.horizon)
        except GendiffError as exc:
            problems.append(str(exc))
        else:
            if math.isinf(h) and self.command != "verdict":
                problems.append("horizon 'inf' is only valid for verdict")
        if self.n_paths < 1 or self.cells < 4:
            problems.append("--n-paths must be >= 1 and --cells >= 4")
        if self.format not in ("json", "csv"):
            problems.append(f"unknown format {self.format!r}")
        if self.format == "csv" and self.command not in ("classify", "simulate"):
            problems.append("csv output is available for classify and simulate")
        if problems:
            raise ValidationError(problems)

    def describe(self):
        d = {"model": self.model, "params": self.params}
        if self.command != "catalog":
            d["x0"] = self.x0
        if self.command in ("verdict", "simulate", "arbitrage", "report"):
            d["horizon"] = horizon_to_json(parse_horizon(self.horizon))
        if self.command in ("simulate", "arbitrage", "report"):
            d.update(n_paths=self.n_paths, cells=self.cells, seed=self.seed)
        if self.command == "simulate" and self.exit_interval:
            d["exit"] = list(self.exit_interval)
        if self.command == "classify":
            d.update(window=list(self.window) if self.window else None, dc_levels=self.dc_levels)
        if self.model == DEMO:
            d["dt"] = self.dt
        return d


# --------------------------------------------------------------------------


def load_model(cfg: RunConfig):
    if cfg.model in ch.CATALOG:
        return ch.builtin(cfg.model, **cfg.params)
    path = Path(cfg.model)
    if not path.exists():
        raise ParseError(f"neither a catalog model {list(ch.CATALOG)} nor a readable file", "model")
    if cfg.params:
        raise ParseError("--rho/--alpha apply to catalog models only", "model")
    return load_model_spec(path)


def _x0(model, cfg):
    return reference_point(model.interval) if cfg.x0 is None else float(cfg.x0)


def cmd_catalog(cfg):
    return {"models": [{"name": name, "defaults": {k: v for k, v in ch.DEFAULT_PARAMS[name].items()
                                                   if isinstance(v, (int, float))},
                        "characteristics": ch.builtin(name).summary()} for name in ch.CATALOG]}


def _boundaries(model):
    out = []
    for side in ("lower", "upper"):
        try:
            out.append(classify_boundary(model, side).to_json())
        except NeedsDeclaration as exc:
            raise ValidationError([str(exc)]) from None
    return out


def cmd_classify(cfg, model=None):
    model = model or load_model(cfg)
    x0 = _x0(model, cfg)
    window = cfg.window or _dc_windows(model, x0)[0]
    reports = [dc_check(model.scale, window, cfg.dc_levels)]
    image = (float(model.scale(window[0])), float(model.scale(window[1])))
    reports.append(dc_check(InverseScale(model.scale), image, cfg.dc_levels))
    return {"model": model.summary(), "boundaries": _boundaries(model),
            "dc": [r.to_json() for r in reports]}, reports


def cmd_verdict(cfg, model=None):
    model = model or load_model(cfg)
    v = na_verdict(model, _x0(model, cfg), cfg.horizon)
    checks = theorem_consistency(v.evidence, v.horizon, v)
    bad = contradictions(checks)
    violations = verdict_invariant_violations(v)
    result = {**v.to_json(), "theorem_consistency": [{"statement": k, "status": s} for k, s in checks],
              "contradictions": bad, "invariant_violations": violations}
    return result, bad or violations


def cmd_simulate(cfg, model=None):
    model = model or load_model(cfg)
    x0 = _x0(model, cfg)
    levels = tuple(cfg.exit_interval or ())
    chain = build_chain(model, cfg.cells, extra_nodes=(x0, *levels))
    ens = simulate_paths(chain, x0, parse_horizon(cfg.horizon), cfg.n_paths, cfg.seed, watch_levels=levels)
    result = {"ensemble": ens.summary()}
    if levels:
        result["exit"] = hitting_stats(ens, *levels).to_json()
    return result, ens


def cmd_arbitrage(cfg, model=None):
    horizon = parse_horizon(cfg.horizon)
    if cfg.model == DEMO:
        x0 = 0.1 if cfg.x0 is None else float(cfg.x0)
        market = DemoMarket(x0, horizon)
        cert = arbitrage_certificate(market, x0, horizon)
        ens = simulate_demo_25(x0, horizon, cfg.dt, cfg.n_paths, cfg.seed)
        stats = evaluate_strategy(ens, cert)
        return {"model": DEMO, "verdict": None,
                "certificate": {"type": type(cert).__name__, **cert.to_json()},
                "hit_frequency": ens.hit_frequency(cert.level),
                "payoff": stats.to_json()}, False
    model = model or load_model(cfg)
    verdict, inconsistent = cmd_verdict(cfg, model)
    result = {"model": model.label, "verdict": verdict, "certificate": verdict["certificate"], "payoff": None}
    cert = verdict["certificate"]
    if cert is not None and cert["type"] == "ArbitrageDescriptor":
        desc = ArbitrageDescriptor(cert["kind"], cert["level"], cert["direction"], cert["admissibility_bound"])
        x0 = _x0(model, cfg)
        chain = build_chain(model, cfg.cells, extra_nodes=(x0, desc.level))
        ens = simulate_paths(chain, x0, horizon, cfg.n_paths, cfg.seed, extreme_levels=(desc.level,))
        result["hit_frequency"] = ens.hit_frequency(desc.level)
        result["payoff"] = evaluate_strategy(ens, desc).to_json()
    return result, inconsistent


def cmd_report(cfg):
    model = load_model(cfg)
    classify, _ = cmd_classify(cfg, model)
    verdict, inconsistent = cmd_verdict(cfg, model)
    result = {"classify": classify, "verdict": verdict}
    if cfg.seed is not None and not math.isinf(parse_horizon(cfg.horizon)):
        result["simulate"] = cmd_simulate(cfg, model)[0]
        arb, _ = cmd_arbitrage(cfg, model)
        result["arbitrage"] = {k: v for k, v in arb.items() if k != "verdict"}
    return result, inconsistent


def run(cfg: RunConfig):
    """Execute ``cfg``; returns ``(exit_status, report_or_text)``."""
    cfg.validate()
    inconsistent = False
    if cfg.command == "catalog":
        result = cmd_catalog(cfg)
    elif cfg.command == "classify":
        result, reports = cmd_classify(cfg)
        if cfg.format == "csv":
            return EXIT_OK, "".join(f"# {r.target} {list(r.window)}\n{r.to_csv()}" for r in reports)
    elif cfg.command == "verdict":
        result, inconsistent = cmd_verdict(cfg)
    elif cfg.command == "simulate":
        result, ens = cmd_simulate(cfg)
        if cfg.format == "csv":
            return EXIT_OK, ens.hitting_csv()
    elif cfg.command == "arbitrage":
        result, inconsistent = cmd_arbitrage(cfg)
    else:
        result, inconsistent = cmd_report(cfg)
    report = dumps(envelope(cfg.command, cfg.describe(), result))
    return (EXIT_INCONSISTENT if inconsistent else EXIT_OK), report


def build_parser():
    p = argparse.ArgumentParser(prog="gendiff", description="General one-dimensional diffusion toolkit.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--model", help="catalog name, demo_25, or path to a YAML/JSON model spec")
    p.add_argument("--rho", type=float, help="sticky_bm stickiness")
    p.add_argument("--alpha", type=float, help="skew_bm skewness")
    p.add_argument("--x0", type=float)
    p.add_argument("--horizon", default="1", help="positive real, or 'inf' (verdict only)")
    p.add_argument("--n-paths", type=int, default=100_000)
    p.add_argument("--cells", type=int, default=128)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--exit", nargs=2, type=float, metavar=("A", "B"), help="simulate: report exit of (A, B)")
    p.add_argument("--window", nargs=2, type=float, metavar=("LO", "HI"), help="classify: dc window")
    p.add_argument("--dc-levels", type=int, default=12)
    p.add_argument("--dt", type=float, default=1e-4, help="demo_25 time step")
    return p


def config_from_args(ns) -> RunConfig:
    params = {k: getattr(ns, k) for k in ("rho", "alpha") if getattr(ns, k) is not None}
    return RunConfig(ns.command, ns.model, ns.x0, ns.horizon, ns.n_paths, ns.cells, ns.seed, ns.out, ns.format,
                     params, tuple(ns.exit) if ns.exit else None, tuple(ns.window) if ns.window else None,
                     ns.dc_levels, ns.dt)


def main(argv=None):
    cfg = config_from_args(build_parser().parse_args(argv))
    try:
        status, text = run(cfg)
    except ValidationError as exc:
        print("validation error:", *exc.violations, sep="\n  ", file=sys.stderr)
        return EXIT_INVALID
    except GendiffError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
