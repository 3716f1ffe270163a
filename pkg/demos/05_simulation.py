"""Grid-chain simulation against closed-form oracles, and an arbitrage in action.

Run: python demos/05_simulation.py   (about half a minute)
"""
from gendiff.characteristics import builtin
from gendiff.simulate import build_chain, evaluate_strategy, hitting_stats, simulate_paths
from gendiff.verdict import ArbitrageDescriptor

N = 20_000

for name, params, oracle in (("brownian", {}, 1.0), ("sticky_bm", {"rho": 2.0}, 3.0)):
    ch = build_chain(builtin(name, **params), 128, (-2.0, 2.0), extra_nodes=(-1.0, 1.0))
    h = hitting_stats(simulate_paths(ch, 0.0, 60.0, N, 1, watch_levels=(-1.0, 1.0)), -1.0, 1.0)
    print(f"{name:10s} mean exit of (-1,1): {h.mean_exit_time:.3f} +- {h.time_se:.3f}  (exact {oracle})")

ch = build_chain(builtin("skew_bm", alpha=0.3), 128, (-2.0, 2.0), extra_nodes=(-1.0, 1.0))
h = hitting_stats(simulate_paths(ch, 0.0, 60.0, N, 2, watch_levels=(-1.0, 1.0)), -1.0, 1.0)
print(f"skew_bm    P(leave at 1): {h.p_hit_b_first:.3f} +- {h.p_se:.3f}  (exact 0.3)")

# buy one unit the first time the reflected price touches 0, hold to T
ch = build_chain(builtin("counterexample_reflecting"), 128, extra_nodes=(1.0,))
ens = simulate_paths(ch, 1.0, 1.0, N, 3, extreme_levels=(0.0,))
ps = evaluate_strategy(ens, ArbitrageDescriptor("BuyHoldAfterHit", 0.0))
print(f"\nbuy-after-hit: min payoff {ps.min_payoff:.2e}, P(payoff > 0) in {tuple(round(c, 4) for c in ps.frac_positive_ci)}")
