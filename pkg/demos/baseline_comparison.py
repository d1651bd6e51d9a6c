"""
What gradient tracking buys over plain diffusion
================================================

Both families mix dictionary copies over the same graph, but the tracked
protocol spends a second message per round to circulate a running estimate
of the global gradient, letting every local step aim at the network-wide
objective instead of the local one. Comparing at equal message budgets
(not equal rounds) keeps the accounting fair: one tracked round costs two
diffusion rounds.
"""

from distdict import (build_run_config, diffusion_baseline,
                      make_standard_problem, run)

_, problem = make_standard_problem()
base = {"agents": 5, "graph": "static_path", "tau_d": "5.0",
        "metric_stride": 50, "lam": str(problem.lam), "mu": str(problem.mu)}

# 500 tracked rounds and 1000 diffusion rounds both cost 1000 messages.
traces = {}
for variant in ("linearized", "plain"):
    config = build_run_config(dict(base, max_rounds=500, variant=variant))
    traces[f"tracking/{variant}"] = run(problem, config)
traces["diffusion"] = diffusion_baseline(
    problem, build_run_config(dict(base, max_rounds=1000)))

print(f"{'messages':>8s}  " + "  ".join(f"{name:>20s}" for name in traces))
print(" " * 10 + "  ".join(f"{'gap / consensus':>20s}" for _ in traces))
for budget in (100, 200, 500, 1000):
    cells = []
    for trace in traces.values():
        row = trace.row_at_messages(budget)
        cells.append(f"{row['delta']:9.3e} {row['cons_err']:9.2e}")
    print(f"{budget:8d}  " + "  ".join(f"{c:>20s}" for c in cells))

print("\nAt every budget the tracked variants sit at a smaller")
print("stationarity gap, and their copies agree orders of magnitude more")
print("tightly: diffusion's purely local steps keep re-injecting")
print("disagreement that its single mixing pass cannot remove.")
