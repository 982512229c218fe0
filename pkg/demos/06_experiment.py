"""Comparing query strategies across seeds, with statistics and CSVs.

Runs the full auction under two acquisition strategies -- the trained
upper-bound networks versus uniformly random queries -- on the same
seeded instances, then aggregates efficiency loss with a 95% confidence
interval, relative revenue, and a paired one-sided t-test. Everything is
written to CSV (summary table, per-seed table, pairwise comparison, and
per-round efficiency-loss paths), and per-seed results are cached so a
rerun resumes instead of recomputing.
"""

import pathlib

import iterauction as ia
from iterauction.training import TrainHyper

out_dir = pathlib.Path("demo-experiment-out")
config = ia.ExperimentConfig(
    generator=ia.GeneratorConfig(n=3, m=8),
    seeds=list(range(8)),
    mechanisms=["random", "uub"],
    mechanism_config=ia.MechanismConfig(
        q_init=6, q_round=3, q_max=12,
        train_hyper=TrainHyper(epochs=40),
    ),
    out_dir=str(out_dir),
)

result = ia.run_experiment(config)

print("per-mechanism aggregates over 8 seeds:")
for mech, agg in result["summary"].items():
    print(f"  {mech:8s} efficiency loss {agg['mean_efficiency_loss']:.2%} "
          f"+- {agg['ci95_half_width']:.2%}   "
          f"relative revenue {agg['mean_relative_revenue']:.2%}")

for mech, tt in result["comparisons"].items():
    print(f"\npaired one-sided t-test (random worse than {mech}): "
          f"p = {tt.p_value:.4f}"
          + ("  [degenerate]" if tt.degenerate else ""))

print("\nfiles written:")
for f in sorted(out_dir.glob("*.csv")):
    print(f"  {f}")
print(f"  {out_dir / 'results'} ({len(list((out_dir / 'results').glob('*.json')))} "
      f"cached per-seed results; rerunning this script resumes from them)")
