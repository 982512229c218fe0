"""Sampling synthetic bidder valuations and inspecting their structure.

A valuation maps a bundle (a 0/1 vector over m items) to a non-negative
value, is monotone (adding items never hurts), and is normalized so the
full bundle is worth at most 1. This script draws a few random instances,
prints values for hand-picked bundles, and spot-checks monotonicity.
"""

import numpy as np

import iterauction as ia

# --- draw an auction instance: 3 bidders, 6 items -------------------------
cfg = ia.GeneratorConfig(n=3, m=6)
inst = ia.generate_instance(cfg, seed=42)
m = cfg.m

print(f"instance with n={cfg.n} bidders, m={cfg.m} items")
print(f"optimal welfare (brute force over all allocations): "
      f"{inst.optimal_welfare:.4f}")

# --- query some bundles ---------------------------------------------------
empty = np.zeros(m, dtype=int)
full = np.ones(m, dtype=int)
half = np.array([1, 0, 1, 0, 1, 0])

for i, v in enumerate(inst.values):
    print(f"bidder {i}: v(empty)={v.value(empty):.3f}  "
          f"v(half)={v.value(half):.3f}  v(full)={v.value(full):.3f}")

# --- monotonicity spot check ----------------------------------------------
rng = np.random.default_rng(0)
violations = 0
for _ in range(2000):
    a = rng.integers(0, 2, m)
    b = np.maximum(a, rng.integers(0, 2, m))  # b is a superset of a
    for v in inst.values:
        if v.value(a) > v.value(b) + 1e-12:
            violations += 1
print(f"monotonicity violations over 2000 containment pairs x 3 bidders: "
      f"{violations}")

# --- batch evaluation matches scalar evaluation ---------------------------
X = rng.integers(0, 2, (8, m))
batch = inst.values[0].value_batch(X)
scalar = np.array([inst.values[0].value(x) for x in X])
print(f"batch vs scalar max deviation: {np.abs(batch - scalar).max():.2e}")
