"""Fitting a monotone network to bundle-value reports.

The network keeps all weights non-negative, hidden biases non-positive,
and uses a bounded ReLU with a learnable cutoff per neuron, so every
function it can represent is monotone non-decreasing with output >= 0 --
by construction, not by regularization. Training is plain Adam on a
smooth-L1 data loss with a projection back onto the constraint set after
every step.
"""

import numpy as np

import iterauction as ia
from iterauction.mvnn import InitHyper
from iterauction.training import TrainHyper

# --- build a training set from one bidder's true valuation ----------------
m = 6
inst = ia.generate_instance(ia.GeneratorConfig(n=1, m=m), seed=7)
truth = inst.values[0]

rng = np.random.default_rng(0)
bundles = {tuple(np.ones(m, dtype=int))}
while len(bundles) < 20:
    bundles.add(tuple(rng.integers(0, 2, m)))
reports = [(np.array(b), float(truth.value(np.array(b))))
           for b in sorted(bundles)]

# --- train ----------------------------------------------------------------
net = ia.train_mean(reports, [m, 10, 1], InitHyper(),
                    TrainHyper(epochs=100), seed=0)

X = np.array([b for b, _ in reports], dtype=float)
y = np.array([v for _, v in reports])
pred = net.forward(X)
print(f"train MAE on {len(reports)} reports: {np.abs(pred - y).mean():.4f}")

# --- generalization on unseen bundles -------------------------------------
X_test = rng.integers(0, 2, (200, m)).astype(float)
y_test = truth.value_batch(X_test.astype(int))
print(f"test  MAE on 200 fresh bundles:    "
      f"{np.abs(net.forward(X_test) - y_test).mean():.4f}")

# --- the learned function is monotone, guaranteed -------------------------
worst = 0.0
for _ in range(2000):
    a = rng.random(m)
    b = np.minimum(1.0, a + rng.random(m))  # b >= a coordinatewise
    worst = max(worst, float((net.forward(a[None]) - net.forward(b[None]))[0]))
print(f"worst monotonicity violation over 2000 ordered pairs: {worst:.2e}")
print(f"output at empty bundle (always >= 0): "
      f"{float(net.forward(np.zeros((1, m)))[0]):.4f}")
