"""
Scoring partitions with NKCV2
=============================

Build the evaluation context for a small two-cluster dataset, look at the
interaction graph, then score a few partitions. Lower is better.
"""

import numpy as np

from nkclust import (EvalContext, GaussianModelConfig, delta_evaluate, evaluate, generate_gaussian_model,
                     subfunction_values)

ds, truth = generate_gaussian_model(GaussianModelConfig(n_clusters=2, dims=2, n_objects=120, seed=7))

# The context is built once per dataset: distances, densities, groups, thresholds.
ctx = EvalContext.from_dataset(ds, k=3)
print("objects:", ctx.n, " K:", ctx.k)
print("group of object 0:", ctx.graph.groups[0].tolist())
t = ctx.thresholds
print(f"thresholds c1={t.c1:.3f} c2={t.c2:.3f} c3={t.c3:.3f} c_rho={t.c_rho:.3f}")

# Ground truth against a few alternatives
one = np.ones(ctx.n, dtype=np.int64)
singletons = np.arange(1, ctx.n + 1)
rng = np.random.default_rng(0)
noisy = truth.copy()
noisy[rng.choice(ctx.n, 10, replace=False)] = 0
for name, x in [("truth", truth), ("one cluster", one), ("all singletons", singletons),
                ("truth with 10 noise labels", noisy)]:
    print(f"{name:28s} f = {evaluate(x, ctx):9.3f}")

# Each subfunction reads K+1 labels, so the cost of a single label change
# is cheap to compute. Flip one object to the wrong cluster:
i = 5
wrong = 2 if truth[i] == 1 else 1
print(f"moving object {i} to cluster {wrong} changes f by {delta_evaluate(truth, i, wrong, ctx):+.3f}")

# Largest contributions under the one-cluster partition: pairs that are far
# apart but share a label.
vals = subfunction_values(one, ctx)
print("worst subfunctions (one cluster):", np.argsort(vals)[::-1][:5].tolist())
