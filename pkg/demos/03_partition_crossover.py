"""
Partition crossover
===================

Two parents that disagree in separate regions of the dataset. Partition
crossover splits the disagreement into independent components and takes
each from whichever parent scores better there.
"""

import numpy as np

from nkclust import (EvalContext, GaussianModelConfig, evaluate, generate_gaussian_model, partition_crossover,
                     recombination_graph, renumber)

ds, truth = generate_gaussian_model(GaussianModelConfig(n_clusters=4, dims=2, n_objects=200, seed=3))
ctx = EvalContext.from_dataset(ds, 3)
rng = np.random.default_rng(5)

# Each parent damages a different pair of clusters.
p1, p2 = truth.copy(), truth.copy()
p1[(truth == 1) & (rng.random(ctx.n) < 0.3)] = 2
p2[(truth == 3) & (rng.random(ctx.n) < 0.3)] = 4
p2 = renumber(p1, 10 - p2)  # scrambled label names are matched up first

comp, q = recombination_graph(p1, p2, ctx)
print(f"parents differ in {np.count_nonzero(comp >= 0)} positions forming {q} components")

res = partition_crossover(p1, p2, ctx, details=True)
for c in range(q):
    pick = "p2" if res.from_p2[c] else "p1"
    print(f"  component {c}: size {np.count_nonzero(comp == c):3d}  "
          f"h1={res.h1[c]:8.3f} h2={res.h2[c]:8.3f} -> {pick}")

print(f"f(p1)={evaluate(p1, ctx):.3f}  f(p2)={evaluate(p2, ctx):.3f}  "
      f"f(child)={evaluate(res.offspring, ctx):.3f}  f(truth)={evaluate(truth, ctx):.3f}")
