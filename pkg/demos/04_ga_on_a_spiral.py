"""
The NK hybrid GA on a three-arm spiral
======================================

Elongated clusters are hard for centroid methods. Run k-means and the GA
on the same spiral and compare. Pass an evaluation budget on the command
line for a longer run (default 1e5; the acceptance suite uses 2e6).
"""

import sys
import time

import numpy as np

from nkclust import GaConfig, Stop, adjusted_rand_index, count_clusters, kmeans, make_spiral, run

budget = float(sys.argv[1]) if len(sys.argv) > 1 else 1e5
ds, truth = make_spiral()
print(f"{ds.n} objects, {count_clusters(truth)} arms")

km = kmeans(ds, 3, rng=np.random.default_rng(0))
print(f"k-means (k=3)   ARI {adjusted_rand_index(km, truth):.3f}")

t = time.perf_counter()
res = run(ds, GaConfig(stop=Stop("evaluations", budget), seed=0))
print(f"GA ({budget:g} evals, {res.generations} generations, {time.perf_counter() - t:.0f}s)")
print(f"  f = {res.best_fitness:.3f}, {count_clusters(res.best)} clusters, "
      f"ARI {adjusted_rand_index(res.best, truth):.3f}")

# Trace of the elitist best, sampled
step = max(1, len(res.fitness_trace) // 8)
print("  best f by generation:", " ".join(f"{v:.1f}" for v in res.fitness_trace[::step]))
