"""
Choosing a clustering with an internal criterion
================================================

Run k-means, DBSCAN and density peaks over a parameter grid, then let
NKCV2 and the silhouette width pick one candidate each. The generator's
labels are used only to report how good the choices were.
"""

import numpy as np

from nkclust import (EvalContext, GaussianModelConfig, adjusted_rand_index, candidate_grid, count_clusters,
                     generate_gaussian_model, nkcv2_criterion, pairwise_distances, select_best,
                     silhouette_criterion)

ds, truth = generate_gaussian_model(GaussianModelConfig(n_clusters=3, dims=2, n_objects=300, seed=1))
dm = pairwise_distances(ds)

cands = candidate_grid(ds, np.random.default_rng(1), dm=dm)
print(f"{len(cands)} candidates")

for crit in (nkcv2_criterion(EvalContext.from_distances(dm, 3)), silhouette_criterion(dm)):
    idx, score = select_best(cands, crit)
    chosen = cands.partitions[idx]
    prov = cands.provenance[idx]
    print(f"{crit.name:10s} -> #{idx:2d} {prov['algorithm']:7s} {prov['params']}")
    print(f"{'':13s}score {score.value:.4f}, {count_clusters(chosen)} clusters, "
          f"ARI {adjusted_rand_index(chosen, truth):.3f}")

# The full table: how every candidate scores against the truth
aris = [adjusted_rand_index(p, truth) for p in cands.partitions]
best = int(np.argmax(aris))
print(f"best available candidate: #{best} with ARI {aris[best]:.3f}")
