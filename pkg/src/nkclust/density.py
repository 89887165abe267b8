"""Pairwise distances, cutoff distance, local densities and density ordering."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .dataset import Dataset

__all__ = [
    "DensityProfile",
    "Kernel",
    "cutoff_distance",
    "density_order",
    "density_profile",
    "local_densities",
    "nearest_higher_density",
    "pairwise_distances",
]


class Kernel(str, enum.Enum):
    GAUSSIAN = "gaussian"
    FLAT = "flat"


@dataclass(frozen=True)
class DensityProfile:
    """Local densities plus distance/index of each object's nearest denser object."""

    rho: np.ndarray
    epsilon: float
    delta: np.ndarray
    nhd: np.ndarray

    @property
    def n(self) -> int:
        return self.rho.size

    def to_csv(self, path) -> None:
        """Dump (rho, delta, nhd) for decision-graph plotting."""
        with open(path, "w") as fh:
            fh.write("index,rho,delta,nhd\n")
            for i in range(self.n):
                fh.write(f"{i},{self.rho[i]!r},{self.delta[i]!r},{int(self.nhd[i])}\n")


def pairwise_distances(ds: Dataset | np.ndarray) -> np.ndarray:
    """Exact N x N Euclidean distance matrix (read-only)."""
    x = ds.objects if isinstance(ds, Dataset) else np.asarray(ds, dtype=np.float64)
    dm = squareform(pdist(x, "euclidean"))
    dm.setflags(write=False)
    return dm


def cutoff_distance(dm: np.ndarray, target_fraction: float = 0.02) -> float:
    """Cutoff giving an average flat-kernel neighbour count of ~``target_fraction`` * N.

    Returns the off-diagonal distance at rank ceil(fraction * N(N-1)/2).
    """
    n = dm.shape[0]
    if n < 2:
        raise ValueError("need at least 2 objects")
    if not 0.0 < target_fraction < 1.0:
        raise ValueError("target_fraction must lie in (0, 1)")
    pairs = np.sort(dm[np.triu_indices(n, k=1)])
    if pairs[-1] <= 0.0:
        raise ValueError("duplicate-only dataset: all pairwise distances are zero")
    # tolerance keeps e.g. 0.02 * 4950 from rounding up to rank 100
    rank = max(1, math.ceil(target_fraction * pairs.size - 1e-9))
    eps = float(pairs[min(rank, pairs.size) - 1])
    if eps == 0.0:
        # many duplicates: fall back to the smallest positive distance
        eps = float(pairs[pairs > 0.0][0])
    return eps


def local_densities(dm: np.ndarray, epsilon: float, kernel: Kernel | str = Kernel.GAUSSIAN) -> np.ndarray:
    """Kernel density mass around each object, self-term included."""
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    kernel = Kernel(kernel)
    if kernel is Kernel.GAUSSIAN:
        rho = np.exp(-(dm ** 2) / (2.0 * epsilon ** 2)).sum(axis=1)
    else:
        rho = (dm < epsilon).sum(axis=1).astype(np.float64)
    return rho


def density_order(rho: np.ndarray) -> np.ndarray:
    """Indices from densest to sparsest; equal densities ordered by index."""
    return np.lexsort((np.arange(rho.size), -rho))


def nearest_higher_density(dm: np.ndarray, rho: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Index and distance of each object's nearest denser object.

    "Denser" follows the total order (rho descending, index ascending). The
    top object of that order is linked to its nearest object of any density.
    Distance ties go to the lower index.
    """
    n = rho.size
    order = density_order(rho)
    rank = np.empty(n, dtype=np.int64)
    rank[order] = np.arange(n)
    nhd = np.empty(n, dtype=np.int64)
    delta = np.empty(n)
    for i in range(n):
        if rank[i] == 0:
            mask = np.ones(n, dtype=bool)
            mask[i] = False
        else:
            mask = rank < rank[i]
        cand = np.flatnonzero(mask)
        j = cand[np.argmin(dm[i, cand])]  # argmin returns the first, i.e. lowest index
        nhd[i] = j
        delta[i] = dm[i, j]
    return nhd, delta


def density_profile(dm: np.ndarray, target_fraction: float = 0.02,
                    kernel: Kernel | str = Kernel.GAUSSIAN) -> DensityProfile:
    eps = cutoff_distance(dm, target_fraction)
    rho = local_densities(dm, eps, kernel)
    nhd, delta = nearest_higher_density(dm, rho)
    for a in (rho, delta, nhd):
        a.setflags(write=False)
    return DensityProfile(rho=rho, epsilon=eps, delta=delta, nhd=nhd)
