"""k-means, DBSCAN and density-peaks clustering, and the candidate-grid sweep."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.spatial.distance import cdist

from .dataset import Dataset, load_labels, save_labels
from .density import DensityProfile, density_order, density_profile, pairwise_distances

__all__ = [
    "CandidateSet",
    "KMeansResult",
    "candidate_grid",
    "dbscan",
    "dbscan_eps_values",
    "dbscan_min_pts",
    "density_peaks",
    "kmeans",
    "kmeans_objective",
]


def kmeans_objective(objects: np.ndarray, labels: np.ndarray) -> float:
    """Sum of squared distances to the cluster centroids."""
    total = 0.0
    for lab in np.unique(labels):
        pts = objects[labels == lab]
        total += float(((pts - pts.mean(axis=0)) ** 2).sum())
    return total


@dataclass
class KMeansResult:
    labels: np.ndarray
    objective: float
    history: list[float] = field(default_factory=list)  # objective per Lloyd iteration, best restart
    restarts: list[list[float]] = field(default_factory=list)


def _lloyd(x: np.ndarray, k: int, rng: np.random.Generator, max_iter: int):
    centers = x[rng.choice(x.shape[0], size=k, replace=False)].copy()
    assign = None
    history = []
    for _ in range(max_iter):
        d2 = cdist(x, centers, "sqeuclidean")
        new = d2.argmin(axis=1)
        if assign is not None and np.array_equal(new, assign):
            break
        assign = new
        counts = np.bincount(assign, minlength=k)
        for c in range(k):
            if counts[c]:
                centers[c] = x[assign == c].mean(axis=0)
        history.append(float(((x - centers[assign]) ** 2).sum()))
        empty = np.flatnonzero(counts == 0)
        if empty.size:
            own = ((x - centers[assign]) ** 2).sum(axis=1)
            for c in empty:
                far = int(own.argmax())
                centers[c] = x[far]
                own[far] = -1.0
    return assign, history


def kmeans(ds: Dataset | np.ndarray, k: int, restarts: int = 20, rng: np.random.Generator | None = None,
           max_iter: int = 300, full: bool = False):
    """Lloyd's algorithm from ``restarts`` Forgy initialisations; best objective kept.

    Returns labels 1..k (or a :class:`KMeansResult` with ``full=True``).
    """
    x = ds.objects if isinstance(ds, Dataset) else np.asarray(ds, dtype=np.float64)
    if not 1 <= k <= x.shape[0]:
        raise ValueError("k must lie in [1, N]")
    rng = rng if rng is not None else np.random.default_rng()
    best = None
    all_hist = []
    for _ in range(restarts):
        assign, hist = _lloyd(x, k, rng, max_iter)
        all_hist.append(hist)
        labels = assign.astype(np.int64) + 1
        obj = kmeans_objective(x, labels)
        if best is None or obj < best.objective:
            best = KMeansResult(labels, obj, hist)
    best.restarts = all_hist
    return best if full else best.labels


def dbscan(ds: Dataset | np.ndarray, eps: float, min_pts: int, dm: np.ndarray | None = None) -> np.ndarray:
    """Density-reachability clustering; unreachable non-core objects are noise (0).

    A border object joins the first cluster that reaches it in index-order scan.
    """
    if eps <= 0 or min_pts < 1:
        raise ValueError("eps must be positive and min_pts >= 1")
    if dm is None:
        dm = pairwise_distances(ds)
    n = dm.shape[0]
    neigh = dm <= eps
    core = neigh.sum(axis=1) >= min_pts
    labels = np.zeros(n, dtype=np.int64)
    current = 0
    for s in range(n):
        if not core[s] or labels[s]:
            continue
        current += 1
        labels[s] = current
        stack = [s]
        while stack:
            p = stack.pop()
            for q in np.flatnonzero(neigh[p]):
                if labels[q]:
                    continue
                labels[q] = current
                if core[q]:
                    stack.append(q)
    return labels


def density_peaks(ds: Dataset | None, n_prototypes: int, profile: DensityProfile | None = None,
                  dm: np.ndarray | None = None) -> np.ndarray:
    """Density-peaks clustering with the top ``n_prototypes`` of rho * delta as centres.

    The densest object's delta is taken as its largest distance, so it always
    ranks first and becomes a prototype. Remaining objects copy the label of
    their nearest denser neighbour, densest first.
    """
    if dm is None:
        dm = pairwise_distances(ds)
    if profile is None:
        profile = density_profile(dm)
    n = profile.n
    if not 1 <= n_prototypes <= n:
        raise ValueError("n_prototypes must lie in [1, N]")
    order = density_order(profile.rho)
    root = order[0]
    delta = profile.delta.copy()
    delta[root] = dm[root].max()
    gamma = profile.rho * delta
    rank = np.empty(n, dtype=np.int64)
    rank[order] = np.arange(n)
    by_gamma = np.lexsort((rank, -gamma))
    labels = np.zeros(n, dtype=np.int64)
    labels[by_gamma[:n_prototypes]] = np.arange(1, n_prototypes + 1)
    for i in order:
        if labels[i] == 0:
            labels[i] = labels[profile.nhd[i]]
    return labels


def dbscan_min_pts(dims: int) -> tuple[int, int, int]:
    return (3, 4, 5) if dims == 2 else (3, dims + 1, 2 * dims)


def dbscan_eps_values(dm: np.ndarray, dims: int) -> list[float]:
    """Mean distance to the k-th nearest neighbour for k in (t1, 5 t2, 10 t3)."""
    t1, t2, t3 = dbscan_min_pts(dims)
    n = dm.shape[0]
    sorted_d = np.sort(dm, axis=1)  # column 0 is the object itself
    out = []
    for k in (t1, 5 * t2, 10 * t3):
        k = min(k, n - 1)
        out.append(float(sorted_d[:, k].mean()))
    return out


@dataclass
class CandidateSet:
    partitions: list[np.ndarray]
    provenance: list[dict]

    def __len__(self):
        return len(self.partitions)

    def save(self, out_dir) -> Path:
        """Write ``cand_XXX.csv`` label files and a ``manifest.json``."""
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        entries = []
        for t, (p, prov) in enumerate(zip(self.partitions, self.provenance)):
            fname = f"cand_{t:03d}.csv"
            save_labels(out / fname, p)
            entries.append({"index": t, "file": fname, **prov})
        manifest = out / "manifest.json"
        manifest.write_text(json.dumps({"candidates": entries}, indent=2) + "\n")
        return manifest

    @classmethod
    def load(cls, out_dir) -> "CandidateSet":
        out = Path(out_dir)
        entries = json.loads((out / "manifest.json").read_text())["candidates"]
        parts, prov = [], []
        for e in entries:
            parts.append(load_labels(out / e["file"]))
            prov.append({k: v for k, v in e.items() if k not in ("index", "file")})
        return cls(parts, prov)


def candidate_grid(ds: Dataset, rng: np.random.Generator, dm: np.ndarray | None = None,
                   profile: DensityProfile | None = None, kmeans_restarts: int = 20) -> CandidateSet:
    """k-means and density peaks for 2..floor(sqrt(N)) clusters plus 9 DBSCAN settings."""
    n = ds.n
    if n < 9:
        raise ValueError("candidate grid needs at least 9 objects")
    if dm is None:
        dm = pairwise_distances(ds)
    if profile is None:
        profile = density_profile(dm)
    k_max = math.isqrt(n)
    parts, prov = [], []
    for k in range(2, k_max + 1):
        parts.append(kmeans(ds, k, kmeans_restarts, rng))
        prov.append({"algorithm": "kmeans", "params": {"k": k, "restarts": kmeans_restarts}})
    eps_values = dbscan_eps_values(dm, ds.dims)
    for min_pts in dbscan_min_pts(ds.dims):
        for eps in eps_values:
            parts.append(dbscan(ds, eps, min_pts, dm=dm))
            prov.append({"algorithm": "dbscan", "params": {"eps": eps, "min_pts": min_pts}})
    for m in range(2, k_max + 1):
        parts.append(density_peaks(ds, m, profile, dm))
        prov.append({"algorithm": "dp", "params": {"n_prototypes": m}})
    return CandidateSet(parts, prov)
