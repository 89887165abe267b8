"""Interaction graph between labels and the distance/density thresholds."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .density import DensityProfile

__all__ = ["InteractionGraph", "Thresholds", "build_interaction_graph", "compute_thresholds"]


@dataclass(frozen=True)
class InteractionGraph:
    """Groups M_i (K+1 members, ascending, always containing i) and their transpose.

    ``out_ptr``/``out_idx`` store, CSR style, for every object j the
    subfunctions p with j in M_p.
    """

    k: int
    groups: np.ndarray
    out_ptr: np.ndarray
    out_idx: np.ndarray

    @property
    def n(self) -> int:
        return self.groups.shape[0]

    @property
    def k_out(self) -> int:
        return int(np.diff(self.out_ptr).max())

    @property
    def n_incidences(self) -> int:
        return int(self.groups.size)

    def out_edges(self, j: int) -> np.ndarray:
        return self.out_idx[self.out_ptr[j]:self.out_ptr[j + 1]]

    def neighbors(self) -> np.ndarray:
        """(N, K) array of group members other than the group's own index."""
        n, k1 = self.groups.shape
        keep = self.groups != np.arange(n)[:, None]
        return self.groups[keep].reshape(n, k1 - 1)

    def to_edge_csv(self, path) -> None:
        """Edge list ``i,j`` meaning j is a member of M_i."""
        with open(path, "w") as fh:
            fh.write("i,j\n")
            for i, members in enumerate(self.groups):
                for j in members:
                    fh.write(f"{i},{int(j)}\n")


@dataclass(frozen=True)
class Thresholds:
    c1: float
    c2: float
    c3: float
    c_rho: float

    def as_array(self) -> np.ndarray:
        return np.array([self.c1, self.c2, self.c3, self.c_rho])


def _transpose(groups: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = groups.shape[0]
    owners = np.repeat(np.arange(n), groups.shape[1])
    members = groups.ravel()
    order = np.lexsort((owners, members))
    counts = np.bincount(members, minlength=n)
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=ptr[1:])
    return ptr, owners[order].astype(np.int64)


def build_interaction_graph(dm: np.ndarray, profile: DensityProfile, k: int) -> InteractionGraph:
    """Each group holds i, its nearest denser object, then its nearest others."""
    n = dm.shape[0]
    if k < 1:
        raise ValueError("K must be positive")
    if k + 1 > n:
        raise ValueError(f"K+1={k + 1} exceeds the number of objects ({n})")
    groups = np.empty((n, k + 1), dtype=np.int64)
    for i in range(n):
        a = int(profile.nhd[i])
        # stable sort: equal distances keep ascending index order
        by_dist = np.argsort(dm[i], kind="stable")
        fill = by_dist[(by_dist != i) & (by_dist != a)][: k - 1]
        groups[i] = np.sort(np.concatenate(([i, a], fill)))
    ptr, out = _transpose(groups)
    for a in (groups, ptr, out):
        a.setflags(write=False)
    return InteractionGraph(k=k, groups=groups, out_ptr=ptr, out_idx=out)


def compute_thresholds(dm: np.ndarray, graph: InteractionGraph, profile: DensityProfile) -> Thresholds:
    """Thresholds from the mean/population sd of within-group distances and densities."""
    n = graph.n
    nb = graph.neighbors()
    d = dm[np.arange(n)[:, None], nb]
    m_y, s_y = float(d.mean()), float(d.std())
    m_r, s_r = float(profile.rho.mean()), float(profile.rho.std())
    c_rho = m_r - s_r if m_r - s_r > 0.0 else m_r / 2.0
    return Thresholds(c1=m_y, c2=m_y + s_y, c3=m_y + 2.0 * s_y, c_rho=c_rho)
