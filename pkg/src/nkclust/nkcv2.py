"""NKCV2: a sum of N subfunctions, each reading the labels of one K+1 group.

Lower values are better. All dataset-dependent pieces (distances, densities,
the interaction graph and thresholds) are bundled once in an
:class:`EvalContext` and shared by every evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .dataset import Dataset, as_partition
from .density import DensityProfile, density_order, density_profile, pairwise_distances
from .graph import InteractionGraph, Thresholds, build_interaction_graph, compute_thresholds

__all__ = [
    "EvalContext",
    "alpha",
    "delta_evaluate",
    "evaluate",
    "subfunction",
    "subfunction_values",
]


@dataclass(frozen=True)
class EvalContext:
    dm: np.ndarray
    profile: DensityProfile
    graph: InteractionGraph
    thresholds: Thresholds
    # flat arrays handed to the kernels
    nbr: np.ndarray = field(init=False, repr=False)
    nbr_d: np.ndarray = field(init=False, repr=False)
    thr: np.ndarray = field(init=False, repr=False)
    a_in: np.ndarray = field(init=False, repr=False)
    a_out: np.ndarray = field(init=False, repr=False)
    a_noise: np.ndarray = field(init=False, repr=False)
    order: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        n = self.graph.n
        nbr = np.ascontiguousarray(self.graph.neighbors())
        nbr_d = np.ascontiguousarray(self.dm[np.arange(n)[:, None], nbr])
        thr = self.thresholds.as_array()
        a_in, a_out, a_noise = _kernels.edge_tables(nbr, nbr_d, self.profile.rho, thr)
        for name, value in (("nbr", nbr), ("nbr_d", nbr_d), ("thr", thr),
                            ("a_in", a_in), ("a_out", a_out), ("a_noise", a_noise),
                            ("order", density_order(self.profile.rho))):
            object.__setattr__(self, name, value)

    @classmethod
    def from_dataset(cls, ds: Dataset, k: int = 3, target_fraction: float = 0.02) -> "EvalContext":
        dm = pairwise_distances(ds)
        return cls.from_distances(dm, k, target_fraction)

    @classmethod
    def from_distances(cls, dm: np.ndarray, k: int = 3, target_fraction: float = 0.02) -> "EvalContext":
        profile = density_profile(dm, target_fraction)
        graph = build_interaction_graph(dm, profile, k)
        return cls(dm, profile, graph, compute_thresholds(dm, graph, profile))

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def k(self) -> int:
        return self.graph.k

    @property
    def rho(self) -> np.ndarray:
        return self.profile.rho

    def kernel_args(self) -> tuple:
        return (self.nbr, self.a_in, self.a_out, self.a_noise,
                self.graph.out_ptr, self.graph.out_idx)


def alpha(x_i: int, x_j: int, d_ij: float, rho_i: float, rho_j: float, t: Thresholds) -> float:
    """Pair penalty of object j inside the group of object i."""
    if x_i == 0:
        return 0.0 if (d_ij > t.c2 and rho_i <= t.c_rho) else rho_j
    span = t.c3 - t.c1
    if x_i == x_j:
        if d_ij < t.c1:
            return 0.0
        if span > 0 and d_ij <= t.c3:
            return (d_ij - t.c1) / span * rho_j
        return rho_j
    if d_ij < t.c1:
        return rho_j
    if span > 0 and d_ij <= t.c3:
        return (t.c3 - d_ij) / span * rho_j
    return 0.0


def subfunction(i: int, x, ctx: EvalContext) -> float:
    x = np.asarray(x)
    rho, t = ctx.profile.rho, ctx.thresholds
    return sum(alpha(int(x[i]), int(x[j]), float(ctx.dm[i, j]), rho[i], rho[j], t)
               for j in ctx.graph.groups[i] if j != i)


def _labels(x, ctx: EvalContext) -> np.ndarray:
    x = np.asarray(x)
    if x.dtype != np.int64 or x.ndim != 1 or x.size != ctx.n:
        x = as_partition(x, ctx.n)
    return x


def evaluate(x, ctx: EvalContext) -> float:
    nbr, a_in, a_out, a_noise, _, _ = ctx.kernel_args()
    return float(_kernels.evaluate(_labels(x, ctx), nbr, a_in, a_out, a_noise))


def subfunction_values(x, ctx: EvalContext) -> np.ndarray:
    nbr, a_in, a_out, a_noise, _, _ = ctx.kernel_args()
    return _kernels.sub_values(_labels(x, ctx), nbr, a_in, a_out, a_noise)


def delta_evaluate(x, i: int, v: int, ctx: EvalContext) -> float:
    """Change in f when label i becomes ``v``; only subfunctions reading x_i are re-summed."""
    work = np.array(_labels(x, ctx), copy=True)
    return float(_kernels.delta(work, int(i), int(v), *ctx.kernel_args()))
