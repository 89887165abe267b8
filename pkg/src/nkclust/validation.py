"""External (ARI, cluster counts) and internal (silhouette, NKCV2) validation,
plus best-candidate selection under a pluggable criterion."""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .nkcv2 import EvalContext, evaluate

__all__ = [
    "Criterion",
    "CriterionScore",
    "Direction",
    "adjusted_rand_index",
    "count_clusters",
    "external_criterion",
    "nkcv2_criterion",
    "select_best",
    "silhouette_criterion",
    "silhouette_width",
]


class Direction(str, enum.Enum):
    MINIMIZE = "minimize"
    MAXIMIZE = "maximize"


@dataclass(frozen=True)
class CriterionScore:
    value: float
    direction: Direction

    def better_than(self, other: "CriterionScore") -> bool:
        if self.direction is Direction.MINIMIZE:
            return self.value < other.value
        return self.value > other.value


def _pairs(n):
    return n * (n - 1) / 2.0


def _noise_as_singletons(x):
    x = np.array(x, dtype=np.int64, copy=True)
    noise = np.flatnonzero(x == 0)
    x[noise] = x.max(initial=0) + 1 + np.arange(noise.size)
    return x


def adjusted_rand_index(a, b, noise: str = "cluster") -> float:
    """Hubert-Arabie ARI.

    ``noise="cluster"`` treats label 0 as one ordinary cluster. With
    ``noise="singletons"`` every noise object is its own cluster, so pairs of
    noise objects never count as agreeing.
    """
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"partitions differ in length ({a.size} vs {b.size})")
    if noise == "singletons":
        a, b = _noise_as_singletons(a), _noise_as_singletons(b)
    elif noise != "cluster":
        raise ValueError(f"unknown noise convention {noise!r}")
    n = a.size
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    table = np.zeros((ai.max() + 1, bi.max() + 1))
    np.add.at(table, (ai, bi), 1)
    index = _pairs(table).sum()
    sum_a = _pairs(table.sum(axis=1)).sum()
    sum_b = _pairs(table.sum(axis=0)).sum()
    expected = sum_a * sum_b / _pairs(n) if n > 1 else 0.0
    maximum = 0.5 * (sum_a + sum_b)
    if maximum == expected:
        # both trivial (all singletons or one cluster each): agreement is perfect
        # when the partitions coincide, otherwise undefined -> 0
        return 1.0 if sum_a == sum_b else 0.0
    return float((index - expected) / (maximum - expected))


def count_clusters(x) -> int:
    """Number of distinct non-noise labels."""
    x = np.asarray(x)
    return int(np.unique(x[x != 0]).size)


def silhouette_width(x, dm: np.ndarray) -> float:
    """Mean silhouette over all objects (exact pairwise form).

    Objects in singleton clusters score 0, as do all objects of a
    one-cluster partition. Noise (label 0) is treated as a cluster.
    """
    x = np.asarray(x)
    labels, inv = np.unique(x, return_inverse=True)
    if labels.size < 2:
        return 0.0
    n = x.size
    onehot = np.zeros((n, labels.size))
    onehot[np.arange(n), inv] = 1.0
    sizes = onehot.sum(axis=0)
    sums = dm @ onehot  # distance of each object to every cluster, summed
    own = sizes[inv]
    a = np.where(own > 1, sums[np.arange(n), inv] / np.maximum(own - 1, 1), 0.0)
    mean_other = sums / sizes
    mean_other[np.arange(n), inv] = np.inf
    b = mean_other.min(axis=1)
    denom = np.maximum(a, b)
    s = np.where((own > 1) & (denom > 0), (b - a) / np.where(denom > 0, denom, 1.0), 0.0)
    return float(s.mean())


@dataclass
class Criterion:
    """Named scoring function with an optimisation direction.

    ``score_all`` may be overridden for criteria that score candidates by
    position rather than by content (e.g. precomputed external scores).
    """

    name: str
    fn: Callable[[np.ndarray], float] | None
    direction: Direction

    def score(self, x) -> CriterionScore:
        return CriterionScore(float(self.fn(x)), self.direction)

    def score_all(self, partitions: Sequence[np.ndarray]) -> list[CriterionScore]:
        return [self.score(p) for p in partitions]


@dataclass
class _ExternalCriterion(Criterion):
    values: Sequence[float] = ()

    def score_all(self, partitions):
        if len(self.values) != len(partitions):
            raise ValueError(f"{self.name}: {len(self.values)} scores for {len(partitions)} candidates")
        return [CriterionScore(float(v), self.direction) for v in self.values]


def nkcv2_criterion(ctx: EvalContext, name: str | None = None) -> Criterion:
    return Criterion(name or f"NKCV2-K{ctx.k}", lambda x: evaluate(x, ctx), Direction.MINIMIZE)


def silhouette_criterion(dm: np.ndarray) -> Criterion:
    return Criterion("silhouette", lambda x: silhouette_width(x, dm), Direction.MAXIMIZE)


def external_criterion(path, name: str = "external", direction: Direction | str = Direction.MAXIMIZE) -> Criterion:
    """Scores computed elsewhere (e.g. DBCV): one value per candidate, in order.

    The file has one score per line, or a ``score`` column when a header is present.
    """
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    col = 0
    if rows and rows[0] and not _isfloat(rows[0][0]):
        header = [h.strip() for h in rows[0]]
        col = header.index("score") if "score" in header else len(header) - 1
        rows = rows[1:]
    values = [float(r[col]) for r in rows]
    return _ExternalCriterion(name, None, Direction(direction), values)


def _isfloat(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def select_best(candidates, criterion: Criterion) -> tuple[int, CriterionScore]:
    """Index and score of the best candidate; ties go to the lowest index."""
    partitions = getattr(candidates, "partitions", candidates)
    if len(partitions) == 0:
        raise ValueError("empty candidate set")
    scores = criterion.score_all(partitions)
    best = 0
    for t in range(1, len(scores)):
        if scores[t].better_than(scores[best]):
            best = t
    return best, scores[best]
