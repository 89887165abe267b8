"""Structure-aware variation operators for label vectors under NKCV2."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .nkcv2 import EvalContext, _labels

__all__ = [
    "CrossoverResult",
    "fix_labels",
    "local_search",
    "merge_partners",
    "mutation_merge",
    "mutation_nk",
    "mutation_split",
    "partition_crossover",
    "recombination_graph",
    "renumber",
    "smallest_unused_label",
    "split_disconnected",
]

COINCIDENT_FLOOR = np.finfo(np.float64).eps


def smallest_unused_label(x) -> int:
    used = np.unique(x)
    used = used[used > 0]
    # first gap in 1, 2, 3, ...
    hits = np.flatnonzero(used != np.arange(1, used.size + 1))
    return int(hits[0] + 1) if hits.size else int(used.size + 1)


def _prototypes(x: np.ndarray, ctx: EvalContext) -> dict[int, int]:
    """Densest member of every non-noise cluster."""
    in_order = x[ctx.order]
    labels, first = np.unique(in_order, return_index=True)
    return {int(l): int(ctx.order[f]) for l, f in zip(labels, first) if l != 0}


def mutation_nk(x, ctx: EvalContext, rng: np.random.Generator, i: int | None = None,
                return_delta: bool = False):
    """Give a random object the group-member label with the smallest delta.

    The move is applied even when the delta is positive.
    """
    out = np.array(_labels(x, ctx), copy=True)
    if i is None:
        i = int(rng.integers(ctx.n))
    dv, _ = _kernels.mutation_nk(out, i, *ctx.kernel_args())
    return (out, float(dv)) if return_delta else out


def merge_partners(x, ctx: EvalContext, c1: int) -> tuple[list[int], np.ndarray]:
    """Candidate partners of cluster ``c1`` and their inverse-prototype-distance probabilities."""
    protos = _prototypes(_labels(x, ctx), ctx)
    others = [l for l in sorted(protos) if l != c1]
    d = np.array([ctx.dm[protos[l], protos[c1]] for l in others])
    w = 1.0 / np.maximum(d, COINCIDENT_FLOOR)
    return others, w / w.sum()


def mutation_merge(x, ctx: EvalContext, rng: np.random.Generator):
    """Merge a random cluster with one picked by inverse prototype distance."""
    x = _labels(x, ctx)
    labels = np.unique(x[x > 0])
    if labels.size < 2:
        return x.copy()
    c1 = int(labels[int(rng.integers(labels.size))])
    others, p = merge_partners(x, ctx, c1)
    c2 = others[int(rng.choice(len(others), p=p))]
    out = x.copy()
    out[out == c2] = c1
    return out


def mutation_split(x, ctx: EvalContext, rng: np.random.Generator):
    """Split a size-weighted random cluster around its two densest members."""
    x = _labels(x, ctx)
    labels, sizes = np.unique(x[x > 0], return_counts=True)
    if labels.size == 0:
        return x.copy()
    c = int(labels[rng.choice(labels.size, p=sizes / sizes.sum())])
    members_in_order = ctx.order[x[ctx.order] == c]
    if members_in_order.size < 2:
        return x.copy()
    m1, m2 = members_in_order[0], members_in_order[1]
    members = np.flatnonzero(x == c)
    move = ctx.dm[members, m1] > ctx.dm[members, m2]
    out = x.copy()
    out[members[move]] = smallest_unused_label(x)
    return out


def local_search(x, ctx: EvalContext, rng: np.random.Generator, budget: int | None = None,
                 return_stats: bool = False):
    """First-improvement search over group-member labels, ``budget`` proposals.

    Default budget is 10 N. Neutral moves are accepted, so the result is never
    worse than the input.
    """
    out = np.array(_labels(x, ctx), copy=True)
    if budget is None:
        budget = 10 * ctx.n
    proposals = rng.integers(0, ctx.n, size=int(budget))
    nbr, a_in, a_out, a_noise, optr, oidx = ctx.kernel_args()
    total, evals = _kernels.local_search(out, proposals, ctx.graph.groups, nbr, a_in, a_out, a_noise, optr, oidx)
    if return_stats:
        return out, float(total), int(evals)
    return out


def renumber(p1, p2, return_mapping: bool = False):
    """Relabel ``p2`` to agree with ``p1`` as much as possible.

    Greedy on the contingency table: the largest overlap is matched first,
    ties by (p1 label, p2 label). Unmatched p2 labels get fresh labels above
    max(p1). Noise stays noise.
    """
    p1, p2 = np.asarray(p1, dtype=np.int64), np.asarray(p2, dtype=np.int64)
    if p1.shape != p2.shape:
        raise ValueError("partitions differ in length")
    if p1.size == 0:
        return (p2.copy(), {}) if return_mapping else p2.copy()
    out, old, new = _kernels.renumber(p1, p2)
    if return_mapping:
        return out, {int(a): int(b) for a, b in zip(old, new)}
    return out


@dataclass(frozen=True)
class CrossoverResult:
    offspring: np.ndarray
    components: np.ndarray  # component id per position, -1 where parents agree
    q: int
    h1: np.ndarray
    h2: np.ndarray
    from_p2: np.ndarray     # per component
    shared_value: float     # part of f fixed by positions the parents share

    @property
    def provenance(self) -> np.ndarray:
        """Parent (1 or 2) each offspring label was copied from; shared -> 1."""
        tag = np.ones(self.components.size, dtype=np.int64)
        inner = self.components >= 0
        tag[inner] = np.where(self.from_p2[self.components[inner]], 2, 1)
        return tag


def recombination_graph(p1, p2, ctx: EvalContext) -> tuple[np.ndarray, int]:
    """Component id per differing position (-1 for shared) and component count."""
    comp, q = _kernels.recombination_components(
        np.asarray(p1, np.int64), np.asarray(p2, np.int64), ctx.nbr, ctx.graph.out_ptr, ctx.graph.out_idx)
    return comp, int(q)


def partition_crossover(p1, p2, ctx: EvalContext, details: bool = False):
    """Best of the 2^q offspring that take each recombining component from one parent.

    ``p2`` should already be renumbered against ``p1``.
    """
    p1, p2 = _labels(p1, ctx), _labels(p2, ctx)
    comp, q = recombination_graph(p1, p2, ctx)
    nbr, a_in, a_out, a_noise, _, _ = ctx.kernel_args()
    h1, const = _kernels.partial_evaluations(p1, comp, q, nbr, a_in, a_out, a_noise)
    h2, _ = _kernels.partial_evaluations(p2, comp, q, nbr, a_in, a_out, a_noise)
    from_p2 = ~(h1 < h2)
    child = _kernels.assemble_offspring(p1, p2, comp, from_p2)
    if details:
        return CrossoverResult(child, comp, q, h1, h2, from_p2, float(const))
    return child


def fix_labels(x, provenance) -> np.ndarray:
    """Give every source cluster its own label.

    ``provenance`` holds one source-cluster key per object. When objects with
    the same non-zero label come from several keys, the largest group keeps
    the label and the others move to the smallest unused positive labels.
    """
    out = np.array(x, dtype=np.int64, copy=True)
    prov = np.asarray(provenance)
    if prov.shape != out.shape:
        raise ValueError("provenance must have one entry per object")
    nz = out > 0
    pairs, inverse, counts = np.unique(np.stack([out[nz], prov[nz]]), axis=1,
                                       return_inverse=True, return_counts=True)
    inverse = inverse.ravel()
    labels = pairs[0]
    if np.unique(labels).size == labels.size:
        return out
    used = set(np.unique(out).tolist())
    nz_idx = np.flatnonzero(nz)
    nxt = 1
    for lab in np.unique(labels):
        groups = np.flatnonzero(labels == lab)
        if groups.size < 2:
            continue
        # largest keeps the label; ties go to the smaller key
        groups = sorted(groups, key=lambda g: (-counts[g], pairs[1, g]))
        for g in groups[1:]:
            while nxt in used:
                nxt += 1
            out[nz_idx[inverse == g]] = nxt
            used.add(nxt)
    return out


def split_disconnected(x, ctx: EvalContext) -> np.ndarray:
    """Give each connected piece of a cluster its own label.

    Two objects are connected when one lies in the other's interaction group
    and they share a non-zero label. Pieces of one label that never meet in
    a group are separate clusters: NKCV2 cannot tell them apart, so the split
    leaves the fitness unchanged. The largest piece keeps the label (ties: the
    piece with the lowest index), the rest take the smallest unused labels.
    """
    x = _labels(x, ctx)
    return _kernels.split_disconnected(x, ctx.nbr, ctx.graph.out_ptr, ctx.graph.out_idx)
