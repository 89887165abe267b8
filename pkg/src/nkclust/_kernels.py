"""Compiled inner loops for NKCV2 evaluation, moves and partition crossover.

Every kernel takes the flat context arrays:

    nbr     (N, K) int64    group members other than the owner, ascending
    a_in    (N, K) float64  pair penalty when owner and member share a label
    a_out   (N, K) float64  pair penalty when their labels differ
    a_noise (N, K) float64  pair penalty when the owner is noise
    optr, oidx              CSR lists of subfunctions influenced by each label

The penalty tables depend only on distances, densities and thresholds, so
they are filled once per context by ``edge_tables``.

Counters returned alongside results are numbers of subfunction evaluations.
"""

import numpy as np
from numba import njit


@njit(cache=True, inline="always")
def alpha(xi, xj, d, rho_i, rho_j, c1, c2, c3, c_rho):
    if xi == 0:
        if d > c2 and rho_i <= c_rho:
            return 0.0
        return rho_j
    if xi == xj:
        if d < c1:
            return 0.0
        if c3 > c1:
            if d <= c3:
                return (d - c1) / (c3 - c1) * rho_j
        return rho_j
    if d < c1:
        return rho_j
    if c3 > c1:
        if d <= c3:
            return (c3 - d) / (c3 - c1) * rho_j
    return 0.0


@njit(cache=True)
def edge_tables(nbr, nbr_d, rho, thr):
    n, k = nbr.shape
    a_in = np.empty((n, k))
    a_out = np.empty((n, k))
    a_noise = np.empty((n, k))
    c1, c2, c3, cr = thr[0], thr[1], thr[2], thr[3]
    for p in range(n):
        for t in range(k):
            j = nbr[p, t]
            d = nbr_d[p, t]
            a_in[p, t] = alpha(1, 1, d, rho[p], rho[j], c1, c2, c3, cr)
            a_out[p, t] = alpha(1, 2, d, rho[p], rho[j], c1, c2, c3, cr)
            a_noise[p, t] = alpha(0, 1, d, rho[p], rho[j], c1, c2, c3, cr)
    return a_in, a_out, a_noise


@njit(cache=True, inline="always")
def edge(xp, xj, p, t, a_in, a_out, a_noise):
    if xp == 0:
        return a_noise[p, t]
    if xp == xj:
        return a_in[p, t]
    return a_out[p, t]


# The hot loops below spell out the subfunction body instead of calling
# sub_value: numba does not optimise the per-object call well.

@njit(cache=True)
def sub_value(p, x, nbr, a_in, a_out, a_noise):
    xp = x[p]
    s = 0.0
    for t in range(nbr.shape[1]):
        if xp == 0:
            s += a_noise[p, t]
        elif x[nbr[p, t]] == xp:
            s += a_in[p, t]
        else:
            s += a_out[p, t]
    return s


@njit(cache=True)
def sub_values(x, nbr, a_in, a_out, a_noise):
    n = x.shape[0]
    out = np.empty(n)
    for p in range(n):
        out[p] = sub_value(p, x, nbr, a_in, a_out, a_noise)
    return out


@njit(cache=True)
def evaluate(x, nbr, a_in, a_out, a_noise):
    s = 0.0
    k = nbr.shape[1]
    for p in range(x.shape[0]):
        xp = x[p]
        u = 0.0
        if xp == 0:
            for t in range(k):
                u += a_noise[p, t]
        else:
            for t in range(k):
                u += a_in[p, t] if x[nbr[p, t]] == xp else a_out[p, t]
        s += u
    return s


@njit(cache=True)
def _affected_sum(i, x, nbr, a_in, a_out, a_noise, optr, oidx):
    s = 0.0
    k = nbr.shape[1]
    for e in range(optr[i], optr[i + 1]):
        p = oidx[e]
        xp = x[p]
        u = 0.0
        if xp == 0:
            for t in range(k):
                u += a_noise[p, t]
        else:
            for t in range(k):
                u += a_in[p, t] if x[nbr[p, t]] == xp else a_out[p, t]
        s += u
    return s


@njit(cache=True)
def delta(x, i, v, nbr, a_in, a_out, a_noise, optr, oidx):
    """f(y) - f(x) for y = x with y_i = v. ``x`` is restored before returning."""
    old = x[i]
    if v == old:
        return 0.0
    before = _affected_sum(i, x, nbr, a_in, a_out, a_noise, optr, oidx)
    x[i] = v
    after = _affected_sum(i, x, nbr, a_in, a_out, a_noise, optr, oidx)
    x[i] = old
    return after - before


@njit(cache=True)
def best_move(x, i, cand, nbr, a_in, a_out, a_noise, optr, oidx):
    """Argmin over candidate objects j of delta(i, x_j); ties keep the first j.

    Returns (position in ``cand``, best delta, subfunction evaluations).
    """
    old = x[i]
    width = optr[i + 1] - optr[i]
    before = _affected_sum(i, x, nbr, a_in, a_out, a_noise, optr, oidx)
    evals = width
    best_t = -1
    best = np.inf
    for t in range(cand.shape[0]):
        v = x[cand[t]]
        # a label already tried gives the same delta; skip it
        seen = False
        for u in range(t):
            if x[cand[u]] == v:
                seen = True
                break
        if seen:
            continue
        if v == old:
            dv = 0.0
        else:
            x[i] = v
            dv = _affected_sum(i, x, nbr, a_in, a_out, a_noise, optr, oidx) - before
            x[i] = old
            evals += width
        if dv < best:
            best = dv
            best_t = t
    return best_t, best, evals


@njit(cache=True)
def mutation_nk(x, i, nbr, a_in, a_out, a_noise, optr, oidx):
    """In place: x_i takes the label of the group member with the smallest delta."""
    t, dv, evals = best_move(x, i, nbr[i], nbr, a_in, a_out, a_noise, optr, oidx)
    x[i] = x[nbr[i, t]]
    return dv, evals


@njit(cache=True)
def local_search(x, proposals, groups, nbr, a_in, a_out, a_noise, optr, oidx):
    """In place first-improvement search; neutral moves are accepted.

    Returns (sum of applied deltas, subfunction evaluations).
    """
    total = 0.0
    evals = 0
    for s in range(proposals.shape[0]):
        i = proposals[s]
        t, dv, ev = best_move(x, i, groups[i], nbr, a_in, a_out, a_noise, optr, oidx)
        evals += ev
        if dv <= 0.0:
            x[i] = x[groups[i, t]]
            total += dv
    return total, evals


@njit(cache=True)
def affected_resum(old, new, changed, nbr, a_in, a_out, a_noise, optr, oidx, mark):
    """f(new) - f(old) by re-summing subfunctions touched by ``changed``.

    ``mark`` is an all-False scratch array of length N, left all-False.
    """
    d = 0.0
    evals = 0
    for c in range(changed.shape[0]):
        i = changed[c]
        for t in range(optr[i], optr[i + 1]):
            p = oidx[t]
            if not mark[p]:
                mark[p] = True
                d += sub_value(p, new, nbr, a_in, a_out, a_noise) - sub_value(p, old, nbr, a_in, a_out, a_noise)
                evals += 2
    for c in range(changed.shape[0]):
        i = changed[c]
        for t in range(optr[i], optr[i + 1]):
            mark[oidx[t]] = False
    return d, evals


@njit(cache=True)
def recombination_components(p1, p2, nbr, optr, oidx):
    """Connected components (BFS) of the interaction graph restricted to
    positions where the parents differ. Shared positions get component -1."""
    n = p1.shape[0]
    comp = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    q = 0
    for s in range(n):
        if p1[s] == p2[s] or comp[s] >= 0:
            continue
        comp[s] = q
        head, tail = 0, 1
        queue[0] = s
        while head < tail:
            v = queue[head]
            head += 1
            for k in range(nbr.shape[1]):
                w = nbr[v, k]
                if comp[w] < 0 and p1[w] != p2[w]:
                    comp[w] = q
                    queue[tail] = w
                    tail += 1
            for t in range(optr[v], optr[v + 1]):
                w = oidx[t]
                if comp[w] < 0 and p1[w] != p2[w]:
                    comp[w] = q
                    queue[tail] = w
                    tail += 1
        q += 1
    return comp, q


@njit(cache=True)
def partial_evaluations(x, comp, q, nbr, a_in, a_out, a_noise):
    """Per-component share of f(x) plus the share no component controls.

    A differing position p contributes its whole subfunction f_p to its
    component. A shared position p contributes each pair term alpha(x_p, x_j)
    to the component of j when j differs, and to the constant otherwise.
    """
    h = np.zeros(q)
    const = 0.0
    for p in range(x.shape[0]):
        cp = comp[p]
        if cp >= 0:
            h[cp] += sub_value(p, x, nbr, a_in, a_out, a_noise)
            continue
        xp = x[p]
        for k in range(nbr.shape[1]):
            j = nbr[p, k]
            a = edge(xp, x[j], p, k, a_in, a_out, a_noise)
            if comp[j] >= 0:
                h[comp[j]] += a
            else:
                const += a
    return h, const


@njit(cache=True)
def assemble_offspring(p1, p2, comp, from_p2):
    child = p1.copy()
    for i in range(p1.shape[0]):
        c = comp[i]
        if c >= 0 and from_p2[c]:
            child[i] = p2[i]
    return child


@njit(cache=True)
def renumber(p1, p2):
    """Greedy largest-overlap relabelling of p2 onto p1 labels (0 stays 0).

    Returns (relabelled p2, p2 label values, their new labels).
    """
    u1 = np.unique(p1)
    u2 = np.unique(p2)
    i1 = np.zeros(u1[-1] + 1, dtype=np.int64)
    i2 = np.zeros(u2[-1] + 1, dtype=np.int64)
    for t in range(u1.size):
        i1[u1[t]] = t
    for t in range(u2.size):
        i2[u2[t]] = t
    table = np.zeros((u1.size, u2.size), dtype=np.int64)
    for i in range(p1.shape[0]):
        if p1[i] > 0 and p2[i] > 0:
            table[i1[p1[i]], i2[p2[i]]] += 1
    # order by (-overlap, p1 label, p2 label)
    w = u1.size * u2.size
    keys = np.empty(w, dtype=np.int64)
    for a in range(u1.size):
        for b in range(u2.size):
            keys[a * u2.size + b] = -table[a, b] * w + a * u2.size + b
    order = np.argsort(keys, kind="mergesort")
    new = np.full(u2.size, -1, dtype=np.int64)
    taken = np.zeros(u1.size, dtype=np.bool_)
    for t in range(w):
        e = order[t]
        a, b = e // u2.size, e % u2.size
        if table[a, b] == 0:
            break
        if new[b] >= 0 or taken[a]:
            continue
        new[b] = u1[a]
        taken[a] = True
    fresh = u1[-1] + 1
    for b in range(u2.size):
        if u2[b] == 0:
            new[b] = 0
        elif new[b] < 0:
            new[b] = fresh
            fresh += 1
    out = np.empty_like(p2)
    for i in range(p2.shape[0]):
        out[i] = new[i2[p2[i]]]
    return out, u2, new


@njit(cache=True)
def split_disconnected(x, nbr, optr, oidx):
    """Relabel so every non-noise label is connected through same-label group
    edges. The largest component of a label keeps it (ties: lowest index);
    the others take the smallest unused positive labels. NKCV2 is unchanged."""
    n = x.shape[0]
    comp = np.full(n, -1, dtype=np.int64)
    size = np.zeros(n, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    q = 0
    for s in range(n):
        if x[s] == 0 or comp[s] >= 0:
            continue
        lab = x[s]
        comp[s] = q
        head, tail = 0, 1
        queue[0] = s
        while head < tail:
            v = queue[head]
            head += 1
            for k in range(nbr.shape[1]):
                w = nbr[v, k]
                if comp[w] < 0 and x[w] == lab:
                    comp[w] = q
                    queue[tail] = w
                    tail += 1
            for t in range(optr[v], optr[v + 1]):
                w = oidx[t]
                if comp[w] < 0 and x[w] == lab:
                    comp[w] = q
                    queue[tail] = w
                    tail += 1
        size[q] = tail
        q += 1
    top = x.max()
    keeper = np.full(top + 1, -1, dtype=np.int64)
    comp_label = np.empty(q, dtype=np.int64)
    first = np.empty(q, dtype=np.int64)
    seen = 0
    for s in range(n):
        c = comp[s]
        if c >= 0 and c == seen:
            comp_label[c] = x[s]
            first[c] = s
            seen += 1
    for c in range(q):
        lab = comp_label[c]
        k = keeper[lab]
        if k < 0 or size[c] > size[k]:
            keeper[lab] = c
    if q == 0:
        return x.copy()
    used = np.zeros(top + q + 2, dtype=np.bool_)
    for i in range(n):
        used[x[i]] = True
    new = np.empty(q, dtype=np.int64)
    nxt = 1
    for c in range(q):
        lab = comp_label[c]
        if keeper[lab] == c:
            new[c] = lab
        else:
            while used[nxt]:
                nxt += 1
            new[c] = nxt
            used[nxt] = True
    out = x.copy()
    for i in range(n):
        if comp[i] >= 0:
            out[i] = new[comp[i]]
    return out


@njit(cache=True)
def px_scores(p1, p2, comp, q, nbr, a_in, a_out, a_noise):
    """Component scores of both parents, evaluating only the subfunctions that
    involve a differing position. Returns (h1, h2, subfunction evaluations)."""
    h1 = np.zeros(q)
    h2 = np.zeros(q)
    evals = 0
    for p in range(p1.shape[0]):
        cp = comp[p]
        if cp >= 0:
            h1[cp] += sub_value(p, p1, nbr, a_in, a_out, a_noise)
            h2[cp] += sub_value(p, p2, nbr, a_in, a_out, a_noise)
            evals += 2
            continue
        touched = False
        for k in range(nbr.shape[1]):
            j = nbr[p, k]
            cj = comp[j]
            if cj >= 0:
                touched = True
                h1[cj] += edge(p1[p], p1[j], p, k, a_in, a_out, a_noise)
                h2[cj] += edge(p2[p], p2[j], p, k, a_in, a_out, a_noise)
        if touched:
            evals += 2
    return h1, h2, evals
