"""Slow, loop-based reference implementations used as test oracles.

Nothing here imports the package's numeric code; each function is written
straight from the definitions so that agreement means something.
"""

import itertools
import math
import statistics


def distances(points):
    n = len(points)
    return [[math.dist(points[i], points[j]) for j in range(n)] for i in range(n)]


def cutoff(dm, fraction=0.02):
    n = len(dm)
    pairs = sorted(dm[i][j] for i in range(n) for j in range(i + 1, n))
    rank = max(1, math.ceil(fraction * len(pairs) - 1e-9))
    return pairs[rank - 1]


def gaussian_rho(dm, eps):
    n = len(dm)
    return [sum(math.exp(-(dm[i][j] ** 2) / (2 * eps * eps)) for j in range(n)) for i in range(n)]


def flat_rho(dm, eps):
    n = len(dm)
    return [sum(1 for j in range(n) if dm[i][j] < eps) for i in range(n)]


def higher(rho, j, i):
    """j precedes i in the total density order (rho desc, index asc)."""
    return rho[j] > rho[i] or (rho[j] == rho[i] and j < i)


def nhd(dm, rho):
    n = len(dm)
    out, delta = [], []
    for i in range(n):
        cands = [j for j in range(n) if j != i and higher(rho, j, i)]
        if not cands:
            cands = [j for j in range(n) if j != i]
        best = min(cands, key=lambda j: (dm[i][j], j))
        out.append(best)
        delta.append(dm[i][best])
    return out, delta


def groups(dm, a, k):
    n = len(dm)
    res = []
    for i in range(n):
        members = [i, a[i]]
        for j in sorted(range(n), key=lambda j: (dm[i][j], j)):
            if len(members) == k + 1:
                break
            if j not in members:
                members.append(j)
        res.append(sorted(members))
    return res


def thresholds(dm, grp, rho):
    ds = [dm[i][j] for i, g in enumerate(grp) for j in g if j != i]
    m, s = statistics.fmean(ds), statistics.pstdev(ds)
    mr, sr = statistics.fmean(rho), statistics.pstdev(rho)
    c_rho = mr - sr if mr - sr > 0 else mr / 2
    return m, m + s, m + 2 * s, c_rho


def alpha(xi, xj, d, ri, rj, c1, c2, c3, cr):
    if xi == 0:
        return 0.0 if (d > c2 and ri <= cr) else rj
    if c3 == c1:
        ramp_in = 0.0 if d < c1 else rj
    elif d < c1:
        ramp_in = 0.0
    elif d > c3:
        ramp_in = rj
    else:
        ramp_in = (d - c1) / (c3 - c1) * rj
    if xi == xj:
        return ramp_in
    if c3 == c1:
        return rj if d < c1 else 0.0
    if d < c1:
        return rj
    if d > c3:
        return 0.0
    return (c3 - d) / (c3 - c1) * rj


class Nkcv2:
    """Self-contained NKCV2 built from raw points."""

    def __init__(self, points, k, fraction=0.02):
        self.dm = distances(points)
        self.eps = cutoff(self.dm, fraction)
        self.rho = gaussian_rho(self.dm, self.eps)
        self.a, self.delta = nhd(self.dm, self.rho)
        self.groups = groups(self.dm, self.a, k)
        self.thr = thresholds(self.dm, self.groups, self.rho)

    def sub(self, i, x):
        return sum(alpha(x[i], x[j], self.dm[i][j], self.rho[i], self.rho[j], *self.thr)
                   for j in self.groups[i] if j != i)

    def f(self, x):
        return sum(self.sub(i, x) for i in range(len(x)))


def px_brute_force(p1, p2, comp, q, f):
    """Minimum of f over all 2^q component choices."""
    best = math.inf
    for choice in itertools.product((False, True), repeat=q):
        child = [p2[i] if comp[i] >= 0 and choice[comp[i]] else p1[i] for i in range(len(p1))]
        best = min(best, f(child))
    return best


def ari_pairs(a, b):
    """ARI from the four pair categories (same/same, same/diff, diff/same, diff/diff)."""
    n = len(a)
    ss = sd = ds = dd = 0
    for i in range(n):
        for j in range(i + 1, n):
            sa, sb = a[i] == a[j], b[i] == b[j]
            if sa and sb:
                ss += 1
            elif sa:
                sd += 1
            elif sb:
                ds += 1
            else:
                dd += 1
    num = 2 * (ss * dd - sd * ds)
    den = (ss + sd) * (sd + dd) + (ss + ds) * (ds + dd)
    return 1.0 if den == 0 else num / den


def silhouette(x, dm):
    n = len(x)
    labels = set(x)
    if len(labels) < 2:
        return 0.0
    total = 0.0
    for i in range(n):
        own = [j for j in range(n) if x[j] == x[i] and j != i]
        if not own:
            continue
        a = sum(dm[i][j] for j in own) / len(own)
        b = min(sum(dm[i][j] for j in range(n) if x[j] == c) / sum(1 for j in range(n) if x[j] == c)
                for c in labels if c != x[i])
        total += (b - a) / max(a, b) if max(a, b) > 0 else 0.0
    return total / n


def kmeans_objective(points, x):
    total = 0.0
    for c in set(x):
        members = [p for p, l in zip(points, x) if l == c]
        centre = [sum(col) / len(members) for col in zip(*members)]
        total += sum(sum((u - v) ** 2 for u, v in zip(p, centre)) for p in members)
    return total
