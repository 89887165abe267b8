"""NK hybrid genetic algorithm: local-searched population, elitism, tournament
selection, partition crossover or structure-aware mutation, periodic
diversity injection. Minimises NKCV2."""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _kernels
from .dataset import Dataset
from .nkcv2 import EvalContext, evaluate
from .operators import mutation_merge, mutation_split, split_disconnected

__all__ = [
    "GaConfig",
    "RunResult",
    "Stop",
    "random_individual",
    "run",
    "tournament_select",
]


@dataclass(frozen=True)
class Stop:
    """Stopping rule: ``seconds`` (wall clock), ``generations`` or ``evaluations``.

    Evaluations are counted in full-evaluation equivalents: N subfunction
    evaluations make one (a delta evaluation of one label is a fraction).
    """

    kind: str
    value: float

    def __post_init__(self):
        if self.kind not in ("seconds", "generations", "evaluations"):
            raise ValueError(f"unknown stop kind {self.kind!r}")
        if self.value < 0:
            raise ValueError("stop value must be non-negative")

    @classmethod
    def parse(cls, text: str) -> "Stop":
        """Parse ``secs:X``, ``gens:X`` or ``evals:X``."""
        aliases = {"secs": "seconds", "gens": "generations", "evals": "evaluations"}
        kind, _, value = text.partition(":")
        kind = aliases.get(kind, kind)
        return cls(kind, float(value))

    def __str__(self):
        short = {"seconds": "secs", "generations": "gens", "evaluations": "evals"}[self.kind]
        return f"{short}:{self.value:g}"


@dataclass(frozen=True)
class GaConfig:
    pop_size: int = 100
    p_c: float = 0.6
    tournament_size: int = 3
    k_param: int = 3
    mutation_mix: tuple[float, float, float] = (0.6, 0.2, 0.2)  # nk, merge, split
    diversity_period: int = 100
    replace_fraction: float = 0.3
    stop: Stop = Stop("generations", 200)
    seed: int = 0
    init_noise: bool = False
    ls_budget_factor: int = 10

    def __post_init__(self):
        if isinstance(self.stop, str):
            object.__setattr__(self, "stop", Stop.parse(self.stop))
        object.__setattr__(self, "mutation_mix", tuple(float(m) for m in self.mutation_mix))
        if self.pop_size < 1 or self.tournament_size < 1:
            raise ValueError("pop_size and tournament_size must be positive")
        if not 0.0 <= self.p_c <= 1.0:
            raise ValueError("p_c must lie in [0, 1]")
        if len(self.mutation_mix) != 3 or abs(sum(self.mutation_mix) - 1.0) > 1e-9:
            raise ValueError("mutation_mix must hold three probabilities summing to 1")
        if not 0.0 < self.replace_fraction < 1.0:
            raise ValueError("replace_fraction must lie in (0, 1)")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["stop"] = str(self.stop)
        d["mutation_mix"] = list(self.mutation_mix)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "GaConfig":
        d = dict(d)
        d["stop"] = Stop.parse(d["stop"]) if isinstance(d.get("stop"), str) else d.get("stop", cls.stop)
        if "mutation_mix" in d:
            d["mutation_mix"] = tuple(d["mutation_mix"])
        return cls(**d)


@dataclass
class RunResult:
    best: np.ndarray
    best_fitness: float
    fitness_trace: list[float]
    generations: int
    evaluations: float
    seed: int
    elapsed: float = 0.0
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "config": self.config,
            "best_fitness": self.best_fitness,
            "generations": self.generations,
            "evaluations": self.evaluations,
            "elapsed_seconds": self.elapsed,
            "fitness_trace": self.fitness_trace,
            "labels": self.best.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def random_individual(n: int, rng: np.random.Generator, label_max: int | None = None,
                      noise: bool = False) -> np.ndarray:
    """Uniform labels in 1..label_max (0..label_max with ``noise``); default ceil(sqrt(n))."""
    if label_max is None:
        label_max = math.ceil(math.sqrt(n))
    return rng.integers(0 if noise else 1, label_max + 1, size=n).astype(np.int64)


def tournament_select(fitness: np.ndarray, size: int, rng: np.random.Generator) -> int:
    """Index of the fittest (lowest) of ``size`` uniform draws; ties to the lowest index."""
    pool = rng.integers(0, len(fitness), size=size)
    f = np.asarray(fitness)[pool]
    best = f.min()
    return int(pool[f == best].min())


class _Evaluator:
    """Fitness bookkeeping in full-evaluation equivalents."""

    def __init__(self, ctx: EvalContext):
        self.ctx = ctx
        self.args = ctx.kernel_args()
        self.n = ctx.n
        self.k_out = ctx.graph.k_out
        self.mark = np.zeros(ctx.n, dtype=np.bool_)
        self.sub_evals = 0

    @property
    def evaluations(self) -> float:
        return self.sub_evals / self.n

    def full(self, x) -> float:
        self.sub_evals += self.n
        nbr, a_in, a_out, a_noise, _, _ = self.args
        return float(_kernels.evaluate(x, nbr, a_in, a_out, a_noise))

    def local_search(self, x, rng, budget) -> tuple[np.ndarray, float]:
        x = x.copy()
        proposals = rng.integers(0, self.n, size=budget)
        nbr, a_in, a_out, a_noise, optr, oidx = self.args
        _, ev = _kernels.local_search(x, proposals, self.ctx.graph.groups, nbr, a_in, a_out, a_noise, optr, oidx)
        self.sub_evals += ev
        x = _kernels.split_disconnected(x, nbr, optr, oidx)
        return x, self.full(x)

    def mutation_nk(self, x, f, rng) -> tuple[np.ndarray, float]:
        x = x.copy()
        i = int(rng.integers(self.n))
        dv, ev = _kernels.mutation_nk(x, i, *self.args)
        self.sub_evals += ev
        return x, f + dv

    def changed(self, old, new, f_old) -> float:
        """Fitness of ``new``: affected-subfunction re-sum, or a full pass when
        the changed labels reach about as many subfunctions as a full pass."""
        diff = np.flatnonzero(old != new)
        if diff.size == 0:
            return f_old
        if self.k_out * diff.size >= self.n:
            return self.full(new)
        d, ev = _kernels.affected_resum(old, new, diff, *self.args, self.mark)
        self.sub_evals += ev
        return f_old + d


def _crossover(x1, f1, x2, ev: "_Evaluator"):
    """Renumber, partition crossover, split; returns (child, fitness).

    Renumbering is one-to-one, so no label arrives from two parent clusters
    and provenance collisions cannot occur. What remains is a label reused by
    pieces that no longer touch; those are split, which leaves f unchanged.
    The child's fitness is f(x1) with the chosen component scores swapped in.
    """
    nbr, a_in, a_out, a_noise, optr, oidx = ev.args
    x2r, _, _ = _kernels.renumber(x1, x2)
    comp, q = _kernels.recombination_components(x1, x2r, nbr, optr, oidx)
    if q == 0:
        return x1.copy(), f1
    h1, h2, evals = _kernels.px_scores(x1, x2r, comp, q, nbr, a_in, a_out, a_noise)
    ev.sub_evals += evals
    from_p2 = ~(h1 < h2)
    child = _kernels.assemble_offspring(x1, x2r, comp, from_p2)
    fc = f1 + float((h2 - h1)[from_p2].sum())
    return _kernels.split_disconnected(child, nbr, optr, oidx), fc


def run(ds: Dataset | None, cfg: GaConfig, ctx: EvalContext | None = None) -> RunResult:
    """Run the NK hybrid GA on ``ds`` (or a prebuilt context) and return the best partition."""
    start = time.perf_counter()
    if ctx is None:
        if ds.n < cfg.k_param + 1:
            raise ValueError(f"K+1={cfg.k_param + 1} exceeds the number of objects ({ds.n})")
        ctx = EvalContext.from_dataset(ds, cfg.k_param)
    rng = np.random.default_rng(cfg.seed)
    ev = _Evaluator(ctx)
    n, pop = ctx.n, cfg.pop_size
    ls_budget = cfg.ls_budget_factor * n
    n_keep = math.ceil((1.0 - cfg.replace_fraction) * pop)
    nk_p, merge_p, _ = cfg.mutation_mix

    def fresh():
        return ev.local_search(random_individual(n, rng, noise=cfg.init_noise), rng, ls_budget)

    P, F = [], np.empty(pop)
    for s in range(pop):
        x, F[s] = fresh()
        P.append(x)

    def stopped(gen):
        if cfg.stop.kind == "generations":
            return gen >= cfg.stop.value
        if cfg.stop.kind == "evaluations":
            return ev.evaluations >= cfg.stop.value
        return time.perf_counter() - start >= cfg.stop.value

    trace, t = [], 0
    while not stopped(t):
        t += 1
        b = int(np.argmin(F))
        Q, G = [P[b]], np.empty(pop)
        G[0] = F[b]
        for s in range(1, pop):
            i1 = tournament_select(F, cfg.tournament_size, rng)
            x1, f1 = P[i1], F[i1]
            if rng.random() < cfg.p_c:
                i2 = tournament_select(F, cfg.tournament_size, rng)
                child, fc = _crossover(x1, f1, P[i2], ev)
            else:
                r = rng.random()
                if r < nk_p:
                    child, fc = ev.mutation_nk(x1, f1, rng)
                else:
                    op = mutation_merge if r < nk_p + merge_p else mutation_split
                    child = op(x1, ctx, rng)
                    fc = ev.changed(x1, child, f1)
            Q.append(child)
            G[s] = fc
        if t % cfg.diversity_period == 0:
            order = np.argsort(G, kind="stable")
            Q, G = [Q[i] for i in order], G[order]
            for s in range(min(n_keep, pop)):
                Q[s], G[s] = ev.local_search(Q[s], rng, ls_budget)
            for s in range(n_keep, pop):
                Q[s], G[s] = fresh()
        P, F = Q, G
        trace.append(float(F.min()))

    b = int(np.argmin(F))
    best = split_disconnected(P[b], ctx)
    return RunResult(best=best, best_fitness=evaluate(best, ctx), fitness_trace=trace,
                     generations=t, evaluations=ev.evaluations, seed=cfg.seed,
                     elapsed=time.perf_counter() - start, config=cfg.to_dict())
