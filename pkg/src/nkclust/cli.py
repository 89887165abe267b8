"""Command-line entry point: ``nkclust {generate,run,sweep,ga,evaluate}``.

Every command writes a JSON report (canonical, carries ``schema_version``, the
resolved configuration and every seed) plus flat CSV tables next to it.
Set NKCLUST_WORKERS to spread independent GA runs over processes; results do
not depend on the worker count.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .baselines import candidate_grid, dbscan, density_peaks, kmeans
from .dataset import (BalanceLevel, Dataset, GaussianModelConfig, as_partition, load_csv, load_labels,
                      save_labels, write_generated)
from .density import density_profile, pairwise_distances
from .ga import GaConfig, Stop, run
from .nkcv2 import EvalContext, evaluate
from .validation import (Criterion, Direction, adjusted_rand_index, count_clusters, external_criterion,
                         nkcv2_criterion, select_best, silhouette_criterion, silhouette_width)

SCHEMA_VERSION = 1


class CliError(Exception):
    pass


# -- helpers ----------------------------------------------------------------

def _write_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _write_table(path: Path, rows: list[dict]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        if not rows:
            return
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)


def _load(args) -> tuple[Dataset, np.ndarray | None]:
    if not args.dataset:
        raise CliError("--dataset is required")
    ds, truth = load_csv(args.dataset, label_column=args.labels_in_dataset)
    if args.truth:
        truth = as_partition(load_labels(args.truth), ds.n)
    return ds, truth


def _source(args) -> dict:
    return {
        "dataset": str(Path(args.dataset).resolve()),
        "truth": str(Path(args.truth).resolve()) if args.truth else None,
        "labels_in_dataset": bool(args.labels_in_dataset),
    }


def _external(labels, truth) -> dict:
    if truth is None:
        return {}
    return {"ari": adjusted_rand_index(labels, truth),
            "n_clusters_true": count_clusters(truth)}


def _criteria(names: list[str], dm: np.ndarray) -> list[Criterion]:
    """Parse ``NKCV2-K<k>``, ``silhouette`` and ``external:<path>[:min|max]``."""
    out = []
    for name in names:
        low = name.lower()
        if low.startswith("nkcv2-k"):
            try:
                k = int(name[7:])
            except ValueError:
                raise CliError(f"bad criterion {name!r}") from None
            out.append(nkcv2_criterion(EvalContext.from_distances(dm, k), f"NKCV2-K{k}"))
        elif low == "silhouette":
            out.append(silhouette_criterion(dm))
        elif low.startswith("external:"):
            rest = name.split(":", 1)[1]
            path, direction = rest, Direction.MAXIMIZE
            head, _, tail = rest.rpartition(":")
            if tail in ("min", "max"):
                path = head
                direction = Direction.MINIMIZE if tail == "min" else Direction.MAXIMIZE
            out.append(external_criterion(path, Path(path).stem, direction))
        else:
            raise CliError(f"unknown criterion {name!r}")
    return out


def _run_seeds(seed: int, runs: int) -> list[int]:
    children = np.random.SeedSequence(seed).spawn(runs)
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in children]


def _workers() -> int:
    raw = os.environ.get("NKCLUST_WORKERS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise CliError(f"NKCLUST_WORKERS must be an integer, got {raw!r}") from None


# -- commands ----------------------------------------------------------------

def cmd_generate(args) -> int:
    cfg = GaussianModelConfig(n_clusters=args.n_clusters, dims=args.dims, n_objects=args.n,
                              balance_level=BalanceLevel(args.balance), noise_fraction=args.noise,
                              seed=args.seed)
    paths = write_generated(args.out, cfg, stem=args.stem, labels_in_dataset=args.labels_in_dataset)
    print(json.dumps(paths, indent=2))
    return 0


def cmd_run(args) -> int:
    if args.algo == "ga":
        return cmd_ga(args)
    if args.algo == "sweep":
        return cmd_sweep(args)
    ds, truth = _load(args)
    rng = np.random.default_rng(args.seed)
    if args.algo == "kmeans":
        if args.n_clusters is None:
            raise CliError("kmeans needs --n-clusters")
        params = {"k": args.n_clusters, "restarts": args.restarts}
        labels = kmeans(ds, args.n_clusters, args.restarts, rng)
    elif args.algo == "dbscan":
        if args.eps is None or args.min_pts is None:
            raise CliError("dbscan needs --eps and --min-pts")
        params = {"eps": args.eps, "min_pts": args.min_pts}
        labels = dbscan(ds, args.eps, args.min_pts)
    else:
        if args.prototypes is None:
            raise CliError("dp needs --prototypes")
        params = {"n_prototypes": args.prototypes}
        labels = density_peaks(ds, args.prototypes)
    out = Path(args.out)
    save_labels(out / "labels.csv", labels)
    report = {
        "schema_version": SCHEMA_VERSION, "command": "run", "version": __version__,
        "config": {**_source(args), "algorithm": args.algo, "params": params, "seed": args.seed},
        "result": {"n_clusters": count_clusters(labels), "labels": "labels.csv", **_external(labels, truth)},
    }
    _write_json(out / "report.json", report)
    return 0


def cmd_sweep(args) -> int:
    ds, truth = _load(args)
    dm = pairwise_distances(ds)
    names = args.criterion or ["NKCV2-K3", "silhouette"]
    criteria = _criteria(names, dm)
    rng = np.random.default_rng(args.seed)
    cands = candidate_grid(ds, rng, dm=dm, profile=density_profile(dm), kmeans_restarts=args.restarts)
    out = Path(args.out)
    cands.save(out / "candidates")
    rows = []
    for crit in criteria:
        idx, score = select_best(cands, crit)
        chosen = cands.partitions[idx]
        row = {"criterion": crit.name, "selected": idx,
               "algorithm": cands.provenance[idx]["algorithm"],
               "params": json.dumps(cands.provenance[idx]["params"], sort_keys=True),
               "score": score.value, "n_clusters": count_clusters(chosen)}
        if truth is not None:
            row["ari"] = adjusted_rand_index(chosen, truth)
            row["n_clusters_true"] = count_clusters(truth)
            row["count_hit"] = int(row["n_clusters"] == row["n_clusters_true"])
        rows.append(row)
    _write_table(out / "selection.csv", rows)
    report = {
        "schema_version": SCHEMA_VERSION, "command": "sweep", "version": __version__,
        "config": {**_source(args), "criteria": names, "seed": args.seed, "kmeans_restarts": args.restarts},
        "n_candidates": len(cands),
        "selection": rows,
    }
    _write_json(out / "report.json", report)
    for r in rows:
        extra = f" ari={r['ari']:.3f}" if "ari" in r else ""
        print(f"{r['criterion']}: candidate {r['selected']} ({r['algorithm']}) "
              f"clusters={r['n_clusters']}{extra}")
    return 0


def _ga_task(payload):
    objects, cfg_dict = payload
    res = run(Dataset(objects), GaConfig.from_dict(cfg_dict))
    return res


def cmd_ga(args) -> int:
    if args.from_report:
        prev = json.loads(Path(args.from_report).read_text())
        if prev.get("command") != "ga":
            raise CliError(f"{args.from_report} is not a ga report")
        conf = prev["config"]
        args.dataset, args.truth = conf["dataset"], conf["truth"]
        args.labels_in_dataset = conf["labels_in_dataset"]
        ga_base, seeds, criterion = conf["ga"], conf["run_seeds"], conf["criterion"]
        master = conf["seed"]
    else:
        ga_base, seeds, criterion, master = None, None, args.criterion_ga, args.seed
    ds, truth = _load(args)
    if ga_base is None:
        stop = Stop.parse(args.stop) if args.stop else Stop("seconds", ds.n / 2)
        ga_base = GaConfig(pop_size=args.pop, p_c=args.pc, k_param=args.K, stop=stop,
                           init_noise=args.init_noise).to_dict()
        ga_base.pop("seed")
        seeds = _run_seeds(master, args.runs)
    if ds.n < ga_base["k_param"] + 1:
        raise CliError(f"K+1={ga_base['k_param'] + 1} exceeds the number of objects ({ds.n})")
    dm = pairwise_distances(ds)
    (crit,) = _criteria([criterion], dm)

    payloads = [(ds.objects, {**ga_base, "seed": s}) for s in seeds]
    workers = min(_workers(), len(payloads))
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_ga_task, payloads))
    else:
        ctx = EvalContext.from_distances(dm, ga_base["k_param"])
        results = [run(ds, GaConfig.from_dict(cfg), ctx=ctx) for _, cfg in payloads]

    out = Path(args.out)
    rows = []
    for t, res in enumerate(results):
        lab = f"labels/run_{t:03d}.csv"
        save_labels(out / lab, res.best)
        _write_json(out / f"runs/run_{t:03d}.json", res.to_dict())
        row = {"run": t, "seed": res.seed, "fitness": res.best_fitness,
               "n_clusters": count_clusters(res.best), "generations": res.generations,
               "evaluations": res.evaluations, "elapsed_seconds": res.elapsed, "labels": lab}
        row.update(_external(res.best, truth))
        rows.append(row)
    best_idx, best_score = select_best([r.best for r in results], crit)
    save_labels(out / "best_labels.csv", results[best_idx].best)
    summary = {"runs": len(results), "stop": ga_base["stop"], "best_run": best_idx, "best_score": best_score.value,
               "mean_fitness": float(np.mean([r["fitness"] for r in rows])),
               "mean_n_clusters": float(np.mean([r["n_clusters"] for r in rows]))}
    if truth is not None:
        aris = np.array([r["ari"] for r in rows])
        summary.update(mean_ari=float(aris.mean()), std_ari=float(aris.std()),
                       best_ari=float(aris[best_idx]))
    _write_table(out / "runs.csv", rows)
    report = {
        "schema_version": SCHEMA_VERSION, "command": "ga", "version": __version__,
        "config": {**_source(args), "ga": ga_base, "seed": master, "run_seeds": seeds,
                   "criterion": criterion, "stop": ga_base["stop"],
                   "deterministic": not str(ga_base["stop"]).startswith("secs")},
        "summary": summary,
        "runs": rows,
    }
    _write_json(out / "report.json", report)
    msg = f"{len(results)} runs, best run {best_idx} ({crit.name}={best_score.value:.4f})"
    if truth is not None:
        msg += f", mean ARI {summary['mean_ari']:.3f} +- {summary['std_ari']:.3f}"
    print(msg)
    return 0


def cmd_evaluate(args) -> int:
    pred = load_labels(args.pred)
    truth = load_labels(args.truth)
    if pred.shape != truth.shape:
        raise CliError(f"label files differ in length ({pred.size} vs {truth.size})")
    rep = {"ari": adjusted_rand_index(pred, truth),
           "n_clusters_pred": count_clusters(pred), "n_clusters_true": count_clusters(truth)}
    if args.dataset:
        ds, _ = load_csv(args.dataset, label_column=args.labels_in_dataset)
        if ds.n != pred.size:
            raise CliError(f"dataset has {ds.n} objects, labels have {pred.size}")
        dm = pairwise_distances(ds)
        rep["silhouette"] = silhouette_width(pred, dm)
        rep[f"nkcv2_k{args.K}"] = evaluate(pred, EvalContext.from_distances(dm, args.K))
    print(json.dumps({"schema_version": SCHEMA_VERSION, "command": "evaluate", **rep}, indent=2))
    return 0


# -- parser --------------------------------------------------------------------

def _data_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dataset", help="CSV of objects, one per row")
    p.add_argument("--truth", help="ground-truth labels, one integer per line")
    p.add_argument("--labels-in-dataset", action="store_true",
                   help="last dataset column holds ground-truth labels")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="nkclust_out")


def _ga_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--K", type=int, default=3, help="NKCV2 group size minus one")
    p.add_argument("--pc", type=float, default=0.6, help="crossover rate")
    p.add_argument("--pop", type=int, default=100)
    p.add_argument("--runs", type=int, default=25)
    p.add_argument("--stop", help="secs:X | gens:X | evals:X (default secs:N/2)")
    p.add_argument("--init-noise", action="store_true", help="random individuals may use label 0")
    p.add_argument("--from-report", help="rerun the experiment recorded in a ga report.json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nkclust", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a Gaussian-model dataset")
    g.add_argument("--n-clusters", type=int, required=True)
    g.add_argument("--dims", type=int, default=2)
    g.add_argument("--n", type=int, default=800)
    g.add_argument("--balance", choices=[b.value for b in BalanceLevel], default="equal")
    g.add_argument("--noise", type=float, default=0.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--stem", default="dataset")
    g.add_argument("--labels-in-dataset", action="store_true")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    r = sub.add_parser("run", help="run one algorithm")
    _data_args(r)
    r.add_argument("--algo", choices=["kmeans", "dbscan", "dp", "ga", "sweep"], required=True)
    r.add_argument("--n-clusters", type=int, help="k-means cluster count")
    r.add_argument("--restarts", type=int, default=20, help="k-means restarts")
    r.add_argument("--eps", type=float)
    r.add_argument("--min-pts", type=int)
    r.add_argument("--prototypes", type=int, help="density-peaks prototype count")
    r.add_argument("--criterion", action="append",
                   help="for sweep: NKCV2-K<k>, silhouette or external:<scores.csv>[:min|max]")
    r.add_argument("--criterion-ga", default="NKCV2-K3", help="for ga: best-run criterion")
    _ga_args(r)
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep", help="candidate grid and per-criterion selection")
    _data_args(s)
    s.add_argument("--criterion", action="append",
                   help="NKCV2-K<k>, silhouette or external:<scores.csv>[:min|max]; repeatable")
    s.add_argument("--restarts", type=int, default=20, help="k-means restarts")
    s.set_defaults(func=cmd_sweep)

    a = sub.add_parser("ga", help="independent runs of the NK hybrid GA")
    _data_args(a)
    _ga_args(a)
    a.add_argument("--criterion", dest="criterion_ga", default="NKCV2-K3",
                   help="internal criterion picking the best run")
    a.set_defaults(func=cmd_ga)

    e = sub.add_parser("evaluate", help="compare predicted and true labels")
    e.add_argument("--pred", required=True)
    e.add_argument("--truth", required=True)
    e.add_argument("--dataset", help="also report silhouette and NKCV2")
    e.add_argument("--labels-in-dataset", action="store_true")
    e.add_argument("--K", type=int, default=3)
    e.set_defaults(func=cmd_evaluate)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CliError, ValueError, OSError, KeyError) as exc:
        print(f"nkclust: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
