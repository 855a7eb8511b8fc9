"""Command line entry point: ``egoclique {census,estimate,sweep,recommend,plot}``."""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .cliques import CensusBudgetExceeded, census, profile_sample
from .designs import UnsupportedDesignError, approximate_draw_probs, draw_sample, read_weight_file, uis, wis
from .estimators import PoolCapacityError, estimate_distribution
from .evaluation import (DEFAULT_EDGE_COUNT_THRESHOLD, ReplicationReport, plot_nmae, recommend_estimator,
                         run_sweep, saturation_metrics)
from .graph import GraphFormatError, load_graph
from .io import estimates_to_json, read_census, read_egonet_sample, write_census

EXIT_OK, EXIT_USAGE, EXIT_UNSUPPORTED, EXIT_BUDGET, EXIT_IO = 0, 2, 3, 4, 5
WORKERS_ENV = "EGOCLIQUE_WORKERS"

log = logging.getLogger("egoclique")


class UsageError(ValueError):
    pass


def default_workers() -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _design_args(p):
    g = p.add_argument_group("sampling design")
    g.add_argument("--design", choices=["uis", "wis"], default="uis")
    g.add_argument("--replacement", choices=["with", "without"], default="without")
    g.add_argument("--draws", type=int, help="number of ego draws n'")
    g.add_argument("--weights", help="CSV node_id,weight or the word 'degree' (wis only)")
    g.add_argument("--proportional", action="store_true",
                   help="weights are known only up to a constant factor")
    g.add_argument("--N", dest="N", type=int, help="population size (required without --edges)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="egoclique", description=__doc__)
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, graph_required=False):
        p.add_argument("--edges", required=graph_required, help="edge list (SNAP format)")
        p.add_argument("--attributes", help="CSV node_id,attribute")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--max-order", type=int)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--workers", type=int, default=None)

    p = sub.add_parser("census", help="exact whole-graph clique census")
    common(p, graph_required=True)
    p.add_argument("--mode", choices=["maximal", "all"], default="maximal")
    p.add_argument("--budget", type=int, help="abort after this many cliques")

    p = sub.add_parser("estimate", help="estimate C_i (and C_u) from an egonet sample")
    common(p)
    _design_args(p)
    p.add_argument("--egonets", help="egonet sample (JSON lines)")
    p.add_argument("--estimator", choices=["auto", "cds", "cc"], default="auto")
    p.add_argument("--unlabeled", action="store_true", help="drop neighbor labels when sampling from --edges")
    p.add_argument("--compositions", action="store_true", help="also estimate C_u")
    p.add_argument("--max-pool", type=int, help="cap on distinct cliques held by CC")
    p.add_argument("--threshold", type=float, default=DEFAULT_EDGE_COUNT_THRESHOLD)

    p = sub.add_parser("sweep", help="replicated-sampling evaluation against the census")
    common(p, graph_required=True)
    _design_args(p)
    p.add_argument("--sizes", required=True, help="comma-separated sample sizes")
    p.add_argument("--replications", type=int, default=1000)
    p.add_argument("--truth", help="precomputed census CSV order,count")
    p.add_argument("--truth-compositions", help="precomputed census CSV composition,count")
    p.add_argument("--unlabeled", action="store_true", help="CDS only")
    p.add_argument("--budget", type=int, help="census clique budget")
    p.add_argument("--dataset", help="dataset name for reports")
    p.add_argument("--threshold", type=float, default=DEFAULT_EDGE_COUNT_THRESHOLD)

    p = sub.add_parser("recommend", help="CC-vs-CDS heuristic, no clique enumeration")
    common(p)
    _design_args(p)
    p.add_argument("--egonets")
    p.add_argument("--threshold", type=float, default=DEFAULT_EDGE_COUNT_THRESHOLD)

    p = sub.add_parser("plot", help="NMAE-vs-n figure from a sweep report")
    p.add_argument("--report", required=True)
    p.add_argument("--out", required=True, help="SVG path")
    return ap


def _make_design(args, g=None, draws=None):
    N = args.N if args.N is not None else (g.N if g is not None else None)
    if N is None:
        raise UsageError("--N is required when no graph is given")
    draws = draws if draws is not None else args.draws
    if draws is None:
        raise UsageError("--draws is required")
    repl = args.replacement == "with"
    if args.design == "uis":
        return uis(N, draws, repl)
    if not args.weights:
        raise UsageError("--design wis needs --weights")
    if args.weights == "degree":
        if g is None:
            raise UsageError("--weights degree needs --edges")
        w = g.degrees().astype(float)
    else:
        w = read_weight_file(args.weights, g)
        if g is not None:
            arr = np.zeros(g.N)
            for k, v in w.items():
                arr[k] = v
            w = arr
    return wis(w, draws, repl, N=N, proportional=args.proportional)


def _manifest(args, out: Path, started: float, extra=None):
    cfg = {k: v for k, v in vars(args).items() if k != "func"}
    m = {"command": args.command, "config": cfg, "seed": getattr(args, "seed", None),
         "version": __version__, "elapsed_seconds": round(time.monotonic() - started, 3),
         "finished": time.strftime("%Y-%m-%dT%H:%M:%S")}
    if extra:
        m.update(extra)
    (out / "manifest.json").write_text(json.dumps(m, indent=1, sort_keys=True, default=str))


def cmd_census(args, out: Path):
    g = load_graph(args.edges, args.attributes)
    c = census(g, max_order=args.max_order, budget=args.budget, mode=args.mode)
    write_census(c, out / "census_order.csv",
                 out / "census_composition.csv" if c.composition_counts is not None else None)
    sys.stdout.write("order,count\n" + "".join(f"{i},{k}\n" for i, k in c.order_counts.items()))
    return {"N": g.N, "edges": g.num_edges, "dropped_edges": g.dropped_edges, "total_cliques": c.total,
            "oversized": c.oversized, "categories": list(g.category_labels or [])}


def _load_sample(args):
    if args.egonets:
        weights = None
        if args.design == "wis":
            if not args.weights or args.weights == "degree":
                weights = "degree"
            else:
                weights = read_weight_file(args.weights)
        s = read_egonet_sample(args.egonets)
        if weights == "degree":
            weights = {e.ego_id: float(e.degree) for e in s.egonets}
        if args.draws is not None or args.N is not None or s.design is None or args.design == "wis":
            N = args.N if args.N is not None else (s.design.N if s.design else None)
            if N is None:
                raise UsageError("--N is required for an egonet sample without a design header")
            draws = args.draws if args.draws is not None else s.n_prime
            repl = args.replacement == "with"
            d = uis(N, draws, repl) if args.design == "uis" else wis(weights, draws, repl, N=N,
                                                                     proportional=args.proportional)
            s = type(s)(draws, s.egonets, d, s.multiplicity if s.n_prime == draws else None,
                        s.category_labels, s.meta)
        return s, None
    if not args.edges:
        raise UsageError("give --egonets or --edges")
    g = load_graph(args.edges, args.attributes)
    d = _make_design(args, g)
    return draw_sample(g, d, args.seed, labeled=not getattr(args, "unlabeled", False)), g


def cmd_estimate(args, out: Path):
    sample, g = _load_sample(args)
    d = sample.design
    if d.weight_mode == "proportional":
        draws = sample.draws()
        if draws is None:
            raise UsageError("proportional weights need per-ego draw counts in the sample")
        d = approximate_draw_probs(d, draws)
    estimator = args.estimator
    metrics = None
    if sample.labeled:
        metrics = saturation_metrics(sample, g, N=d.N)
    if estimator == "auto":
        estimator = recommend_estimator(metrics, True, args.threshold) if metrics else "cds"
    if estimator == "cc" and not sample.labeled:
        raise UsageError("--estimator cc requires a labeled sample")
    p = None
    if args.compositions:
        labels = sample.category_labels
        if not labels:
            raise UsageError("--compositions needs attributes in the sample")
        p = len(labels)
    workers = args.workers or default_workers()
    profiles = profile_sample(sample, p, args.max_order, workers=workers)
    est = estimate_distribution(sample, profiles, estimator, design=d, max_pool=args.max_pool)
    if p:
        est.update(estimate_distribution(sample, profiles, estimator, compositions=True, design=d,
                                         max_pool=args.max_pool))
    text = estimates_to_json(est, sample, args.seed if g is not None else None, sample.category_labels)
    (out / "estimates.json").write_text(text)
    sys.stdout.write(text + "\n")
    return {"estimator": estimator, "n": sample.n, "n_prime": sample.n_prime,
            "saturation": asdict(metrics) if metrics else None}


def cmd_sweep(args, out: Path):
    g = load_graph(args.edges, args.attributes)
    sizes = [int(x) for x in args.sizes.split(",") if x]
    if not sizes:
        raise UsageError("--sizes is empty")
    truth = read_census(args.truth, args.truth_compositions) if args.truth else None
    d = _make_design(args, g, draws=sizes[0])
    name = args.dataset or Path(args.edges).name
    rep = run_sweep(g, d, sizes, args.replications, args.seed, truth, labeled=not args.unlabeled,
                    max_order=args.max_order, workers=args.workers or default_workers(),
                    dataset=name, census_budget=args.budget, threshold=args.threshold)
    rep.write(out / "report.json", out / "report.csv")
    plot_nmae(rep, out / "nmae.svg")
    for n, s in rep.summary.items():
        meds = " ".join(f"{k}={v['median']:.4f}" for k, v in s["nmae"].items())
        sys.stdout.write(f"n={n} {meds} avg_edge_count={s['saturation']['avg_edge_count']:.3f}\n")
    return {"dataset": name}


def cmd_recommend(args, out: Path):
    sample, g = _load_sample(args)
    if not sample.labeled:
        verdict, metrics = "cds", None
    else:
        metrics = saturation_metrics(sample, g, N=sample.design.N if sample.design else args.N)
        verdict = recommend_estimator(metrics, True, args.threshold)
    res = {"recommended": verdict, "metrics": asdict(metrics) if metrics else None,
           "threshold": args.threshold}
    (out / "recommendation.json").write_text(json.dumps(res, indent=1))
    sys.stdout.write(json.dumps(res) + "\n")
    return {}


def cmd_plot(args, out: Path):
    rep = ReplicationReport.from_json(Path(args.report).read_text())
    plot_nmae(rep, args.out)
    return None


COMMANDS = {"census": cmd_census, "estimate": cmd_estimate, "sweep": cmd_sweep,
            "recommend": cmd_recommend, "plot": cmd_plot}


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    started = time.monotonic()
    try:
        if args.command == "plot":
            cmd_plot(args, None)
            return EXIT_OK
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        extra = COMMANDS[args.command](args, out)
        _manifest(args, out, started, extra)
    except UsageError as exc:
        ap.print_usage(sys.stderr)
        print(f"egoclique: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UnsupportedDesignError as exc:
        print(f"egoclique: unsupported design: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (CensusBudgetExceeded, PoolCapacityError) as exc:
        print(f"egoclique: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (OSError, GraphFormatError) as exc:
        print(f"egoclique: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
