"""Replicated-sampling evaluation: NMAE, saturation diagnostics, sweeps."""
from __future__ import annotations

import csv
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np

from .cliques import Census, CensusBudgetExceeded, census, profile_ego
from .designs import PROPORTIONAL, SamplingDesign, approximate_draw_probs, draw_sample
from .estimators import estimate_distribution
from .graph import EgonetSample, Graph

DEFAULT_EDGE_COUNT_THRESHOLD = 1.5


def _as_mapping(x) -> Mapping:
    if isinstance(x, Mapping):
        return x
    # plain vectors are read as (x_1, x_2, ...)
    return {k: v for k, v in enumerate(x, 1)}


def nmae(estimated, truth) -> float:
    """Normalized mean absolute error over the union of both supports.

    Accepts mappings (order or composition to count) or vectors indexed
    from 1. Missing entries count as zero.
    """
    est, tru = _as_mapping(estimated), _as_mapping(truth)
    keys = set(est) | set(tru)
    denom = sum(abs(float(tru.get(k, 0))) for k in keys)
    if denom == 0:
        raise ValueError("NMAE is undefined for an all-zero truth")
    return sum(abs(float(est.get(k, 0)) - float(tru.get(k, 0))) for k in keys) / denom


@dataclass(frozen=True)
class SaturationMetrics:
    pct_nodes_sampled: float | None
    pct_edges_sampled: float | None
    avg_edge_count: float
    avg_node_count: float
    labeled: bool = True


def saturation_metrics(sample: EgonetSample, g: Graph | None = None,
                       N: int | None = None, num_edges: int | None = None) -> SaturationMetrics:
    """Coverage and overlap of a labeled egonet sample.

    Percentages need the population sizes, taken from ``g`` or from
    ``N``/``num_edges``; they are ``None`` when unknown. Needs no clique
    enumeration.
    """
    if not sample.labeled:
        raise ValueError("saturation metrics need labeled egonets")
    if g is not None:
        N, num_edges = g.N, g.num_edges
    nodes: set = set()
    edges: set = set()
    node_total = edge_total = 0
    for e in sample.egonets:
        es = e.edge_set()
        node_total += len(e.members)
        edge_total += len(es)
        nodes.update(e.members)
        edges |= es
    return SaturationMetrics(
        100.0 * len(nodes) / N if N else None,
        100.0 * len(edges) / num_edges if num_edges else None,
        edge_total / len(edges) if edges else 1.0,
        node_total / len(nodes),
    )


def recommend_estimator(metrics: SaturationMetrics, labeled: bool = True,
                        threshold: float = DEFAULT_EDGE_COUNT_THRESHOLD) -> str:
    """``"cc"`` when the sample is labeled and edges overlap enough, else ``"cds"``."""
    return "cc" if labeled and metrics.avg_edge_count > threshold else "cds"


@dataclass
class ReplicationReport:
    dataset: str
    design: dict
    sizes: list
    replications: int
    seed: int
    records: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=1, sort_keys=True, default=_jsonable)

    def write(self, json_path, csv_path=None) -> None:
        with open(json_path, "w") as fh:
            fh.write(self.to_json())
        if csv_path is not None:
            self.write_csv(csv_path)

    def write_csv(self, path) -> None:
        cols = ["dataset", "n", "replication", "estimator", "nmae", "pct_nodes_sampled",
                "pct_edges_sampled", "avg_edge_count", "avg_node_count"]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(cols)
            for r in self.records:
                s = r["saturation"]
                for est, err in sorted(r["nmae"].items()):
                    w.writerow([self.dataset, r["n"], r["replication"], est, repr(err),
                                s["pct_nodes_sampled"], s["pct_edges_sampled"],
                                s["avg_edge_count"], s["avg_node_count"]])

    @classmethod
    def from_json(cls, text: str) -> ReplicationReport:
        d = json.loads(text)
        d["summary"] = {int(k): v for k, v in d["summary"].items()}
        return cls(**d)

    def median(self, n: int, estimator: str) -> float:
        return self.summary[n]["nmae"][estimator]["median"]


def _jsonable(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    raise TypeError(f"not JSON serializable: {type(x)}")


# per-process state for sweep workers
_STATE: dict = {}


def _init_worker(g, truth, labeled, compositions, max_order):
    _STATE.clear()
    _STATE.update(g=g, truth=truth, labeled=labeled, compositions=compositions,
                  max_order=max_order, cache={})


def _profiles(sample: EgonetSample) -> list:
    cache, p = _STATE["cache"], _STATE["g"].category_count if _STATE["compositions"] else None
    out = []
    for e in sample.egonets:
        prof = cache.get(e.ego_id)
        if prof is None:
            prof = cache[e.ego_id] = profile_ego(e, p, max_order=_STATE["max_order"])
        out.append(prof)
    return out


def _replicate(task):
    size_index, rep, design, seed = task
    g, truth = _STATE["g"], _STATE["truth"]
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(size_index, rep)))
    sample = draw_sample(g, design, rng, labeled=True)
    profiles = _profiles(sample)
    if design.weight_mode == PROPORTIONAL:
        design = approximate_draw_probs(design, sample.draws())
    errors = {}
    estimators = ["cds", "cc"] if _STATE["labeled"] else ["cds"]
    for est in estimators:
        values = estimate_distribution(sample, profiles, est, design=design, variance=False)
        errors[est] = nmae({k: v.value for k, v in values.items()}, truth.order_counts)
        if _STATE["compositions"]:
            values = estimate_distribution(sample, profiles, est, compositions=True,
                                           design=design, variance=False)
            errors[est + "_u"] = nmae({k: v.value for k, v in values.items()}, truth.composition_counts)
    sat = saturation_metrics(sample, g)
    return {"n": design.draws, "replication": rep, "unique": sample.n,
            "nmae": errors, "saturation": asdict(sat)}


def run_sweep(g: Graph, design: SamplingDesign, sizes: Sequence[int], replications: int = 1000,
              seed: int = 0, truth: Census | None = None, labeled: bool = True,
              compositions: bool | None = None, max_order: int | None = None,
              workers: int = 1, dataset: str = "graph", census_budget: int | None = None,
              threshold: float = DEFAULT_EDGE_COUNT_THRESHOLD) -> ReplicationReport:
    """Repeat sample-profile-estimate at each size and score against the truth.

    ``design`` is a template whose ``draws`` is replaced by each size.
    Replication ``r`` at size index ``k`` uses the random stream
    ``SeedSequence(seed, spawn_key=(k, r))``, so results do not depend on
    ``workers``.
    """
    if truth is None:
        try:
            truth = census(g, max_order=max_order, budget=census_budget)
        except CensusBudgetExceeded as exc:
            raise CensusBudgetExceeded(f"{exc}; pass truth= with a precomputed census", exc.partial) from None
    if compositions is None:
        compositions = truth.composition_counts is not None
    if compositions and truth.composition_counts is None:
        raise ValueError("composition sweep needs an attributed truth")
    tasks = [(k, r, replace(design, draws=int(n), hh_scale=None), seed)
             for k, n in enumerate(sizes) for r in range(replications)]
    init = (g, truth, labeled, compositions, max_order)
    if workers <= 1:
        _init_worker(*init)
        records = [_replicate(t) for t in tasks]
    else:
        with ProcessPoolExecutor(workers, initializer=_init_worker, initargs=init) as pool:
            records = list(pool.map(_replicate, tasks, chunksize=max(1, len(tasks) // (workers * 8))))
    report = ReplicationReport(dataset, design.digest() | {"draws": [int(n) for n in sizes]},
                               [int(n) for n in sizes], replications, seed, records)
    report.summary = summarize(records, labeled, threshold)
    return report


def summarize(records, labeled: bool = True, threshold: float = DEFAULT_EDGE_COUNT_THRESHOLD) -> dict:
    out: dict = {}
    for n in sorted({r["n"] for r in records}):
        rows = [r for r in records if r["n"] == n]
        nm = {}
        for est in rows[0]["nmae"]:
            v = np.array([r["nmae"][est] for r in rows])
            q25, med, q75 = np.percentile(v, [25, 50, 75])
            nm[est] = {"median": float(med), "mean": float(v.mean()), "q25": float(q25), "q75": float(q75)}
        sat = {k: _mean([r["saturation"][k] for r in rows])
               for k in ("pct_nodes_sampled", "pct_edges_sampled", "avg_edge_count", "avg_node_count")}
        verdict = recommend_estimator(SaturationMetrics(**sat), labeled, threshold)
        out[n] = {"nmae": nm, "saturation": sat, "recommended": verdict}
    return out


def _mean(xs):
    xs = [x for x in xs if x is not None]
    return float(np.mean(xs)) if xs else None


def plot_nmae(report: ReplicationReport, path) -> None:
    """Median NMAE (with interquartile band) against sample size, as SVG."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    sizes = sorted(report.summary)
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for est in report.summary[sizes[0]]["nmae"]:
        med = [report.summary[n]["nmae"][est]["median"] for n in sizes]
        lo = [report.summary[n]["nmae"][est]["q25"] for n in sizes]
        hi = [report.summary[n]["nmae"][est]["q75"] for n in sizes]
        ax.plot(sizes, med, marker="o", label=est.upper())
        ax.fill_between(sizes, lo, hi, alpha=0.2)
    ax.set_xscale("log")
    ax.set_xlabel("egonet sample size n")
    ax.set_ylabel("median NMAE")
    ax.set_title(report.dataset)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def plot_distribution(truth: Mapping, estimates: Sequence[Mapping], path, title: str = "") -> None:
    """Overlay true ``C_i`` with the spread of replicated estimates, as SVG."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    orders = sorted(set(truth).union(*[set(e) for e in estimates]))
    fig, ax = plt.subplots(figsize=(6, 3.5))
    if estimates:
        data = [[e.get(i, 0.0) for e in estimates] for i in orders]
        ax.boxplot(data, positions=orders, widths=0.6, showfliers=False)
    ax.plot(orders, [truth.get(i, 0) for i in orders], "r.", label="true")
    ax.set_yscale("symlog")
    ax.set_xlabel("clique order i")
    ax.set_ylabel("C_i")
    if title:
        ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
