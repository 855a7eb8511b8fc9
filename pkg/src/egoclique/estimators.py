"""Horvitz-Thompson estimators of clique counts from egonet samples.

Two families:

* clique degree sums (CDS): every ego reports how many order-``i`` (or
  composition-``u``) maximal cliques it belongs to. Summing those degrees
  over all nodes counts every ``i``-clique ``i`` times, so an H-T estimate
  of the degree sum divided by ``i`` estimates the clique count. Works on
  unlabeled samples.
* distinct clique counting (CC): with labeled neighbors the cliques seen
  from different egos can be matched, and each distinct clique is weighted
  by the inverse probability that at least one of its members was drawn.

A target is an ``int`` order ``i`` or a composition tuple ``u``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .cliques import CliqueRecord, EgoCliqueProfile
from .designs import (PROPORTIONAL, UIS, SamplingDesign, UnsupportedDesignError,
                      clique_inclusion_prob, joint_inclusion_prob, node_inclusion_prob)
from .graph import EgonetSample

CDS_HT, CDS_GHT, CC = "CDS_HT", "CDS_GHT", "CC"
HT_JOINT, BH, NONE = "HT_joint", "BH", "none"


class PoolCapacityError(MemoryError):
    """Too many distinct cliques to hold; use the CDS estimator instead."""


def target_order(target) -> int:
    if isinstance(target, tuple):
        return int(sum(target))
    if target < 1:
        raise ValueError(f"clique order must be positive, got {target}")
    return int(target)


@dataclass(frozen=True)
class Estimate:
    target: int | tuple
    value: float
    variance: float | None
    estimator: str
    variance_method: str
    design_digest: dict = field(default_factory=dict)
    variance_floored: bool = False

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("negative clique count estimate")
        if self.variance is not None and self.variance < 0:
            raise ValueError("negative variance; floor it first")

    @property
    def std_error(self) -> float | None:
        return None if self.variance is None else math.sqrt(self.variance)

    def to_record(self, n: int | None = None, n_prime: int | None = None, seed=None) -> dict:
        """Flat JSON-ready record."""
        return {
            "target": list(self.target) if isinstance(self.target, tuple) else self.target,
            "value": self.value,
            "variance": self.variance,
            "estimator": self.estimator,
            "variance_method": self.variance_method,
            "n": n,
            "n_prime": n_prime if n_prime is not None else self.design_digest.get("draws"),
            "N": self.design_digest.get("N"),
            "seed": seed,
        }


def _floor(v: float | None) -> tuple[float | None, bool]:
    if v is None or v >= 0:
        return v, False
    return 0.0, True


def _design(sample: EgonetSample, design) -> SamplingDesign:
    d = design if design is not None else sample.design
    if d is None:
        raise ValueError("sample carries no sampling design")
    return d


def _degrees(sample: EgonetSample, profiles: Sequence[EgoCliqueProfile], target) -> np.ndarray:
    if len(profiles) != sample.n:
        raise ValueError(f"{len(profiles)} profiles for {sample.n} egonets")
    out = np.empty(sample.n)
    for k, (e, prof) in enumerate(zip(sample.egonets, profiles)):
        if prof is None or prof.ego_id != e.ego_id:
            raise ValueError(f"missing profile for ego {e.ego_id!r}")
        if isinstance(target, tuple) and prof.degree_by_composition is None:
            raise ValueError("composition target needs attributed profiles")
        out[k] = prof.degree(target)
    return out


def _inclusion(sample: EgonetSample, d: SamplingDesign) -> np.ndarray:
    return np.array([node_inclusion_prob(d, e.ego_id) for e in sample.egonets])


def estimate_var_ht(sample: EgonetSample, profiles, target, design=None) -> float:
    """Unbiased H-T variance of the CDS estimate (may come out negative).

    Raises :class:`UnsupportedDesignError` when joint inclusion probabilities
    are not available; callers fall back to :func:`estimate_var_bh`.
    """
    d = _design(sample, design)
    i = target_order(target)
    y = _degrees(sample, profiles, target) / i
    p = _inclusion(sample, d)
    var = float(np.sum((1.0 / p**2 - 1.0 / p) * y**2))
    if sample.n < 2:
        if d.kind != UIS:
            raise UnsupportedDesignError("joint inclusion probabilities are only available for uniform designs")
        return var
    ids = sample.ego_ids
    pjk = joint_inclusion_prob(d, ids[0], ids[1])
    # uniform designs: p_j and p_jk are the same for every node and pair
    pj = p[0]
    cross = y.sum() ** 2 - np.sum(y**2)
    return var + float((1.0 / (pj * pj) - 1.0 / pjk) * cross)


def estimate_var_bh(sample: EgonetSample, profiles, target, point_estimate: float,
                    weights: Sequence[float] | None = None, design=None, N: int | None = None) -> float:
    """Brewer-Hanif style variance; conservative, no joint probabilities.

    ``weights`` are per-ego values proportional to inclusion probability
    (defaults to the exact ``p_j``). Each ego's contribution is expanded to
    a population total, ``N * n * (d_j / w_j) / sum_k(i / w_k)``, and the
    spread of those around ``point_estimate`` is scaled by the finite
    population correction.
    """
    n = sample.n
    if n < 2:
        raise ValueError("Brewer-Hanif variance needs at least two egos")
    d = design if design is not None else sample.design
    if N is None:
        N = _design(sample, d).N
    i = target_order(target)
    dj = _degrees(sample, profiles, target)
    w = np.asarray(weights, dtype=float) if weights is not None else _inclusion(sample, _design(sample, d))
    if np.any(w <= 0):
        raise ValueError("non-positive ego weight")
    terms = N * n * (dj / w) / np.sum(i / w)
    return float((N - n) / (n * (n - 1) * N) * np.sum((terms - point_estimate) ** 2))


def estimate_cds(sample: EgonetSample, profiles, target, design=None, variance: bool = True) -> Estimate:
    """H-T clique degree sum estimate of ``C_target``."""
    d = _design(sample, design)
    if d.weight_mode == PROPORTIONAL:
        raise ValueError("weights known only up to a constant; use estimate_cds_generalized")
    i = target_order(target)
    dj = _degrees(sample, profiles, target)
    p = _inclusion(sample, d)
    degree_sum = float(np.sum(dj / p))
    value = degree_sum / i
    var, method = None, NONE
    if variance:
        try:
            var, method = estimate_var_ht(sample, profiles, target, d), HT_JOINT
        except UnsupportedDesignError:
            if sample.n >= 2:
                var, method = estimate_var_bh(sample, profiles, target, value, p, d), BH
    var, floored = _floor(var)
    return Estimate(target, value, var, CDS_HT, method, d.digest(), floored)


def _ego_weights(sample: EgonetSample, d: SamplingDesign | None, weights) -> np.ndarray:
    if weights is None:
        if d is None or d.weights is None:
            raise ValueError("generalized estimator needs per-ego weights")
        if d.replacement and d.hh_scale is not None:
            # repeated draws saturate inclusion for heavy nodes, so raw weights
            # stop being proportional to p_j; use the approximated p_j instead
            return _inclusion(sample, d)
        return np.array([d.weight(e.ego_id) for e in sample.egonets])
    if isinstance(weights, Mapping):
        return np.array([float(weights[e.ego_id]) for e in sample.egonets])
    return np.asarray(weights, dtype=float)


def estimate_cds_generalized(sample: EgonetSample, profiles, target, weights=None,
                             N: int | None = None, design=None, variance: bool = True) -> Estimate:
    """Generalized (ratio) H-T estimate for weights known up to a constant.

    ``weights`` (sequence aligned with the egonets, or mapping by ego id)
    default to the design's per-node weights, or to the Hansen-Hurwitz
    inclusion probabilities once the design carries that scale.
    """
    d = design if design is not None else sample.design
    if N is None:
        if d is None:
            raise ValueError("population size N is required")
        N = d.N
    i = target_order(target)
    dj = _degrees(sample, profiles, target)
    w = _ego_weights(sample, d, weights)
    if np.any(w <= 0):
        raise ValueError("generalized estimator needs positive weights")
    value = float(N / i * np.sum(dj / w) / np.sum(1.0 / w))
    var, method = None, NONE
    if variance and sample.n >= 2:
        var, method = estimate_var_bh(sample, profiles, target, value, w, N=N), BH
    var, floored = _floor(var)
    digest = d.digest() if d is not None else {"N": N, "draws": sample.n_prime}
    return Estimate(target, value, var, CDS_GHT, method, digest, floored)


@dataclass
class DistinctCliquePool:
    """Distinct ego-containing cliques across a labeled sample, with ``pi_k``."""

    cliques: dict
    inclusion: dict
    n: int
    design: SamplingDesign

    def __len__(self):
        return len(self.cliques)

    def matching(self, target) -> list[CliqueRecord]:
        if isinstance(target, tuple):
            out = []
            for c in self.cliques.values():
                if c.composition is None:
                    raise ValueError("composition target needs attributed cliques")
                if c.composition == target:
                    out.append(c)
            return out
        return [c for c in self.cliques.values() if c.order == target and not c.oversized]

    def targets(self, compositions: bool = False) -> list:
        if compositions:
            return sorted({c.composition for c in self.cliques.values() if not c.oversized})
        return sorted({c.order for c in self.cliques.values() if not c.oversized})


def build_clique_pool(sample: EgonetSample, profiles, design=None, max_cliques: int | None = None) -> DistinctCliquePool:
    """Union of the ego-containing cliques of every egonet, deduplicated."""
    if not sample.labeled:
        raise ValueError("distinct clique counting needs a labeled sample")
    d = _design(sample, design)
    if len(profiles) != sample.n:
        raise ValueError(f"{len(profiles)} profiles for {sample.n} egonets")
    pool: dict = {}
    for prof in profiles:
        if prof.distinct_cliques is None:
            raise ValueError(f"profile of ego {prof.ego_id!r} has no clique list (unlabeled?)")
        for c in prof.distinct_cliques:
            prev = pool.setdefault(c.key, c)
            if prev is not c and prev != c:
                raise ValueError(f"clique {c.key} seen with conflicting attributes")
        if max_cliques is not None and len(pool) > max_cliques:
            raise PoolCapacityError(
                f"more than {max_cliques} distinct cliques; use the CDS estimator, which needs no pool")
    if d.kind == UIS:
        by_order: dict = {}
        for c in pool.values():
            if c.order not in by_order:
                by_order[c.order] = clique_inclusion_prob(d, c.members)
        inclusion = {k: by_order[c.order] for k, c in pool.items()}
    else:
        inclusion = {k: clique_inclusion_prob(d, c.members) for k, c in pool.items()}
    return DistinctCliquePool(pool, inclusion, sample.n, d)


def estimate_var_bh_cc(pool: DistinctCliquePool, target, point_estimate: float) -> float | None:
    """Brewer-Hanif variance for the CC estimate; ``None`` when undefined."""
    pis = np.array([pool.inclusion[c.key] for c in pool.matching(target)])
    c = len(pis)
    if c < 2 or point_estimate == 0:
        return None
    lead = (point_estimate - c) / (c * (c - 1) * point_estimate)
    return float(lead * np.sum((pool.n * c / pis - point_estimate) ** 2))


def estimate_cc(pool: DistinctCliquePool, target, variance: bool = True) -> Estimate:
    """H-T distinct clique count estimate of ``C_target``."""
    target_order(target)
    pis = [pool.inclusion[c.key] for c in pool.matching(target)]
    value = float(sum(1.0 / p for p in pis))
    var = estimate_var_bh_cc(pool, target, value) if variance else None
    var, floored = _floor(var)
    return Estimate(target, value, var, CC, BH if var is not None else NONE,
                    pool.design.digest(), floored)


def realized_targets(profiles, compositions: bool = False) -> list:
    keys = set()
    for prof in profiles:
        src = prof.degree_by_composition if compositions else prof.degree_by_order
        if src is None:
            raise ValueError("profiles carry no compositions")
        keys.update(k for k, v in src.items() if v)
    return sorted(keys)


def estimate_distribution(sample: EgonetSample, profiles, estimator: str = "cds",
                          compositions: bool = False, targets=None, design=None,
                          variance: bool = True, max_pool: int | None = None) -> dict:
    """Estimates for every realized order (or composition) of the sample.

    ``estimator`` is ``"cds"`` (H-T, or generalized H-T for proportional
    weights) or ``"cc"``.
    """
    d = _design(sample, design)
    if estimator == "cc":
        pool = build_clique_pool(sample, profiles, d, max_pool)
        targets = pool.targets(compositions) if targets is None else targets
        return {t: estimate_cc(pool, t, variance) for t in targets}
    if estimator != "cds":
        raise ValueError(f"unknown estimator {estimator!r}")
    targets = realized_targets(profiles, compositions) if targets is None else targets
    if d.weight_mode == PROPORTIONAL:
        return {t: estimate_cds_generalized(sample, profiles, t, design=d, variance=variance) for t in targets}
    return {t: estimate_cds(sample, profiles, t, d, variance) for t in targets}
