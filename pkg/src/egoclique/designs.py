"""Ego sampling designs and their inclusion probabilities.

Two designs are supported: uniform (``uis``) and weighted (``wis``)
independence sampling, each with or without replacement. Weights are
indexed by dense node id and are either exact per-draw probabilities or
known only up to a constant (``weight_mode="proportional"``). In the
second case, :func:`approximate_draw_probs` normalizes them from the
observed draws.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np

from .graph import EgonetSample, Graph, sample_from_draws


class UnsupportedDesignError(ValueError):
    """The design has no closed-form probability for this quantity."""


UIS, WIS = "uis", "wis"
EXACT, PROPORTIONAL = "exact", "proportional"


@dataclass(frozen=True)
class SamplingDesign:
    kind: str
    replacement: bool
    draws: int
    N: int
    weights: Mapping | np.ndarray | None = field(default=None, repr=False)
    weight_mode: str = EXACT
    # Hansen-Hurwitz factor: p'_j = w'_j * hh_scale once approximated
    hh_scale: float | None = None

    def __post_init__(self):
        if self.kind not in (UIS, WIS):
            raise ValueError(f"unknown design kind {self.kind!r}")
        if self.weight_mode not in (EXACT, PROPORTIONAL):
            raise ValueError(f"unknown weight mode {self.weight_mode!r}")
        if self.draws < 1 or self.N < 1:
            raise ValueError("draws and N must be positive")
        if self.kind == UIS:
            if not self.replacement and self.draws > self.N:
                raise ValueError(f"cannot draw {self.draws} of {self.N} nodes without replacement")
            return
        if self.weights is None:
            raise ValueError("weighted design needs weights")
        w = _weight_values(self.weights)
        if np.any(w < 0):
            raise ValueError("negative weight")
        if self.weight_mode == EXACT:
            if np.any(w <= 0):
                raise ValueError("draw probabilities must be positive")
            if isinstance(self.weights, np.ndarray) and len(w) == self.N \
                    and not np.isclose(w.sum(), 1.0, rtol=0, atol=1e-9):
                raise ValueError(f"draw probabilities sum to {w.sum()}, not 1")

    @property
    def uniform(self) -> bool:
        return self.kind == UIS

    def weight(self, j) -> float:
        try:
            return float(self.weights[j])
        except (KeyError, IndexError):
            raise KeyError(f"no weight for node {j!r}") from None

    def draw_prob(self, j) -> float:
        """Per-draw selection probability ``p'_j``."""
        if self.kind == UIS:
            return 1.0 / self.N
        if self.weight_mode == EXACT:
            return self.weight(j)
        if self.hh_scale is None:
            raise UnsupportedDesignError(
                "draw probabilities known only up to a constant; call approximate_draw_probs first")
        return self.weight(j) * self.hh_scale

    def digest(self) -> dict:
        d = {"kind": self.kind, "replacement": "with" if self.replacement else "without",
             "draws": self.draws, "N": self.N}
        if self.kind == WIS:
            d["weight_mode"] = self.weight_mode
            w = _weight_values(self.weights)
            d["weights_sha1"] = hashlib.sha1(np.ascontiguousarray(w, dtype=float).tobytes()).hexdigest()[:12]
            if self.hh_scale is not None:
                d["hh_scale"] = self.hh_scale
        return d


def _weight_values(weights) -> np.ndarray:
    if isinstance(weights, Mapping):
        return np.fromiter(weights.values(), dtype=float, count=len(weights))
    return np.asarray(weights, dtype=float)


def uis(N: int, draws: int, replacement: bool = False) -> SamplingDesign:
    return SamplingDesign(UIS, replacement, draws, N)


def wis(weights, draws: int, replacement: bool = True, N: int | None = None,
        proportional: bool = False) -> SamplingDesign:
    """Weighted design; exact weights are normalized to probabilities."""
    if N is None:
        if isinstance(weights, Mapping):
            raise ValueError("N is required when weights are a mapping")
        N = len(weights)
    if not proportional and not isinstance(weights, Mapping):
        w = np.asarray(weights, dtype=float)
        if np.any(w <= 0):
            raise ValueError("draw weights must be positive")
        weights = w / w.sum()
    return SamplingDesign(WIS, replacement, draws, N, weights,
                          PROPORTIONAL if proportional else EXACT)


def draw_sequence(d: SamplingDesign, rng: np.random.Generator) -> np.ndarray:
    """Dense ego ids for the ``d.draws`` draws, in draw order."""
    n = d.draws
    if d.kind == UIS:
        if d.replacement:
            return rng.integers(0, d.N, size=n)
        return rng.choice(d.N, size=n, replace=False)
    w = _weight_values(d.weights)
    if len(w) != d.N:
        raise ValueError("sampling needs a weight for every node")
    if d.replacement:
        cum = np.cumsum(w)
        return np.minimum(np.searchsorted(cum, rng.random(n) * cum[-1], side="right"), d.N - 1)
    positive = int(np.count_nonzero(w > 0))
    if n > positive:
        raise ValueError(f"cannot draw {n} egos without replacement from {positive} positive-weight nodes")
    return rng.choice(d.N, size=n, replace=False, p=w / w.sum())


def draw_sample(g: Graph, d: SamplingDesign, seed=None, labeled: bool = True) -> EgonetSample:
    """Draw egos from ``g`` under ``d`` and collect their egonets."""
    if d.N != g.N:
        raise ValueError(f"design N={d.N} but graph has {g.N} nodes")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return sample_from_draws(g, draw_sequence(d, rng), d, labeled)


def node_inclusion_prob(d: SamplingDesign, j) -> float:
    """Probability that node ``j`` is drawn at least once."""
    if d.kind == UIS:
        if d.replacement:
            return float(-np.expm1(d.draws * np.log1p(-1.0 / d.N))) if d.N > 1 else 1.0
        return d.draws / d.N
    if not d.replacement:
        raise UnsupportedDesignError("weighted sampling without replacement has no closed-form inclusion probability")
    return _at_least_once(d.draw_prob(j), d.draws)


def _at_least_once(q: float, n: int) -> float:
    """``1 - (1 - q)^n`` with the ``q >= 1`` case pinned to 1."""
    if q >= 1.0:
        return 1.0
    return float(-np.expm1(n * np.log1p(-q)))


def joint_inclusion_prob(d: SamplingDesign, j, k) -> float:
    """Probability that nodes ``j != k`` are both drawn (uniform designs)."""
    if j == k:
        raise ValueError("joint inclusion needs two distinct nodes")
    if d.kind != UIS:
        raise UnsupportedDesignError("joint inclusion probabilities are only available for uniform designs")
    N, n = d.N, d.draws
    if N < 2:
        raise ValueError("joint inclusion needs N >= 2")
    if d.replacement:
        return 1.0 - 2.0 * ((N - 1) / N) ** n + ((N - 2) / N) ** n
    return n * (n - 1) / (N * (N - 1))


def approximate_draw_probs(d: SamplingDesign, observed: Sequence) -> SamplingDesign:
    """Hansen-Hurwitz normalization of proportional weights.

    ``observed`` lists every draw, repeats included. Returns a copy of
    ``d`` whose :meth:`~SamplingDesign.draw_prob` gives
    ``w'_j * sum_k(1 / w'_k) / (n' N)``.
    """
    if d.kind != WIS or d.weight_mode != PROPORTIONAL:
        raise ValueError("Hansen-Hurwitz approximation applies to proportional weights only")
    observed = list(observed)
    if len(observed) != d.draws:
        raise ValueError(f"{len(observed)} observed draws but design has n'={d.draws}")
    w = np.array([d.weight(k) for k in observed], dtype=float)
    if np.any(w <= 0):
        bad = observed[int(np.argmax(w <= 0))]
        raise ValueError(f"observed node {bad!r} has non-positive weight")
    scale = float(np.sum(1.0 / w) / (len(observed) * d.N))
    return replace(d, hh_scale=scale)


def clique_inclusion_prob(d: SamplingDesign, members: Sequence) -> float:
    """Probability that at least one member of a clique is drawn."""
    i = len(members)
    if i < 1:
        raise ValueError("empty clique")
    N, n = d.N, d.draws
    if i > N:
        raise ValueError(f"clique of order {i} exceeds N={N}")
    if d.kind == UIS:
        if d.replacement:
            return _at_least_once(i / N, n)
        if n > N - i:
            return 1.0
        k = np.arange(n)
        return float(1.0 - np.prod((N - i - k) / (N - k)))
    if not d.replacement:
        raise UnsupportedDesignError("weighted sampling without replacement has no closed-form clique inclusion probability")
    return _at_least_once(sum(d.draw_prob(m) for m in members), n)


def read_weight_file(path, g: Graph | None = None) -> dict:
    """CSV ``node_id,weight``; ids are mapped to dense ids when ``g`` is given."""
    import csv
    out = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"node_id", "weight"} <= set(reader.fieldnames):
            raise ValueError("weight file needs header node_id,weight")
        for row in reader:
            node = int(row["node_id"])
            out[g.dense_id(node) if g is not None else node] = float(row["weight"])
    return out
