"""Maximal clique enumeration, per-ego clique profiles and exact census.

Enumeration is pivoting Bron-Kerbosch (greedy max-degree pivot). The whole
graph census runs the outer level in degeneracy order, which keeps each
subproblem no larger than the graph's degeneracy.
"""
from __future__ import annotations

import heapq
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Hashable, Iterator, Mapping

from .graph import Egonet, EgonetSample, Graph


class CensusBudgetExceeded(RuntimeError):
    """Raised when a census exceeds its clique or time budget.

    ``partial`` holds the :class:`Census` accumulated so far.
    """

    def __init__(self, msg, partial=None):
        super().__init__(msg)
        self.partial = partial


def _key(x):
    return (0, x, "") if isinstance(x, (int, float)) else (1, 0, str(x))


def _sorted(members) -> tuple:
    try:
        return tuple(sorted(members))
    except TypeError:
        return tuple(sorted(members, key=_key))


@dataclass(frozen=True)
class CliqueRecord:
    members: tuple
    composition: tuple | None = None
    oversized: bool = False

    def __post_init__(self):
        if not self.members:
            raise ValueError("empty clique")
        if self.composition is not None and sum(self.composition) != len(self.members):
            raise ValueError("composition does not sum to clique order")

    @property
    def order(self) -> int:
        return len(self.members)

    @property
    def key(self) -> tuple:
        return self.members


def composition_of(members, attrs: Mapping, p: int) -> tuple:
    u = [0] * p
    for m in members:
        c = attrs.get(m) if attrs is not None else None
        if c is None or c == 0:
            raise KeyError(f"no attribute for clique member {m!r}")
        if not 1 <= c <= p:
            raise ValueError(f"member {m!r} has category {c} outside 1..{p}")
        u[c - 1] += 1
    return tuple(u)


def _expand(adj, R, P, X, out):
    if not P:
        if not X:
            out(R)
        return
    # pivot maximizing |P & N(u)| leaves the fewest branches
    PX = P | X
    pivot = max(PX, key=lambda u: len(P & adj[u]))
    for v in list(P - adj[pivot]):
        nv = adj[v]
        R.append(v)
        _expand(adj, R, P & nv, X & nv, out)
        R.pop()
        P.discard(v)
        X.add(v)


def degeneracy_order(adj: Mapping[Hashable, set]) -> list:
    """Smallest-last vertex ordering (lazy-deletion heap)."""
    deg = {v: len(n) for v, n in adj.items()}
    heap = [(d, i, v) for i, (v, d) in enumerate(deg.items())]
    heapq.heapify(heap)
    tie = {v: i for i, (_, _, v) in enumerate(heap)}
    done = set()
    order = []
    while heap:
        d, _, v = heapq.heappop(heap)
        if v in done or d != deg[v]:
            continue
        done.add(v)
        order.append(v)
        for w in adj[v]:
            if w not in done:
                deg[w] -= 1
                heapq.heappush(heap, (deg[w], tie[w], w))
    return order


def iter_maximal_cliques(adj: Mapping[Hashable, set], containing=None) -> Iterator[list]:
    """Yield every maximal clique of ``adj`` once (as a member list).

    With ``containing`` set, only the cliques that contain that vertex are
    produced; this is all an ego needs from its own egonet.
    """
    found = []
    emit = lambda R: found.append(list(R))  # noqa: E731
    if containing is not None:
        _expand(adj, [containing], set(adj[containing]), set(), emit)
        yield from found
        return
    position = {}
    for k, v in enumerate(degeneracy_order(adj)):
        position[v] = k
    for v in sorted(adj, key=position.__getitem__):
        nv = adj[v]
        later = {w for w in nv if position[w] > position[v]}
        earlier = nv - later
        _expand(adj, [v], later, set(earlier), emit)
        yield from found
        found.clear()


def iter_cliques(adj: Mapping[Hashable, set], max_order: int, containing=None) -> Iterator[list]:
    """Yield all cliques (maximal or not) with at most ``max_order`` members."""
    position = {v: k for k, v in enumerate(_sorted(adj))}

    def grow(R, cand):
        yield list(R)
        if len(R) >= max_order:
            return
        for w in sorted(cand, key=position.__getitem__):
            R.append(w)
            yield from grow(R, {x for x in cand & adj[w] if position[x] > position[w]})
            R.pop()

    if containing is not None:
        # cliques through the ego: extend {ego} by cliques of its neighborhood
        yield from grow([containing], set(adj[containing]))
        return
    for v in _sorted(adj):
        yield from grow([v], {w for w in adj[v] if position[w] > position[v]})


def adjacency_from_edges(members, edges) -> dict:
    adj = {m: set() for m in members}
    for a, b in edges:
        if a == b:
            continue
        adj[a].add(b)
        adj[b].add(a)
    return adj


def enumerate_maximal_cliques(adj: Mapping[Hashable, set], max_order: int | None = None,
                              attrs: Mapping | None = None, p: int | None = None,
                              containing=None) -> list[CliqueRecord]:
    """Maximal cliques of ``adj`` as records sorted by member tuple.

    Cliques larger than ``max_order`` are still enumerated in full (so that
    maximality is preserved) but come back flagged ``oversized``.
    """
    out = []
    for R in iter_maximal_cliques(adj, containing):
        members = _sorted(R)
        comp = composition_of(members, attrs, p) if p is not None else None
        out.append(CliqueRecord(members, comp, max_order is not None and len(members) > max_order))
    out.sort(key=lambda r: [_key(m) for m in r.members])
    return out


@dataclass(frozen=True)
class EgoCliqueProfile:
    ego_id: Hashable
    degree_by_order: dict
    degree_by_composition: dict | None = None
    distinct_cliques: tuple | None = None
    oversized: int = 0

    def degree(self, target) -> int:
        if isinstance(target, tuple):
            if self.degree_by_composition is None:
                raise ValueError(f"profile of ego {self.ego_id!r} has no compositions")
            return self.degree_by_composition.get(target, 0)
        return self.degree_by_order.get(target, 0)


def profile_ego(e: Egonet, category_count: int | None = None, attributes: Mapping | None = None,
                max_order: int | None = None, mode: str = "maximal") -> EgoCliqueProfile:
    """Tally the cliques of ``e`` that contain the ego.

    ``category_count`` switches on composition tallies, read from
    ``attributes`` (member handle to category) or else from ``e.attrs``.
    ``mode="all"`` counts every clique up to ``max_order`` instead of only
    maximal ones.
    """
    adj = e.adjacency()
    attrs = attributes if attributes is not None else e.attrs
    if category_count is not None:
        if attrs is None:
            raise KeyError(f"egonet {e.ego_id!r} carries no attributes")
        for m in e.members:
            if not attrs.get(m):
                raise KeyError(f"egonet {e.ego_id!r}: no attribute for member {m!r}")
    if mode == "maximal":
        cliques = enumerate_maximal_cliques(adj, max_order, attrs, category_count, containing=e.ego)
    elif mode == "all":
        if max_order is None:
            raise ValueError("mode='all' needs max_order")
        cliques = [CliqueRecord(m, composition_of(m, attrs, category_count) if category_count else None)
                   for m in map(_sorted, iter_cliques(adj, max_order, containing=e.ego))]
    else:
        raise ValueError(f"unknown mode {mode!r}")

    by_order: Counter = Counter()
    by_comp: Counter | None = Counter() if category_count is not None else None
    oversized = 0
    for c in cliques:
        if c.oversized:
            oversized += 1
            continue
        by_order[c.order] += 1
        if by_comp is not None:
            by_comp[c.composition] += 1
    return EgoCliqueProfile(
        e.ego_id, dict(by_order), None if by_comp is None else dict(by_comp),
        tuple(cliques) if e.labeled else None, oversized,
    )


def _profile_chunk(args):
    egonets, p, max_order, mode = args
    return [profile_ego(e, p, None, max_order, mode) for e in egonets]


def profile_sample(sample: EgonetSample, category_count: int | None = None, max_order: int | None = None,
                   mode: str = "maximal", workers: int = 1) -> list[EgoCliqueProfile]:
    """Profiles for every egonet of ``sample``, in sample order."""
    egonets = list(sample.egonets)
    if workers <= 1 or len(egonets) < 2 * workers:
        return _profile_chunk((egonets, category_count, max_order, mode))
    size = max(1, len(egonets) // (workers * 4))
    chunks = [(egonets[k:k + size], category_count, max_order, mode) for k in range(0, len(egonets), size)]
    with ProcessPoolExecutor(workers) as pool:
        return [p for part in pool.map(_profile_chunk, chunks) for p in part]


@dataclass
class Census:
    """Exact clique distribution of a graph."""

    order_counts: dict
    composition_counts: dict | None = None
    oversized: int = 0
    category_labels: tuple | None = None

    @property
    def total(self) -> int:
        return sum(self.order_counts.values()) + self.oversized

    @property
    def max_order(self) -> int:
        return max(self.order_counts, default=0)

    def vector(self) -> list[int]:
        """``C = (C_1, ..., C_max)``."""
        return [self.order_counts.get(i, 0) for i in range(1, self.max_order + 1)]


def census(g: Graph, max_order: int | None = None, budget: int | None = None,
           time_limit: float | None = None, mode: str = "maximal") -> Census:
    """Whole-graph clique census.

    ``budget`` caps the number of cliques and ``time_limit`` the wall time
    in seconds; exceeding either raises :class:`CensusBudgetExceeded`.
    """
    adj = dict(enumerate(g.adjacency_sets()))
    p = g.category_count
    attrs = None
    if g.attributes is not None:
        attrs = {v: int(c) for v, c in enumerate(g.attributes)}
        if min(attrs.values()) == 0:
            p = attrs = None  # partially attributed graphs get no compositions
    res = Census({}, {} if p else None, 0, g.category_labels if p else None)
    orders: Counter = Counter()
    comps: Counter = Counter()
    start = time.monotonic()
    if mode == "maximal":
        it = iter_maximal_cliques(adj)
    elif mode == "all":
        if max_order is None:
            raise ValueError("mode='all' needs max_order")
        it = iter_cliques(adj, max_order)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    for count, R in enumerate(it, 1):
        k = len(R)
        if max_order is not None and k > max_order:
            res.oversized += 1
        else:
            orders[k] += 1
            if p:
                comps[composition_of(R, attrs, p)] += 1
        if (budget is not None and count > budget) or \
                (time_limit is not None and count % 1024 == 0 and time.monotonic() - start > time_limit):
            res.order_counts = dict(sorted(orders.items()))
            if p:
                res.composition_counts = dict(sorted(comps.items()))
            raise CensusBudgetExceeded(
                f"census budget exceeded after {count} cliques "
                f"({time.monotonic() - start:.1f}s); supply a precomputed truth file", res)
    res.order_counts = dict(sorted(orders.items()))
    if p:
        res.composition_counts = dict(sorted(comps.items()))
    return res
