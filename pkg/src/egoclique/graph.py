"""Undirected simple graphs with categorical node attributes, and egonets.

Graphs are loaded from SNAP-style edge lists, densified to ids ``0..N-1``
and stored as CSR arrays with sorted neighbor rows. The original ids are
kept in :attr:`Graph.node_ids`.
"""
from __future__ import annotations

import csv
import io
import logging
import os
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

log = logging.getLogger(__name__)


class GraphFormatError(ValueError):
    """Malformed edge-list or attribute input."""


class Graph:
    """Immutable undirected simple graph.

    Parameters
    ----------
    indptr, indices : np.ndarray
        CSR adjacency; each row must be sorted and free of self-loops.
    node_ids : np.ndarray, optional
        Original identifier of every dense node id.
    attributes : np.ndarray, optional
        Category per node in ``1..p``; ``0`` marks a node without attribute.
    category_labels : sequence of str, optional
        Label of category ``j`` at position ``j - 1``.
    """

    def __init__(self, indptr, indices, node_ids=None, attributes=None,
                 category_labels=None, dropped_edges=0):
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.indices = np.asarray(indices, dtype=np.int64)
        n = len(self.indptr) - 1
        if n < 1:
            raise ValueError("graph needs at least one node")
        self.node_ids = (np.arange(n) if node_ids is None
                         else np.asarray(node_ids))
        self.attributes = None if attributes is None else np.asarray(attributes, dtype=np.int64)
        self.category_labels = None if category_labels is None else tuple(category_labels)
        if self.attributes is not None:
            if len(self.attributes) != n:
                raise ValueError("attribute array length differs from node count")
            p = self.category_count
            if self.attributes.min() < 0 or self.attributes.max() > p:
                raise ValueError("attribute category outside 1..p")
        self.dropped_edges = dropped_edges
        for arr in (self.indptr, self.indices, self.node_ids):
            arr.setflags(write=False)
        if self.attributes is not None:
            self.attributes.setflags(write=False)
        self._sets: list[frozenset[int]] | None = None
        self._index: dict | None = None

    @property
    def N(self) -> int:
        return len(self.indptr) - 1

    @property
    def num_edges(self) -> int:
        return len(self.indices) // 2

    @property
    def category_count(self) -> int | None:
        if self.attributes is None:
            return None
        if self.category_labels is not None:
            return len(self.category_labels)
        return int(self.attributes.max())

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    def neighbors(self, v: int) -> np.ndarray:
        """Sorted neighbor array of dense node ``v``."""
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def adjacency_sets(self) -> list[frozenset[int]]:
        if self._sets is None:
            self._sets = [frozenset(self.neighbors(v).tolist()) for v in range(self.N)]
        return self._sets

    def has_edge(self, a: int, b: int) -> bool:
        row = self.neighbors(a)
        k = np.searchsorted(row, b)
        return bool(k < len(row) and row[k] == b)

    def edges(self) -> np.ndarray:
        """``(|E|, 2)`` array of edges with ``a < b``."""
        src = np.repeat(np.arange(self.N), self.degrees())
        mask = src < self.indices
        return np.column_stack([src[mask], self.indices[mask]])

    def dense_id(self, original) -> int:
        if self._index is None:
            self._index = {k: i for i, k in enumerate(self.node_ids.tolist())}
        try:
            return self._index[original]
        except KeyError:
            raise KeyError(f"unknown node id {original!r}") from None

    def __repr__(self):
        return f"Graph(N={self.N}, |E|={self.num_edges}, p={self.category_count})"

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[Hashable, Hashable]],
                   attributes: Mapping | None = None, nodes: Iterable | None = None) -> Graph:
        """Build a graph from ``(a, b)`` pairs of arbitrary hashable ids.

        Ids are densified in sorted order when sortable, so ``from_edges`` on
        small hand-built graphs keeps a predictable dense numbering.
        Attributes map original id to a category label.
        """
        pairs = [(a, b) for a, b in edges]
        ids = set(nodes or ())
        for a, b in pairs:
            ids.add(a)
            ids.add(b)
        if attributes:
            unknown = set(attributes) - ids
            if unknown:
                raise GraphFormatError(f"attribute for unknown node {sorted(unknown, key=str)[0]!r}")
        try:
            order = sorted(ids)
        except TypeError:
            order = sorted(ids, key=str)
        index = {k: i for i, k in enumerate(order)}
        dense = np.array([(index[a], index[b]) for a, b in pairs], dtype=np.int64).reshape(-1, 2)
        attr_arr = labels = None
        if attributes is not None:
            attr_arr, labels = _encode_categories(attributes, index, len(order))
        return _from_dense(dense, len(order), np.array(order, dtype=object if _mixed(order) else None),
                           attr_arr, labels)


def _mixed(order) -> bool:
    return not all(isinstance(x, (int, np.integer)) for x in order)


def _encode_categories(attributes: Mapping, index: Mapping, n: int):
    labels: list = []
    code: dict = {}
    arr = np.zeros(n, dtype=np.int64)
    for node, label in attributes.items():
        if label not in code:
            labels.append(label)
            code[label] = len(labels)
        arr[index[node]] = code[label]
    return arr, [str(x) for x in labels]


def _from_dense(pairs: np.ndarray, n: int, node_ids, attributes=None, labels=None) -> Graph:
    raw = len(pairs)
    pairs = pairs[pairs[:, 0] != pairs[:, 1]]
    # symmetrize, then dedupe on (row, col)
    both = np.concatenate([pairs, pairs[:, ::-1]])
    keys = np.unique(both[:, 0] * n + both[:, 1])
    rows, cols = np.divmod(keys, n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, rows + 1, 1)
    np.cumsum(indptr, out=indptr)
    dropped = raw - len(keys) // 2
    if dropped:
        log.warning("dropped %d duplicate or self-loop edges", dropped)
    return Graph(indptr, cols, node_ids, attributes, labels, dropped_edges=dropped)


def load_graph(edge_source, attribute_source=None) -> Graph:
    """Read a whitespace-separated edge list, optionally with attributes.

    ``edge_source`` and ``attribute_source`` are paths or open text streams.
    Lines starting with ``#`` are comments. Directed input is symmetrized;
    duplicate edges and self-loops are dropped and counted in
    ``Graph.dropped_edges``. The attribute file is a CSV with header
    ``node_id,attribute``; labels become categories ``1..p`` in order of
    first appearance.
    """
    with _open_text(edge_source) as fh:
        src, dst = [], []
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            parts = s.split()
            try:
                if len(parts) < 2:
                    raise ValueError
                a, b = int(parts[0]), int(parts[1])
                if a < 0 or b < 0:
                    raise ValueError
            except ValueError:
                raise GraphFormatError(f"line {lineno}: expected two non-negative integer ids, got {s!r}") from None
            src.append(a)
            dst.append(b)
    raw = np.array([src, dst], dtype=np.int64).T.reshape(-1, 2)
    node_ids, inverse = np.unique(raw, return_inverse=True)
    pairs = inverse.reshape(-1, 2)

    attributes = labels = None
    if attribute_source is not None:
        index = {int(k): i for i, k in enumerate(node_ids)}
        attr_map = read_attribute_file(attribute_source)
        for node in attr_map:
            if node not in index:
                raise GraphFormatError(f"attribute for unknown node {node}")
        attributes, labels = _encode_categories(attr_map, index, len(node_ids))
    return _from_dense(pairs, len(node_ids), node_ids, attributes, labels)


def read_attribute_file(source) -> dict[int, str]:
    with _open_text(source) as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"node_id", "attribute"} <= set(reader.fieldnames):
            raise GraphFormatError("attribute file needs header node_id,attribute")
        out = {}
        for lineno, row in enumerate(reader, 2):
            try:
                out[int(row["node_id"])] = row["attribute"].strip()
            except (TypeError, ValueError):
                raise GraphFormatError(f"attribute line {lineno}: bad node id {row['node_id']!r}") from None
        return out


def write_edge_list(g: Graph, dest) -> None:
    """Write ``g`` as an edge list using original node ids."""
    with _open_text(dest, "w") as fh:
        fh.write(f"# N={g.N} E={g.num_edges}\n")
        for a, b in g.edges():
            fh.write(f"{g.node_ids[a]}\t{g.node_ids[b]}\n")


class _open_text:
    def __init__(self, src, mode="r"):
        self.src, self.mode, self.fh, self.own = src, mode, None, False

    def __enter__(self):
        if isinstance(self.src, (str, os.PathLike)):
            path = os.fspath(self.src)
            if path.endswith(".gz"):
                import gzip
                self.fh = gzip.open(path, self.mode + "t")
            else:
                self.fh = open(path, self.mode, newline="" if "w" in self.mode else None)
            self.own = True
        elif isinstance(self.src, (list, tuple)):
            self.fh = io.StringIO("\n".join(self.src))
        else:
            self.fh = self.src
        return self.fh

    def __exit__(self, *exc):
        if self.own:
            self.fh.close()


@dataclass(frozen=True)
class Egonet:
    """One sampled ego with its neighborhood.

    Members are referred to by :attr:`ego` and :attr:`neighbors`; when
    ``labeled`` is false those are local handles (``0`` for the ego,
    ``1..deg`` for neighbors) that mean nothing outside this egonet, while
    :attr:`ego_id` still carries the global identity used for inclusion
    probabilities. ``attrs`` maps member handles to categories ``1..p``.
    """

    ego_id: Hashable
    neighbors: tuple
    edges: tuple
    labeled: bool = True
    attrs: Mapping | None = None

    def __post_init__(self):
        if len(set(self.neighbors)) != len(self.neighbors):
            raise ValueError(f"egonet {self.ego_id!r}: repeated neighbor")
        if self.ego in set(self.neighbors):
            raise ValueError(f"egonet {self.ego_id!r}: ego listed as its own neighbor")
        # canonical edge tuple: ego edges included, each pair ordered, sorted
        edges = self.edge_set()
        try:
            canon = tuple(sorted(edges))
        except TypeError:
            canon = tuple(sorted(edges, key=str))
        object.__setattr__(self, "edges", canon)
        object.__setattr__(self, "_canonical", True)

    @property
    def ego(self):
        return self.ego_id if self.labeled else 0

    @property
    def members(self) -> tuple:
        return (self.ego,) + tuple(self.neighbors)

    @property
    def degree(self) -> int:
        return len(self.neighbors)

    def adjacency(self) -> dict:
        """Member adjacency, with the ego joined to every neighbor."""
        adj = {m: set() for m in self.members}
        for a, b in self.edges:
            if a == b:
                continue
            if a not in adj or b not in adj:
                raise ValueError(f"egonet {self.ego_id!r}: edge ({a!r}, {b!r}) leaves the egonet")
            adj[a].add(b)
            adj[b].add(a)
        ego = self.ego
        for v in self.neighbors:
            adj[ego].add(v)
            adj[v].add(ego)
        return adj

    def edge_set(self) -> set[tuple]:
        """Undirected induced edges (ego edges included) as ordered pairs."""
        if "_canonical" in self.__dict__:
            return set(self.edges)
        out = {_pair(self.ego, v) for v in self.neighbors}
        out.update(_pair(a, b) for a, b in self.edges if a != b)
        return out


def _pair(a, b):
    try:
        return (a, b) if a <= b else (b, a)
    except TypeError:
        return (a, b) if str(a) <= str(b) else (b, a)


def extract_egonet(g: Graph, ego: int, labeled: bool = True) -> Egonet:
    """Induced subgraph of ``g`` on ``ego`` and its neighbors (dense ids)."""
    if not 0 <= ego < g.N:
        raise IndexError(f"ego {ego} outside 0..{g.N - 1}")
    nbrs = g.neighbors(ego).tolist()
    sets = g.adjacency_sets()
    inside = set(nbrs)
    edges = [(ego, v) for v in nbrs]
    for a in nbrs:
        for b in sets[a] & inside:
            if a < b:
                edges.append((a, b))
    attrs = None
    if g.attributes is not None:
        attrs = {v: int(g.attributes[v]) for v in [ego] + nbrs}
    if labeled:
        return Egonet(ego, tuple(nbrs), tuple(edges), True, attrs)
    local = {ego: 0}
    local.update((v, k) for k, v in enumerate(nbrs, 1))
    return Egonet(
        ego, tuple(range(1, len(nbrs) + 1)),
        tuple((local[a], local[b]) for a, b in edges), False,
        None if attrs is None else {local[v]: c for v, c in attrs.items()},
    )


@dataclass(frozen=True)
class EgonetSample:
    """Egonets of the ``n`` unique egos out of ``n_prime`` draws.

    ``multiplicity`` records how often each ego was drawn; it is needed for
    the Hansen-Hurwitz draw-probability approximation and defaults to one
    draw per unique ego.
    """

    n_prime: int
    egonets: tuple[Egonet, ...]
    design: object = None
    multiplicity: Mapping | None = None
    category_labels: Sequence[str] | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        ids = [e.ego_id for e in self.egonets]
        if len(set(ids)) != len(ids):
            raise ValueError("egonet sample repeats an ego id")
        if not self.egonets:
            raise ValueError("egonet sample is empty")
        if self.n > self.n_prime:
            raise ValueError(f"n={self.n} unique egos exceed n'={self.n_prime} draws")
        labels = {e.labeled for e in self.egonets}
        if len(labels) > 1:
            raise ValueError("sample mixes labeled and unlabeled egonets")
        if self.multiplicity is not None and sum(self.multiplicity.values()) != self.n_prime:
            raise ValueError("draw multiplicities do not sum to n'")

    @property
    def n(self) -> int:
        return len(self.egonets)

    @property
    def labeled(self) -> bool:
        return self.egonets[0].labeled

    @property
    def ego_ids(self) -> list:
        return [e.ego_id for e in self.egonets]

    def draws(self) -> list:
        """Observed draws with repetition, in ego order."""
        if self.multiplicity is None:
            return self.ego_ids if self.n == self.n_prime else None
        return [e for e in self.ego_ids for _ in range(self.multiplicity[e])]


def sample_from_draws(g: Graph, draws: Sequence[int], design=None, labeled: bool = True) -> EgonetSample:
    """Collapse a sequence of dense ego draws into an :class:`EgonetSample`."""
    counts: dict[int, int] = {}
    for v in draws:
        v = int(v)
        counts[v] = counts.get(v, 0) + 1
    egonets = tuple(extract_egonet(g, v, labeled) for v in counts)
    return EgonetSample(len(draws), egonets, design, counts, g.category_labels)
