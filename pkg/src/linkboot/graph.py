"""
Immutable CSR graph and the structural measurements built on it.

Nodes are dense integers ``0 .. node_count - 1``. When a graph is read from
labelled input the original identifiers are kept in ``Graph.labels`` so
reports can translate back.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, NamedTuple, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

from .errors import (
    EmptyGraph,
    KindMismatch,
    NodeNotFound,
    NoEdges,
    NotDirected,
    NoTriples,
)

ClusteringMode = Literal["mean_local", "transitivity"]
ComponentKind = Literal["weak", "strong", "undirected"]
DirectedConvention = Literal["fagiolo", "projection"]


class IngestReport(NamedTuple):
    duplicates: int
    self_loops: int


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


def _csr_from_sorted_keys(keys: np.ndarray, n: int):
    """CSR arrays from sorted ``row * n + col`` keys."""
    rows, cols = np.divmod(keys, np.int64(n))
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
    return indptr, cols


class Graph:
    """
    Simple graph (no self-loops, no multi-edges) in compressed sparse row form.

    Do not call the constructor directly; use :func:`build_graph`, which
    enforces the invariants. Arrays are marked read-only.
    """

    __slots__ = (
        "node_count",
        "directed",
        "out_indptr",
        "out_indices",
        "in_indptr",
        "in_indices",
        "labels",
        "ingest_report",
        "_label_index",
    )

    def __init__(self, node_count, directed, out_indptr, out_indices,
                 in_indptr, in_indices, labels=None, ingest_report=None):
        self.node_count = int(node_count)
        self.directed = bool(directed)
        self.out_indptr = _frozen(out_indptr)
        self.out_indices = _frozen(out_indices)
        self.in_indptr = _frozen(in_indptr)
        self.in_indices = _frozen(in_indices)
        self.labels = labels
        self.ingest_report = ingest_report or IngestReport(0, 0)
        self._label_index = None

    def __repr__(self):
        kind = "directed" if self.directed else "undirected"
        return f"Graph({kind}, nodes={self.node_count}, edges={self.edge_count})"

    @property
    def edge_count(self) -> int:
        nnz = len(self.out_indices)
        return nnz if self.directed else nnz // 2

    def out_degree(self) -> np.ndarray:
        return np.diff(self.out_indptr)

    def in_degree(self) -> np.ndarray:
        return np.diff(self.in_indptr)

    def degree(self) -> np.ndarray:
        """Undirected degree; for directed graphs, degree in the projection."""
        if not self.directed:
            return self.out_degree()
        return np.diff(self.projected().out_indptr)

    def out_neighbors(self, node: int) -> np.ndarray:
        self._check(node)
        return self.out_indices[self.out_indptr[node]:self.out_indptr[node + 1]]

    def in_neighbors(self, node: int) -> np.ndarray:
        self._check(node)
        return self.in_indices[self.in_indptr[node]:self.in_indptr[node + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        nbrs = self.out_neighbors(u)
        i = np.searchsorted(nbrs, v)
        return bool(i < len(nbrs) and nbrs[i] == v)

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Edge endpoint arrays; undirected edges are listed once with u < v."""
        src = np.repeat(np.arange(self.node_count, dtype=np.int64), self.out_degree())
        dst = self.out_indices
        if not self.directed:
            keep = src < dst
            return src[keep], dst[keep]
        return src, np.asarray(dst)

    def label(self, node: int):
        self._check(node)
        return node if self.labels is None else self.labels[node]

    def index(self, label) -> int:
        """Dense index of an original node identifier."""
        if self.labels is None:
            try:
                node = int(label)
            except (TypeError, ValueError):
                raise NodeNotFound(label) from None
            self._check(node)
            return node
        if self._label_index is None:
            self._label_index = {lab: i for i, lab in enumerate(self.labels)}
        try:
            return self._label_index[label]
        except KeyError:
            raise NodeNotFound(label) from None

    def adjacency(self) -> sp.csr_matrix:
        """Binary adjacency matrix, ``A[i, j] = 1`` for each edge ``i -> j``."""
        n = self.node_count
        data = np.ones(len(self.out_indices), dtype=np.float64)
        return sp.csr_matrix((data, self.out_indices, self.out_indptr), shape=(n, n))

    def projected(self) -> "Graph":
        """Undirected projection: ``{u, v}`` present if either direction exists."""
        if not self.directed:
            return self
        src, dst = self.edges()
        return build_graph(np.column_stack([src, dst]), directed=False,
                           node_count=self.node_count, labels=self.labels)

    def symmetrized(self) -> "Graph":
        """Directed graph carrying every edge in both directions."""
        src, dst = self.edges()
        pairs = np.concatenate([np.column_stack([src, dst]), np.column_stack([dst, src])])
        return build_graph(pairs, directed=True, node_count=self.node_count,
                           labels=self.labels)

    def _check(self, node):
        if not (0 <= int(node) < self.node_count):
            raise NodeNotFound(node)


def build_graph(edges, directed: bool, node_count: int | None = None,
                labels: Sequence | None = None) -> Graph:
    """
    Build a simple graph from an edge list.

    Parameters
    ----------
    edges : sequence of (int, int) or array of shape (m, 2)
        Endpoints as dense integer node indices.
    directed : bool
    node_count : int, optional
        Defaults to ``max(index) + 1``. Larger values add isolated nodes.
    labels : sequence, optional
        Original identifiers, one per node index.

    Duplicates and self-loops are dropped; the counts are kept in
    ``Graph.ingest_report``.
    """
    arr = np.asarray(edges, dtype=np.int64)
    if arr.size == 0:
        arr = arr.reshape(0, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("edges must have shape (m, 2)")
    if node_count is None:
        node_count = int(arr.max()) + 1 if len(arr) else 0
    if node_count == 0:
        raise EmptyGraph("no edges and no declared nodes")
    if len(arr) and (arr.min() < 0 or arr.max() >= node_count):
        raise NodeNotFound("edge endpoint outside [0, node_count)")
    if labels is not None and len(labels) != node_count:
        raise ValueError("labels must have one entry per node")

    src, dst = arr[:, 0], arr[:, 1]
    loops = src == dst
    n_loops = int(loops.sum())
    if n_loops:
        src, dst = src[~loops], dst[~loops]
    if not directed:
        src, dst = np.minimum(src, dst), np.maximum(src, dst)
    n64 = np.int64(node_count)
    keys = np.unique(src * n64 + dst)
    n_dups = len(src) - len(keys)
    src, dst = np.divmod(keys, n64)
    if directed:
        out_indptr, out_indices = _csr_from_sorted_keys(keys, node_count)
        del keys
        in_indptr, in_indices = _csr_from_sorted_keys(np.sort(dst * n64 + src), node_count)
    else:
        both = np.concatenate([keys, dst * n64 + src])
        del keys
        both.sort()
        out_indptr, out_indices = _csr_from_sorted_keys(both, node_count)
        in_indptr, in_indices = out_indptr, out_indices
    return Graph(node_count, directed, out_indptr, out_indices, in_indptr, in_indices,
                 labels=labels, ingest_report=IngestReport(n_dups, n_loops))


@dataclass(frozen=True)
class DegreeStats:
    """
    Empirical degree distributions over all nodes.

    ``in_pmf[k]`` and ``out_pmf[k]`` are probabilities indexed by degree;
    ``joint_pmf`` maps ``(in_degree, out_degree)`` to probability. For
    undirected graphs all three describe the same degree.
    """

    in_pmf: np.ndarray
    out_pmf: np.ndarray
    joint_pmf: dict
    mean_k: float
    mean_k2: float
    mean_jk: float
    node_count: int = 0


def degree_stats(g: Graph) -> DegreeStats:
    if g.node_count == 0:
        raise EmptyGraph("degree_stats of an empty graph")
    n = g.node_count
    kout = g.out_degree()
    kin = g.in_degree()
    out_pmf = np.bincount(kout) / n
    in_pmf = np.bincount(kin) / n
    width = int(kout.max()) + 1
    codes, counts = np.unique(kin * width + kout, return_counts=True)
    joint = {(int(c // width), int(c % width)): int(m) / n for c, m in zip(codes, counts)}
    # exact integer sums before the single division
    sum_k = int(kout.sum())
    sum_k2 = int(np.dot(kout, kout))
    sum_jk = int(np.dot(kin, kout))
    return DegreeStats(in_pmf=in_pmf, out_pmf=out_pmf, joint_pmf=joint,
                       mean_k=sum_k / n, mean_k2=sum_k2 / n, mean_jk=sum_jk / n,
                       node_count=n)


def reciprocity(g: Graph) -> float:
    """Fraction of directed edges whose reverse edge is also present."""
    if not g.directed:
        raise NotDirected("reciprocity needs a directed graph")
    m = g.edge_count
    if m == 0:
        raise NoEdges("reciprocity of an edgeless graph")
    src, dst = g.edges()
    n = np.int64(g.node_count)
    fwd = src * n + dst  # sorted, since edges come out in CSR order
    rev = dst * n + src
    return int(np.isin(rev, fwd, assume_unique=True).sum()) / m


def _clustering_parts(g: Graph, directed_convention: DirectedConvention = "fagiolo"):
    """
    Per-node closed-walk counts and their normalizers.

    Returns ``(triangles, triples)`` such that local clustering is
    ``triangles / triples`` where ``triples > 0``. On undirected graphs these
    are the usual triangle and connected-triple counts. On directed graphs the
    Fagiolo generalization counts every directed triangle through a node
    against all pairs of directed incident edges; ``projection`` instead
    measures the undirected projection.
    """
    if g.directed and directed_convention == "projection":
        g = g.projected()
    if not g.directed:
        a = g.adjacency()
        tri = np.asarray((a @ a).multiply(a).sum(axis=1)).ravel() / 2.0
        d = g.out_degree().astype(np.float64)
        return tri, d * (d - 1) / 2.0
    a = g.adjacency()
    s = (a + a.T).tocsr()
    walks = np.asarray((s @ s).multiply(s).sum(axis=1)).ravel() / 2.0
    d_tot = (g.out_degree() + g.in_degree()).astype(np.float64)
    d_bi = np.asarray(a.multiply(a.T).sum(axis=1)).ravel()
    return walks, d_tot * (d_tot - 1) - 2.0 * d_bi


def local_clustering_all(g: Graph, directed_convention: DirectedConvention = "fagiolo") -> np.ndarray:
    """Local clustering of every node; ``nan`` where undefined (fewer than two neighbours)."""
    tri, triples = _clustering_parts(g, directed_convention)
    out = np.full(g.node_count, np.nan)
    ok = triples > 0
    out[ok] = tri[ok] / triples[ok]
    return out


def local_clustering(g: Graph, node: int,
                     directed_convention: DirectedConvention = "fagiolo") -> float | None:
    """
    Local clustering coefficient of one node, or ``None`` when undefined.

    Only the node's neighbourhood is examined, so this is cheap on large
    graphs.
    """
    g._check(node)
    if not g.directed or directed_convention == "projection":
        nbrs = np.union1d(g.out_neighbors(node), g.in_neighbors(node))
        d = len(nbrs)
        if d < 2:
            return None
        links = 0
        for v in nbrs:
            vn = np.union1d(g.out_neighbors(v), g.in_neighbors(v))
            links += len(np.intersect1d(vn, nbrs, assume_unique=True))
        return (links / 2) / (d * (d - 1) / 2)
    out_n = set(g.out_neighbors(node).tolist())
    in_n = set(g.in_neighbors(node).tolist())
    d_tot = len(out_n) + len(in_n)
    denom = d_tot * (d_tot - 1) - 2 * len(out_n & in_n)
    if denom <= 0:
        return None
    weight = {v: (v in out_n) + (v in in_n) for v in out_n | in_n}
    walks = 0
    for j, wj in weight.items():
        for k in set(g.out_neighbors(j).tolist()) & weight.keys():
            walks += wj * weight[k]
        for k in set(g.in_neighbors(j).tolist()) & weight.keys():
            walks += wj * weight[k]
    return (walks / 2) / denom


def global_clustering(g: Graph, mode: ClusteringMode = "mean_local",
                      directed_convention: DirectedConvention = "fagiolo") -> float:
    """
    Network clustering: average of defined local values, or transitivity.

    ``transitivity`` is ``3 * triangles / connected triples`` for undirected
    graphs and the ratio of summed directed-triangle counts to summed
    normalizers for directed ones.
    """
    tri, triples = _clustering_parts(g, directed_convention)
    ok = triples > 0
    if not ok.any():
        raise NoTriples("no node with two or more neighbours")
    if mode == "mean_local":
        return float(np.mean(tri[ok] / triples[ok]))
    if mode == "transitivity":
        return float(tri.sum() / triples.sum())
    raise ValueError(f"unknown clustering mode {mode!r}")


@dataclass(frozen=True)
class ComponentReport:
    component_sizes: list
    gcc_size: int
    gcc_fraction_of_nodes: float
    component_kind: str
    labels: np.ndarray = field(repr=False, compare=False, default=None)


def connected_components(g: Graph, kind: ComponentKind | None = None) -> ComponentReport:
    """
    Exact component decomposition.

    ``weak`` ignores edge direction, ``strong`` uses mutual reachability, and
    ``undirected`` applies to undirected graphs. ``labels`` maps each node to
    its component, numbered from largest to smallest.
    """
    if g.node_count == 0:
        raise EmptyGraph("components of an empty graph")
    if kind is None:
        kind = "weak" if g.directed else "undirected"
    if kind == "strong" and not g.directed:
        raise KindMismatch("strong components need a directed graph")
    if kind not in ("weak", "strong", "undirected"):
        raise ValueError(f"unknown component kind {kind!r}")
    if kind == "undirected" and g.directed:
        g = g.projected()
    connection = "strong" if kind == "strong" else "weak"
    _, comp = csgraph.connected_components(g.adjacency(), directed=g.directed,
                                           connection=connection)
    sizes = np.bincount(comp)
    order = np.argsort(-sizes, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    sizes = sizes[order]
    return ComponentReport(component_sizes=sizes.tolist(), gcc_size=int(sizes[0]),
                           gcc_fraction_of_nodes=float(sizes[0]) / g.node_count,
                           component_kind=kind, labels=rank[comp])
