"""
Link bootstrapping sampling of an undirected source network.

A node joins the sample ``S`` with probability ``p1``; every sampled node then
keeps each link towards another sampled neighbour with probability ``p2``,
independently per direction. Seen from a sampled node, each incident source
edge survives as an out-edge with probability ``p1 * p2``.

Randomness discipline: one uniform per node and one per directed candidate
``(i -> j)`` over all source edges, drawn in a fixed order from the seed.
Comparing the same uniforms against different ``p1``/``p2`` values couples a
sweep, so raising either rate never removes a copied edge.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import BadProbability, NoTriples, NotUndirected
from .graph import (
    Graph,
    build_graph,
    connected_components,
    degree_stats,
    global_clustering,
    reciprocity,
)

SWEEP_COLUMNS = (
    "p1", "p2", "p_e", "replica", "gcc_weak_frac", "gcc_strong_frac", "reciprocity",
    "clustering_mean_local", "clustering_transitivity", "mean_k", "mean_k2",
)
METRIC_COLUMNS = SWEEP_COLUMNS[4:]


def _check_prob(name, p):
    if not 0.0 <= p <= 1.0:
        raise BadProbability(f"{name}={p} outside [0, 1]")


@dataclass(frozen=True)
class LbsParams:
    p1: float
    p2: float
    seed: int | np.random.SeedSequence = 0

    def __post_init__(self):
        _check_prob("p1", self.p1)
        _check_prob("p2", self.p2)

    @property
    def p_e(self) -> float:
        return self.p1 * self.p2


@dataclass(frozen=True)
class CopiedNetwork:
    """
    Sampled node set and the directed copied graph over it.

    ``copied_graph`` node ``i`` is source node ``sampled_nodes[i]``; sampled
    nodes without copied links stay in the graph as isolated nodes.
    """

    sampled_nodes: np.ndarray
    copied_graph: Graph | None
    source_ref: str = ""

    @property
    def size(self) -> int:
        return len(self.sampled_nodes)

    def source_edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Copied edges expressed in source node indices."""
        if self.copied_graph is None:
            return np.empty(0, np.int64), np.empty(0, np.int64)
        src, dst = self.copied_graph.edges()
        return self.sampled_nodes[src], self.sampled_nodes[dst]


def directed_candidates(source: Graph) -> tuple[np.ndarray, np.ndarray]:
    """Every source edge in both directions, in CSR order of the source."""
    src = np.repeat(np.arange(source.node_count, dtype=np.int64), source.out_degree())
    return src, np.asarray(source.out_indices)


@dataclass
class _Draws:
    """Uniforms for one replica, shared across all sweep cells."""

    node_u: np.ndarray
    link_u: np.ndarray

    @classmethod
    def draw(cls, source: Graph, seed) -> "_Draws":
        rng = np.random.default_rng(seed)
        node_u = rng.random(source.node_count)
        link_u = rng.random(len(source.out_indices))
        return cls(node_u, link_u)


def _copy(source: Graph, node_prob, p2: float, draws: _Draws, source_ref: str = "") -> CopiedNetwork:
    sampled = draws.node_u < node_prob
    src, dst = directed_candidates(source)
    keep = sampled[src] & sampled[dst] & (draws.link_u < p2)
    nodes = np.flatnonzero(sampled)
    if len(nodes) == 0:
        return CopiedNetwork(nodes, None, source_ref)
    new_index = np.cumsum(sampled) - 1
    pairs = np.column_stack([new_index[src[keep]], new_index[dst[keep]]])
    labels = None if source.labels is None else [source.labels[i] for i in nodes]
    g = build_graph(pairs, directed=True, node_count=len(nodes), labels=labels)
    return CopiedNetwork(nodes, g, source_ref)


def _require_undirected(source: Graph):
    if source.directed:
        raise NotUndirected("the source network must be undirected")


def lbs_sample(source: Graph, params: LbsParams, source_ref: str = "") -> CopiedNetwork:
    """Draw one copied network with uniform node and link sampling rates."""
    _require_undirected(source)
    return _copy(source, params.p1, params.p2, _Draws.draw(source, params.seed), source_ref)


def degree_weighted_node_probs(source: Graph, base_p1: float) -> np.ndarray:
    """Per-node inclusion ``min(1, base_p1 * deg / mean_deg)``."""
    deg = source.out_degree().astype(np.float64)
    mean = deg.mean()
    if mean == 0:
        return np.full(source.node_count, min(1.0, base_p1))
    return np.minimum(1.0, base_p1 * deg / mean)


def lbs_sample_degree_weighted(source: Graph, base_p1: float, p2: float, seed=0,
                               source_ref: str = "") -> CopiedNetwork:
    """Like :func:`lbs_sample`, but nodes join in proportion to their degree."""
    _require_undirected(source)
    _check_prob("base_p1", base_p1)
    _check_prob("p2", p2)
    probs = degree_weighted_node_probs(source, base_p1)
    return _copy(source, probs, p2, _Draws.draw(source, seed), source_ref)


def replica_seed(seed: int, replica: int) -> np.random.SeedSequence:
    """Seed of one replica; every cell of a sweep reuses it (coupled draws)."""
    return np.random.SeedSequence([int(seed), int(replica)])


def _nan_on_empty(fn, *args, **kw):
    try:
        return fn(*args, **kw)
    except NoTriples:
        return math.nan


def measure_copied(copied: CopiedNetwork) -> dict:
    """GCC fractions over ``S``, reciprocity, clustering and out-degree moments."""
    g = copied.copied_graph
    if g is None:
        return {k: math.nan for k in METRIC_COLUMNS}
    ds = degree_stats(g)
    return {
        "gcc_weak_frac": connected_components(g, "weak").gcc_fraction_of_nodes,
        "gcc_strong_frac": connected_components(g, "strong").gcc_fraction_of_nodes,
        "reciprocity": reciprocity(g) if g.edge_count else math.nan,
        "clustering_mean_local": _nan_on_empty(global_clustering, g, "mean_local"),
        "clustering_transitivity": _nan_on_empty(global_clustering, g, "transitivity"),
        "mean_k": ds.mean_k,
        "mean_k2": ds.mean_k2,
    }


@dataclass(frozen=True)
class SweepRow:
    p1: float
    p2: float
    p_e: float
    replica: int
    gcc_weak_frac: float
    gcc_strong_frac: float
    reciprocity: float
    clustering_mean_local: float
    clustering_transitivity: float
    mean_k: float
    mean_k2: float


@dataclass(frozen=True)
class CellSummary:
    p1: float
    p2: float
    p_e: float
    replicas: int
    mean: dict
    stderr: dict


@dataclass
class SweepReport:
    rows: list = field(default_factory=list)
    seed: int = 0

    def cells(self) -> list[CellSummary]:
        """Per ``(p1, p2)`` means and standard errors, ignoring undefined values."""
        groups: dict = {}
        for r in self.rows:
            groups.setdefault((r.p1, r.p2), []).append(r)
        out = []
        for (p1, p2), rows in groups.items():
            mean, se = {}, {}
            for col in METRIC_COLUMNS:
                vals = np.array([getattr(r, col) for r in rows], dtype=float)
                vals = vals[~np.isnan(vals)]
                mean[col] = float(vals.mean()) if len(vals) else math.nan
                se[col] = float(vals.std(ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else math.nan
            out.append(CellSummary(p1, p2, p1 * p2, len(rows), mean, se))
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(SWEEP_COLUMNS)
        for r in self.rows:
            w.writerow([_fmt(v) for v in asdict(r).values()])
        return buf.getvalue()


def _fmt(v):
    if isinstance(v, float):
        return "nan" if math.isnan(v) else repr(v)
    return v


def lbs_sweep(source: Graph, p1_grid, p2_grid, replicas: int, seed: int = 0) -> SweepReport:
    """
    Measure copied networks over a ``p1 x p2`` grid.

    Replica ``r`` draws its uniforms once from ``replica_seed(seed, r)`` and
    all cells threshold the same draws, so a single cell can be reproduced on
    its own and cells are coupled across the grid.
    """
    _require_undirected(source)
    p1_grid, p2_grid = list(p1_grid), list(p2_grid)
    if not p1_grid or not p2_grid:
        raise ValueError("parameter grids must be non-empty")
    if replicas < 1:
        raise ValueError("replicas must be >= 1")
    for p in p1_grid:
        _check_prob("p1", p)
    for p in p2_grid:
        _check_prob("p2", p)
    report = SweepReport(seed=seed)
    rows = {}
    for r in range(replicas):
        draws = _Draws.draw(source, replica_seed(seed, r))
        for p1 in p1_grid:
            for p2 in p2_grid:
                m = measure_copied(_copy(source, p1, p2, draws))
                rows[(p1, p2, r)] = SweepRow(p1, p2, p1 * p2, r, **m)
    # cell-major order for output
    for p1 in p1_grid:
        for p2 in p2_grid:
            for r in range(replicas):
                report.rows.append(rows[(p1, p2, r)])
    return report
