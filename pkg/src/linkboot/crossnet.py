"""
Cross-network analytics over a (target, source, account mapping) triple.

A target link ``u -> v`` is *copied* when both endpoints are connected
(mapped to source accounts) and the two source accounts are adjacent in the
source network; every other target link is *native*. The same rule cannot
tell a friend-finder copy from a coincidental double link, and does not try.

Per-user ratios are returned as :class:`fractions.Fraction` so they can be
compared exactly; an empty denominator gives ``None`` (undefined), which is
never the same as zero.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Literal, Mapping, NamedTuple

import numpy as np

from .errors import BadBinDomain, DanglingMapping, NodeNotFound, NotDirected, NotUndirected
from .graph import Graph, build_graph, local_clustering_all

FriendSet = Literal["copiable", "copied"]


def _ratio(num: int, den: int) -> Fraction | None:
    return Fraction(num, den) if den else None


@dataclass(frozen=True)
class AccountMapping:
    """Target identifier -> source identifier for connected users (injective)."""

    pairs: Mapping

    def __post_init__(self):
        seen = {}
        for t, s in self.pairs.items():
            if s in seen:
                raise ValueError(f"source account {s!r} mapped from both {seen[s]!r} and {t!r}")
            seen[s] = t

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple]) -> "AccountMapping":
        d = {}
        for t, s in pairs:
            if t in d and d[t] != s:
                raise ValueError(f"target account {t!r} mapped twice")
            d[t] = s
        return cls(d)

    def __len__(self):
        return len(self.pairs)


@dataclass(frozen=True, eq=False)
class NetworkPartition:
    """
    Target edges split into copied and native links.

    Node indices are target-graph indices. ``copiable`` holds source edges
    between connected users, translated to target pairs ``(u, v)`` with
    ``u < v``.
    """

    connected: np.ndarray
    target_to_source: np.ndarray
    edge_src: np.ndarray
    edge_dst: np.ndarray
    is_copied: np.ndarray
    copiable_src: np.ndarray
    copiable_dst: np.ndarray
    _nbr_cache: dict = field(default_factory=dict, repr=False)

    @property
    def connected_nodes(self) -> set:
        return set(np.flatnonzero(self.connected).tolist())

    @property
    def copied_links(self) -> set:
        m = self.is_copied
        return set(zip(self.edge_src[m].tolist(), self.edge_dst[m].tolist()))

    @property
    def native_links(self) -> set:
        m = ~self.is_copied
        return set(zip(self.edge_src[m].tolist(), self.edge_dst[m].tolist()))

    @property
    def copiable_links(self) -> set:
        return set(zip(self.copiable_src.tolist(), self.copiable_dst.tolist()))

    def counts(self) -> dict:
        return {
            "connected_nodes": int(self.connected.sum()),
            "target_links": len(self.is_copied),
            "copied_links": int(self.is_copied.sum()),
            "native_links": int((~self.is_copied).sum()),
            "copiable_links": len(self.copiable_src),
        }

    def _adjacency(self, name):
        if name not in self._nbr_cache:
            adj = defaultdict(set)
            if name == "copiable":
                pairs = zip(self.copiable_src.tolist(), self.copiable_dst.tolist())
                for u, v in pairs:
                    adj[u].add(v)
                    adj[v].add(u)
            else:
                m = self.is_copied
                for u, v in zip(self.edge_src[m].tolist(), self.edge_dst[m].tolist()):
                    adj[u].add(v)
                    adj[v].add(u)
            self._nbr_cache[name] = adj
        return self._nbr_cache[name]

    def copied_neighbors(self, node: int) -> set:
        """Nodes joined to ``node`` by a copied link in either direction."""
        return self._adjacency("copied").get(node, set())

    def copiable_neighbors(self, node: int) -> set:
        """Connected users who are the node's friends in the source network."""
        return self._adjacency("copiable").get(node, set())

    def copied_out_neighbors(self, target: Graph, node: int) -> set:
        lo, hi = target.out_indptr[node], target.out_indptr[node + 1]
        return set(target.out_indices[lo:hi][self.is_copied[lo:hi]].tolist())

    def friend_set(self, node: int, which: FriendSet = "copiable") -> set:
        if which == "copiable":
            return self.copiable_neighbors(node)
        if which == "copied":
            return self.copied_neighbors(node)
        raise ValueError(f"unknown friend set {which!r}")


def partition(target: Graph, source: Graph, mapping: AccountMapping) -> NetworkPartition:
    """Classify every target link as copied or native."""
    if not target.directed:
        raise NotDirected("target must be directed; symmetrize undirected targets first")
    if source.directed:
        raise NotUndirected("source must be undirected")
    t2s = np.full(target.node_count, -1, dtype=np.int64)
    s2t = np.full(source.node_count, -1, dtype=np.int64)
    for t_label, s_label in mapping.pairs.items():
        try:
            s = source.index(s_label)
        except NodeNotFound:
            raise DanglingMapping(f"mapping refers to unknown source node {s_label!r}") from None
        try:
            t = target.index(t_label)
        except NodeNotFound:
            continue  # target user without any target links
        t2s[t] = s
        s2t[s] = t
    connected = t2s >= 0

    ns = np.int64(source.node_count)
    s_src, s_dst = source.edges()
    source_keys = s_src * ns + s_dst  # sorted, u < v

    src, dst = target.edges()
    a, b = t2s[src], t2s[dst]
    both = (a >= 0) & (b >= 0)
    keys = np.minimum(a, b) * ns + np.maximum(a, b)
    is_copied = both & np.isin(keys, source_keys)

    cmask = (s2t[s_src] >= 0) & (s2t[s_dst] >= 0)
    cu, cv = s2t[s_src[cmask]], s2t[s_dst[cmask]]
    return NetworkPartition(connected=connected, target_to_source=t2s,
                            edge_src=src, edge_dst=dst, is_copied=is_copied,
                            copiable_src=np.minimum(cu, cv), copiable_dst=np.maximum(cu, cv))


def _ind_out(target: Graph, node: int) -> tuple[set, set]:
    return set(target.in_neighbors(node).tolist()), set(target.out_neighbors(node).tolist())


class CopyRatios(NamedTuple):
    cr: Fraction | None
    cr_ind: Fraction | None
    cr_out: Fraction | None


def copy_ratios(part: NetworkPartition, target: Graph, node: int) -> CopyRatios:
    """Copy ratio over all neighbours, followers and followees."""
    ind, out = _ind_out(target, node)
    fr = part.copied_neighbors(node)
    every = ind | out
    return CopyRatios(_ratio(len(every & fr), len(every)),
                      _ratio(len(ind & fr), len(ind)),
                      _ratio(len(out & fr), len(out)))


def category(cr: Fraction | None) -> str:
    if cr is None:
        return "undefined"
    if cr == 0:
        return "native"
    if cr == 1:
        return "expat"
    return "binetworked"


class ReciprocityRatios(NamedTuple):
    r_copied: Fraction | None
    r_native: Fraction | None


def reciprocity_ratios(part: NetworkPartition, target: Graph, node: int,
                       friend_set: FriendSet = "copiable") -> ReciprocityRatios:
    """
    Share of reciprocated links among copied and among native neighbours.

    Both ``friend_set`` choices give identical results: a target neighbour is
    a source friend exactly when the link to it is copied.
    """
    ind, out = _ind_out(target, node)
    fr = part.friend_set(node, friend_set)
    ind_n, out_n = ind - fr, out - fr
    return ReciprocityRatios(
        _ratio(len(fr & ind & out), len(fr & (ind | out))),
        _ratio(len(ind_n & out_n), len(ind_n | out_n)),
    )


def copied_fraction_of_reciprocated(part: NetworkPartition, target: Graph, node: int) -> Fraction | None:
    ind, out = _ind_out(target, node)
    recip = ind & out
    return _ratio(len(recip & part.copied_neighbors(node)), len(recip))


class Event(NamedTuple):
    actor: object
    author: object
    kind: str
    timestamp: float


@dataclass(frozen=True)
class InteractionLog:
    """Actor -> author events (repins, likes, ...), kept sorted by timestamp."""

    events: tuple

    def __init__(self, events: Iterable):
        evs = [e if isinstance(e, Event) else Event(*e) for e in events]
        evs.sort(key=lambda e: e.timestamp)
        object.__setattr__(self, "events", tuple(evs))

    def __len__(self):
        return len(self.events)

    def of_kind(self, kind: str | None) -> "InteractionLog":
        if kind is None:
            return self
        return InteractionLog(e for e in self.events if e.kind == kind)

    def kinds(self) -> list:
        return sorted({e.kind for e in self.events})


def _resolve(target: Graph, label):
    try:
        return target.index(label)
    except NodeNotFound:
        return None


def _social_edge(target: Graph, event: Event):
    """``(actor, author)`` indices when the actor follows the author, else ``None``."""
    a, b = _resolve(target, event.actor), _resolve(target, event.author)
    if a is None or b is None or a == b or not target.has_edge(a, b):
        return None
    return a, b


@dataclass(frozen=True)
class InteractionNetwork:
    graph: Graph
    social_events: int
    nonsocial_events: int


def interaction_subgraph(target: Graph, log: InteractionLog, kind: str | None = None) -> InteractionNetwork:
    """Follow links carrying at least one event; off-graph events are counted apart."""
    pairs, nonsocial, social = set(), 0, 0
    for e in log.of_kind(kind).events:
        edge = _social_edge(target, e)
        if edge is None:
            nonsocial += 1
        else:
            social += 1
            pairs.add(edge)
    arr = np.array(sorted(pairs), dtype=np.int64).reshape(-1, 2)
    g = build_graph(arr, directed=True, node_count=target.node_count, labels=target.labels)
    return InteractionNetwork(g, social, nonsocial)


@dataclass(frozen=True)
class InteractionFractions:
    """Share of a user's follow links (``u -> v``) that carry interactions."""

    reciprocated: Fraction | None
    unreciprocated: Fraction | None
    copied: Fraction | None
    native: Fraction | None
    clustering_target: float | None
    clustering_interaction: float | None


def interaction_sampling_stats(target: Graph, part: NetworkPartition,
                               interaction_net: Graph) -> dict[int, InteractionFractions]:
    c_target = local_clustering_all(target)
    c_inter = local_clustering_all(interaction_net)
    out = {}
    for u in range(target.node_count):
        lo, hi = target.out_indptr[u], target.out_indptr[u + 1]
        follows = target.out_indices[lo:hi].tolist()
        copied_mask = part.is_copied[lo:hi].tolist()
        ind = set(target.in_neighbors(u).tolist())
        active = set(interaction_net.out_neighbors(u).tolist())
        tally = Counter()
        for v, is_copied in zip(follows, copied_mask):
            cls = ("rec" if v in ind else "unrec", "cop" if is_copied else "nat")
            hit = v in active
            for c in cls:
                tally[c, "all"] += 1
                tally[c, "hit"] += hit
        out[u] = InteractionFractions(
            *(_ratio(tally[c, "hit"], tally[c, "all"]) for c in ("rec", "unrec", "cop", "nat")),
            clustering_target=_nan_to_none(c_target[u]),
            clustering_interaction=_nan_to_none(c_inter[u]),
        )
    return out


def _nan_to_none(x):
    return None if math.isnan(x) else float(x)


@dataclass(frozen=True)
class SocialRatios:
    social_activity: Fraction | None
    social_influence: Fraction | None
    fb_activity: Fraction | None
    fb_influence: Fraction | None


def social_interaction_ratios(target: Graph, part: NetworkPartition, log: InteractionLog,
                              kind: str | None = None) -> dict[int, SocialRatios]:
    """
    Per-user social-interaction shares on the activity and influence side.

    An event is social when its actor follows its author. The copied share
    counts social events over copied follow links among all social events.
    """
    made, received = Counter(), Counter()
    s_made, s_recv = Counter(), Counter()
    c_made, c_recv = Counter(), Counter()
    copied = part.copied_links
    for e in log.of_kind(kind).events:
        a, b = _resolve(target, e.actor), _resolve(target, e.author)
        if a is not None:
            made[a] += 1
        if b is not None:
            received[b] += 1
        edge = _social_edge(target, e)
        if edge is None:
            continue
        s_made[a] += 1
        s_recv[b] += 1
        if edge in copied:
            c_made[a] += 1
            c_recv[b] += 1
    return {
        u: SocialRatios(_ratio(s_made[u], made[u]), _ratio(s_recv[u], received[u]),
                        _ratio(c_made[u], s_made[u]), _ratio(c_recv[u], s_recv[u]))
        for u in range(target.node_count)
    }


def activity_counts(target: Graph, log: InteractionLog) -> tuple[dict, dict]:
    """Events made and received per user, as ``{node: Counter(kind -> count)}``."""
    made, received = defaultdict(Counter), defaultdict(Counter)
    for e in log.events:
        a, b = _resolve(target, e.actor), _resolve(target, e.author)
        if a is not None:
            made[a][e.kind] += 1
        if b is not None:
            received[b][e.kind] += 1
    return made, received


def jaccard_similarity(set_a, set_b) -> Fraction | None:
    a, b = set(set_a), set(set_b)
    return _ratio(len(a & b), len(a | b))


LINK_CLASSES = ("copied", "uncopied", "native")


def link_class_pairs(part: NetworkPartition) -> dict[str, list]:
    """
    Unordered user pairs per link class.

    ``uncopied`` pairs are copiable (source friends, both connected) but carry
    no target link in either direction.
    """
    copied, native = set(), set()
    for u, v, c in zip(part.edge_src.tolist(), part.edge_dst.tolist(), part.is_copied.tolist()):
        (copied if c else native).add((min(u, v), max(u, v)))
    uncopied = part.copiable_links - copied
    return {"copied": sorted(copied), "uncopied": sorted(uncopied), "native": sorted(native)}


def similarity_by_link_class(part: NetworkPartition, target: Graph,
                             interests: Mapping) -> dict[str, list]:
    """
    Interest similarity of linked pairs, grouped by link class.

    ``interests`` maps target labels to label sets. Pairs where an endpoint
    has no entry, or where similarity is undefined, are skipped.
    """
    out = {}
    for cls, pairs in link_class_pairs(part).items():
        vals = []
        for u, v in pairs:
            a, b = interests.get(target.label(u)), interests.get(target.label(v))
            if a is None or b is None:
                continue
            s = jaccard_similarity(a, b)
            if s is not None:
                vals.append(s)
        out[cls] = vals
    return out


def closeness(part: NetworkPartition, source: Graph, u: int, v: int) -> Fraction | None:
    """Jaccard overlap of two connected users' source friend lists."""
    a, b = part.target_to_source[u], part.target_to_source[v]
    if a < 0 or b < 0:
        return None
    return jaccard_similarity(source.out_neighbors(a).tolist(), source.out_neighbors(b).tolist())


def closeness_by_link_class(part: NetworkPartition, source: Graph) -> dict[str, list]:
    """Closeness samples for copied and for uncopied source friendships."""
    pairs = link_class_pairs(part)
    out = {}
    for cls in ("copied", "uncopied"):
        vals = (closeness(part, source, u, v) for u, v in pairs[cls])
        out[cls] = [c for c in vals if c is not None]
    return out


def user_closeness(part: NetworkPartition, source: Graph, node: int) -> tuple:
    """Mean closeness of a user to copied friends and to uncopied source friends."""
    copied = part.copied_neighbors(node)
    uncopied = part.copiable_neighbors(node) - copied

    def mean(others):
        vals = [c for c in (closeness(part, source, node, v) for v in sorted(others)) if c is not None]
        return sum(vals, Fraction(0)) / len(vals) if vals else None

    return mean(copied), mean(uncopied)


def fof_native_follow_stats(part: NetworkPartition, target: Graph) -> dict[int, tuple[int, int]]:
    """
    ``(x, y)`` per user: copied followees, and native followers who are
    target-graph neighbours of at least one of those copied followees.
    """
    out = {}
    for u in range(target.node_count):
        cop = part.copied_out_neighbors(target, u)
        reach = set()
        for c in cop:
            reach.update(target.out_neighbors(c).tolist())
            reach.update(target.in_neighbors(c).tolist())
        y = 0
        for v in target.in_neighbors(u).tolist():
            # v -> u is native unless the pair is a source friendship
            if v in reach and v not in part.copied_neighbors(u):
                y += 1
        out[u] = (len(cop), y)
    return out


@dataclass(frozen=True)
class BinSpec:
    kind: Literal["log", "linear"] = "log"
    n_bins: int = 10
    lo: float | None = None
    hi: float | None = None


class BinRow(NamedTuple):
    bin_center: float
    mean_y: float
    stderr: float
    count: int


def binned_series(x_values, y_values, bins: BinSpec = BinSpec()) -> list[BinRow]:
    """
    Mean and standard error of ``y`` within bins of ``x``.

    Undefined ``y`` values (``None`` or ``nan``) are dropped, empty bins are
    omitted, and a single-sample bin reports ``nan`` standard error.
    """
    if len(x_values) != len(y_values):
        raise ValueError("x and y must have equal length")
    pairs = [(float(x), float(y)) for x, y in zip(x_values, y_values)
             if y is not None and not math.isnan(float(y))]
    if not pairs:
        return []
    x = np.array([p[0] for p in pairs])
    y = np.array([p[1] for p in pairs])
    lo = x.min() if bins.lo is None else bins.lo
    hi = x.max() if bins.hi is None else bins.hi
    if bins.kind == "log":
        if lo <= 0 or (x <= 0).any():
            raise BadBinDomain("log bins need strictly positive x values")
        edges = np.geomspace(lo, hi, bins.n_bins + 1) if hi > lo else np.array([lo, hi])
        centers = np.sqrt(edges[:-1] * edges[1:])
    elif bins.kind == "linear":
        edges = np.linspace(lo, hi, bins.n_bins + 1) if hi > lo else np.array([lo, hi])
        centers = (edges[:-1] + edges[1:]) / 2
    else:
        raise ValueError(f"unknown bin kind {bins.kind!r}")
    which = np.clip(np.searchsorted(edges, x, side="right") - 1, 0, len(edges) - 2)
    inside = (x >= edges[0]) & (x <= edges[-1])
    rows = []
    for b in range(len(edges) - 1):
        ys = y[(which == b) & inside]
        if len(ys) == 0:
            continue
        se = float(ys.std(ddof=1) / math.sqrt(len(ys))) if len(ys) > 1 else math.nan
        rows.append(BinRow(float(centers[b]), float(ys.mean()), se, len(ys)))
    return rows


def cdf_points(values) -> list[tuple[float, float]]:
    """``(value, cumulative fraction)`` steps of the empirical CDF, undefined values dropped."""
    vals = sorted(float(v) for v in values if v is not None and not math.isnan(float(v)))
    n = len(vals)
    out = []
    for i, v in enumerate(vals):
        if i + 1 < n and vals[i + 1] == v:
            continue
        out.append((v, (i + 1) / n))
    return out


def directed_from_friend_requests(requests: Iterable[tuple]) -> list[tuple]:
    """
    Follow edges implied by friend requests ``(initiator, responder, outcome)``.

    The request itself is a follow; an ``accepted`` outcome adds the reverse
    link.
    """
    edges = []
    for initiator, responder, outcome in requests:
        edges.append((initiator, responder))
        if str(outcome).strip().lower() == "accepted":
            edges.append((responder, initiator))
    return edges


@dataclass
class UserMetrics:
    node: object
    cr: Fraction | None = None
    cr_ind: Fraction | None = None
    cr_out: Fraction | None = None
    r_copied: Fraction | None = None
    r_native: Fraction | None = None
    copied_fraction_of_reciprocated: Fraction | None = None
    category: str = "undefined"
    activity: dict = field(default_factory=dict)
    influence: dict = field(default_factory=dict)
    social_repin_ratio_activity: Fraction | None = None
    social_repin_ratio_influence: Fraction | None = None
    fb_repin_ratio_activity: Fraction | None = None
    fb_repin_ratio_influence: Fraction | None = None
    copied_friend_count: int = 0
    native_fof_follower_count: int = 0


def user_metrics(target: Graph, part: NetworkPartition, log: InteractionLog | None = None,
                 social_kind: str | None = None) -> list[UserMetrics]:
    """Every per-user measure, one record per target node in index order."""
    fof = fof_native_follow_stats(part, target)
    if log is not None:
        social = social_interaction_ratios(target, part, log, kind=social_kind)
        made, received = activity_counts(target, log)
    records = []
    for u in range(target.node_count):
        cr = copy_ratios(part, target, u)
        rr = reciprocity_ratios(part, target, u)
        m = UserMetrics(node=target.label(u), cr=cr.cr, cr_ind=cr.cr_ind, cr_out=cr.cr_out,
                        r_copied=rr.r_copied, r_native=rr.r_native,
                        copied_fraction_of_reciprocated=copied_fraction_of_reciprocated(part, target, u),
                        category=category(cr.cr),
                        copied_friend_count=fof[u][0], native_fof_follower_count=fof[u][1])
        if log is not None:
            s = social[u]
            m.social_repin_ratio_activity = s.social_activity
            m.social_repin_ratio_influence = s.social_influence
            m.fb_repin_ratio_activity = s.fb_activity
            m.fb_repin_ratio_influence = s.fb_influence
            m.activity = dict(made.get(u, {}))
            m.influence = dict(received.get(u, {}))
        records.append(m)
    return records


def link_subgraph(target: Graph, part: NetworkPartition, copied: bool = True) -> Graph:
    """Copied (or native) links only, over the full target node set."""
    m = part.is_copied if copied else ~part.is_copied
    pairs = np.column_stack([part.edge_src[m], part.edge_dst[m]])
    return build_graph(pairs, directed=True, node_count=target.node_count, labels=target.labels)


def copied_network(target: Graph, part: NetworkPartition) -> Graph:
    """Copied links over the connected users only, isolated connected users included."""
    nodes = np.flatnonzero(part.connected)
    if len(nodes) == 0:
        raise NodeNotFound("no connected users")
    new_index = np.full(target.node_count, -1, dtype=np.int64)
    new_index[nodes] = np.arange(len(nodes))
    m = part.is_copied
    pairs = np.column_stack([new_index[part.edge_src[m]], new_index[part.edge_dst[m]]])
    labels = None if target.labels is None else [target.labels[i] for i in nodes]
    return build_graph(pairs, directed=True, node_count=len(nodes), labels=labels)
