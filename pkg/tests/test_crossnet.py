import csv
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from linkboot import build_graph
from linkboot import crossnet as cx
from linkboot import io
from linkboot.errors import BadBinDomain, DanglingMapping, NotDirected, NotUndirected


def net(edges, directed=True, extra=()):
    """Graph over string labels, in order of first appearance."""
    labels = []
    ix = {}
    for a in [x for e in edges for x in e] + list(extra):
        if a not in ix:
            ix[a] = len(labels)
            labels.append(a)
    return build_graph([(ix[a], ix[b]) for a, b in edges], directed=directed,
                       node_count=len(labels), labels=labels)


def ident(*names):
    return cx.AccountMapping({n: n for n in names})


def setup(target_edges, source_edges, connected, extra=()):
    t = net(target_edges, extra=extra)
    s = net(source_edges, directed=False, extra=connected)
    return t, s, cx.partition(t, s, ident(*connected))


def labelled(t, pairs):
    return {(t.label(u), t.label(v)) for u, v in pairs}


# -- mapping and partition ----------------------------------------------------------

def test_mapping_injective():
    with pytest.raises(ValueError):
        cx.AccountMapping({"a": "X", "b": "X"})
    with pytest.raises(ValueError):
        cx.AccountMapping.from_pairs([("a", "X"), ("a", "Y")])
    assert len(cx.AccountMapping.from_pairs([("a", "X"), ("a", "X")])) == 1


def test_empty_mapping_all_native():
    t = net([("a", "b"), ("b", "c")])
    s = net([("a", "b")], directed=False)
    p = cx.partition(t, s, cx.AccountMapping({}))
    assert p.copied_links == set() and len(p.native_links) == 2


def test_full_copy_no_native():
    s = net([("a", "b"), ("b", "c"), ("c", "a")], directed=False)
    t = net([("a", "b"), ("b", "a"), ("b", "c"), ("c", "b"), ("c", "a"), ("a", "c")])
    p = cx.partition(t, s, ident("a", "b", "c"))
    assert p.native_links == set() and len(p.copied_links) == 6


def test_toy_bootstrapping_layers():
    # upper layer: source natives N1, N6 plus friendships of the connected users
    source = net([("N1", "N2"), ("N2", "N4"), ("N3", "N4"), ("N4", "N5"), ("N3", "N5"),
                  ("N5", "N6"), ("N1", "N6")], directed=False)
    red = [("N2", "N4"), ("N4", "N3"), ("N5", "N4")]
    black = [("N2", "N8"), ("N3", "N9"), ("N9", "N5")]
    t = net(red + black)
    p = cx.partition(t, source, ident("N2", "N3", "N4", "N5"))
    assert labelled(t, p.copied_links) == set(red)
    assert labelled(t, p.native_links) == set(black)
    assert {t.label(u) for u in p.connected_nodes} == {"N2", "N3", "N4", "N5"}
    # N3-N5 is copiable but never copied
    copiable = {frozenset(e) for e in labelled(t, p.copiable_links)}
    assert copiable == {frozenset(e) for e in [("N2", "N4"), ("N3", "N4"), ("N4", "N5"), ("N3", "N5")]}
    native_nodes = {t.label(x) for e in p.native_links for x in e}
    assert native_nodes == {"N2", "N3", "N5", "N8", "N9"}


def test_partition_errors():
    t = net([("a", "b")])
    s = net([("a", "b")], directed=False)
    with pytest.raises(DanglingMapping):
        cx.partition(t, s, cx.AccountMapping({"a": "zz"}))
    with pytest.raises(NotDirected):
        cx.partition(s, s, ident("a"))
    with pytest.raises(NotUndirected):
        cx.partition(t, t, ident("a"))


def test_mapping_to_unseen_target_user_ignored():
    t = net([("a", "b")])
    s = net([("a", "b"), ("b", "q")], directed=False)
    p = cx.partition(t, s, cx.AccountMapping({"a": "a", "b": "b", "ghost": "q"}))
    assert len(p.copied_links) == 1


pair_lists = st.lists(st.tuples(st.integers(0, 9), st.integers(0, 9)), max_size=40)


@settings(max_examples=150, deadline=None)
@given(pair_lists, pair_lists, st.sets(st.integers(0, 9)))
def test_partition_invariants(t_edges, s_edges, conn):
    t = build_graph(t_edges, directed=True, node_count=10, labels=[str(i) for i in range(10)])
    s = build_graph(s_edges, directed=False, node_count=10, labels=[str(i) for i in range(10)])
    p = cx.partition(t, s, ident(*map(str, conn)))
    assert len(p.copied_links) + len(p.native_links) == t.edge_count
    assert not p.copied_links & p.native_links
    for u, v in p.copied_links:
        assert u in conn and v in conn and s.has_edge(u, v)
        assert (min(u, v), max(u, v)) in p.copiable_links
    for u in range(10):
        frac = cx.copied_fraction_of_reciprocated(p, t, u)
        assert frac is None or 0 <= frac <= 1
        cr = cx.copy_ratios(p, t, u).cr
        cat = cx.category(cr)
        assert (cr is None) == (cat == "undefined")
        if cr == 1:
            assert cat == "expat"
        if cr == 0:
            assert cat == "native"
        # the two readings of the friend set agree
        assert cx.reciprocity_ratios(p, t, u, "copiable") == cx.reciprocity_ratios(p, t, u, "copied")


# -- per-user ratios ------------------------------------------------------------------

def test_copy_ratio_example():
    # all = {b, c, d}; source friends {c, d, e}, of whom c and d are target neighbours
    t, s, p = setup([("u", "b"), ("c", "u"), ("u", "d"), ("e", "x")],
                    [("u", "c"), ("u", "d"), ("u", "e")], ["u", "c", "d", "e"])
    r = cx.copy_ratios(p, t, t.index("u"))
    assert r.cr == Fraction(2, 3)
    assert r.cr_ind == 1 and r.cr_out == Fraction(1, 2)


def test_copy_ratio_extremes():
    t, s, p = setup([("u", "a"), ("b", "u"), ("u", "z"), ("z", "y")],
                    [("u", "a"), ("u", "b")], ["u", "a", "b"])
    assert cx.copy_ratios(p, t, t.index("u")).cr == Fraction(2, 3)
    assert cx.category(cx.copy_ratios(p, t, t.index("a")).cr) == "expat"
    assert cx.copy_ratios(p, t, t.index("z")).cr == 0
    assert cx.category(Fraction(0)) == "native"
    isolated = net([("a", "b")], extra=["c"])
    q = cx.partition(isolated, net([("a", "b")], directed=False), ident("a", "b"))
    assert cx.copy_ratios(q, isolated, isolated.index("c")) == (None, None, None)


def test_reciprocity_ratio_example():
    # fr = {a, b, c}, ind = {a, b, x}, out = {a, c, x}
    t, s, p = setup([("a", "u"), ("b", "u"), ("x", "u"), ("u", "a"), ("u", "c"), ("u", "x")],
                    [("u", "a"), ("u", "b"), ("u", "c")], ["u", "a", "b", "c", "x"])
    r = cx.reciprocity_ratios(p, t, t.index("u"))
    assert r.r_copied == Fraction(1, 3)
    assert r.r_native == 1


def test_reciprocity_ratio_edge_cases():
    t, s, p = setup([("a", "u"), ("u", "a"), ("x", "u")], [("u", "a")], ["u", "a"])
    assert cx.reciprocity_ratios(p, t, t.index("u")).r_copied == 1
    assert cx.reciprocity_ratios(p, t, t.index("x")).r_copied is None


def test_copied_fraction_of_reciprocated_examples():
    t, s, p = setup([("a", "u"), ("u", "a"), ("b", "u"), ("u", "b"), ("c", "u")],
                    [("u", "a")], ["u", "a", "b"])
    assert cx.copied_fraction_of_reciprocated(p, t, t.index("u")) == Fraction(1, 2)
    assert cx.copied_fraction_of_reciprocated(p, t, t.index("c")) is None
    assert cx.copied_fraction_of_reciprocated(p, t, t.index("a")) == 1


# -- interactions ------------------------------------------------------------------------

FIVE = [("a", "b"), ("b", "c"), ("c", "d"), ("d", "e"), ("e", "a")]


def test_interaction_subgraph_empty():
    t = net(FIVE)
    inet = cx.interaction_subgraph(t, cx.InteractionLog([]))
    assert inet.graph.edge_count == 0 and inet.graph.node_count == 5


def test_interaction_subgraph_single():
    t = net(FIVE)
    inet = cx.interaction_subgraph(t, cx.InteractionLog([("c", "d", "repin", 1)]))
    assert inet.graph.edge_count == 1 and inet.graph.has_edge(t.index("c"), t.index("d"))


def test_interaction_subgraph_five_edge_fixture():
    t = net(FIVE)
    log = cx.InteractionLog([("a", "b", "repin", 3), ("b", "c", "repin", 1), ("a", "b", "repin", 2),
                             ("d", "e", "like", 4), ("b", "a", "repin", 5)])
    inet = cx.interaction_subgraph(t, log)
    assert inet.graph.edge_count == 3
    assert labelled(t, zip(*inet.graph.edges())) == {("a", "b"), ("b", "c"), ("d", "e")}
    assert inet.nonsocial_events == 1 and inet.social_events == 4
    assert [e.timestamp for e in log.events] == sorted(e.timestamp for e in log.events)
    assert log.kinds() == ["like", "repin"]
    assert cx.interaction_subgraph(t, log, kind="like").graph.edge_count == 1


def test_interaction_fractions_extremes():
    t, s, p = setup([("a", "b"), ("b", "a"), ("b", "c"), ("c", "d")], [("a", "b")], ["a", "b"])
    full = cx.interaction_sampling_stats(t, p, t)
    none = cx.interaction_sampling_stats(t, p, build_graph([], directed=True, node_count=t.node_count))
    for u in range(t.node_count):
        for f in ("reciprocated", "unreciprocated", "copied", "native"):
            a, b = getattr(full[u], f), getattr(none[u], f)
            assert (a is None) == (b is None)
            if a is not None:
                assert a == 1 and b == 0
    assert full[t.index("a")].clustering_target is None


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.sampled_from("abcdef"), st.sampled_from("abcdef")), max_size=30),
       st.lists(st.tuples(st.sampled_from("abcdef"), st.sampled_from("abcdef")), max_size=10))
def test_interaction_fractions_monotone(events, more):
    t, s, p = setup([("a", "b"), ("b", "a"), ("b", "c"), ("c", "d"), ("d", "e"), ("e", "f"),
                     ("f", "a"), ("a", "c")], [("a", "b"), ("c", "d")], ["a", "b", "c", "d"])
    log1 = cx.InteractionLog([(x, y, "r", i) for i, (x, y) in enumerate(events)])
    log2 = cx.InteractionLog([(x, y, "r", i) for i, (x, y) in enumerate(events + more)])
    g1, g2 = cx.interaction_subgraph(t, log1).graph, cx.interaction_subgraph(t, log2).graph
    s1, s2 = cx.interaction_sampling_stats(t, p, g1), cx.interaction_sampling_stats(t, p, g2)
    src, dst = g1.edges()
    assert all(t.has_edge(u, v) for u, v in zip(src.tolist(), dst.tolist()))
    for u in s1:
        for f in ("reciprocated", "unreciprocated", "copied", "native"):
            a, b = getattr(s1[u], f), getattr(s2[u], f)
            if a is not None:
                assert b >= a


def test_social_ratio_fixture():
    t, s, p = setup([("u", "a"), ("u", "b"), ("u", "c")], [("u", "a"), ("u", "b")],
                    ["u", "a", "b"], extra=["z"])
    log = cx.InteractionLog([("u", "a", "repin", 1), ("u", "b", "repin", 2),
                             ("u", "c", "repin", 3), ("u", "z", "repin", 4)])
    r = cx.social_interaction_ratios(t, p, log)[t.index("u")]
    assert r.social_activity == Fraction(3, 4)
    assert r.fb_activity == Fraction(2, 3)
    assert r.social_influence is None
    recv = cx.social_interaction_ratios(t, p, log)[t.index("z")]
    assert recv.social_influence == 0 and recv.fb_influence is None


def test_social_ratio_all_followed():
    t = net([("u", "a"), ("u", "b")])
    p = cx.partition(t, net([("u", "a")], directed=False), ident("u", "a"))
    log = cx.InteractionLog([("u", "a", "like", 1), ("u", "b", "like", 2)])
    assert cx.social_interaction_ratios(t, p, log)[t.index("u")].social_activity == 1


# -- similarity and closeness ------------------------------------------------------------

def test_jaccard_examples():
    assert cx.jaccard_similarity({"x", "y"}, {"y", "x"}) == 1
    assert cx.jaccard_similarity({"x"}, {"y"}) == 0
    assert cx.jaccard_similarity({"food", "art", "travel"}, {"art", "travel", "diy", "humor"}) == Fraction(2, 5)
    assert cx.jaccard_similarity(set(), set()) is None


@settings(max_examples=200, deadline=None)
@given(st.sets(st.integers(0, 8)), st.sets(st.integers(0, 8)))
def test_jaccard_properties(a, b):
    j = cx.jaccard_similarity(a, b)
    assert j == cx.jaccard_similarity(b, a)
    if a or b:
        assert (j == 1) == (a == b)


EIGHT_TARGET = [("a", "b"), ("b", "a"), ("c", "d"),                # copied
                ("a", "e"), ("f", "a"), ("c", "g"), ("h", "d")]    # native
EIGHT_SOURCE = [("a", "b"), ("c", "d"), ("a", "c"), ("b", "d")]    # a-c, b-d uncopied
EIGHT_CONN = ["a", "b", "c", "d"]


def test_similarity_point_masses():
    t, s, p = setup(EIGHT_TARGET, EIGHT_SOURCE, EIGHT_CONN)
    same = {x: {"music"} for x in "abcdefgh"}
    for vals in cx.similarity_by_link_class(p, t, same).values():
        assert vals and set(vals) == {1}
    apart = {x: {x} for x in "abcdefgh"}
    for vals in cx.similarity_by_link_class(p, t, apart).values():
        assert set(vals) == {0}


def test_similarity_planted_native_advantage():
    # native partners share two of three interests, copied partners one of three
    t, s, p = setup(EIGHT_TARGET, EIGHT_SOURCE, EIGHT_CONN)
    interests = {"a": {"x", "y"}, "b": {"y", "z"}, "c": {"p", "q"}, "d": {"q", "r"},
                 "e": {"x", "y", "w"}, "f": {"x", "y", "v"}, "g": {"p", "q", "s"}, "h": {"q", "r", "t"}}
    sim = cx.similarity_by_link_class(p, t, interests)
    assert sorted(sim["copied"]) == [Fraction(1, 3)] * 2
    assert sorted(sim["native"]) == [Fraction(2, 3)] * 4
    assert sorted(sim["uncopied"]) == [0, 0]
    mean = {k: sum(v) / len(v) for k, v in sim.items()}
    assert mean["native"] > mean["copied"]


def test_closeness_by_class():
    # m is a source-only friend shared by a and c
    t, s, p = setup(EIGHT_TARGET, EIGHT_SOURCE + [("a", "m"), ("c", "m")], EIGHT_CONN)
    clo = cx.closeness_by_link_class(p, s)
    # a: {b, c, m}, b: {a, d}, c: {a, d, m}, d: {b, c}
    assert sorted(clo["copied"]) == [0, 0]
    assert sorted(clo["uncopied"]) == [0, Fraction(1, 5)]
    assert cx.user_closeness(p, s, t.index("a")) == (0, Fraction(1, 5))


# -- friends of friends --------------------------------------------------------------------

def test_fof_chain():
    t, s, p = setup([("u", "c"), ("v", "u"), ("v", "c")], [("u", "c")], ["u", "c"])
    assert cx.fof_native_follow_stats(p, t)[t.index("u")] == (1, 1)


def test_fof_unrelated_follower_excluded():
    t, s, p = setup([("u", "c"), ("v", "u"), ("w", "u"), ("w", "c")], [("u", "c")], ["u", "c"])
    assert cx.fof_native_follow_stats(p, t)[t.index("u")] == (1, 1)


def test_fof_without_copied_links():
    t, s, p = setup([("u", "c"), ("v", "u"), ("v", "c")], [], ["u", "c"])
    assert cx.fof_native_follow_stats(p, t)[t.index("u")] == (0, 0)


# -- binning and cdfs ----------------------------------------------------------------------

def test_binned_constant():
    rows = cx.binned_series(list(range(1, 101)), [3.0] * 100, cx.BinSpec("log", 5))
    assert all(r.mean_y == 3.0 and r.stderr == 0 for r in rows)
    assert sum(r.count for r in rows) == 100


def test_binned_single_bin():
    rows = cx.binned_series([1, 2, 3, 4], [1.0, 2.0, None, 9.0], cx.BinSpec("linear", 1))
    assert len(rows) == 1 and rows[0].mean_y == 4.0 and rows[0].count == 3


def test_binned_line():
    x = np.linspace(1, 100, 100)
    rows = cx.binned_series(x, 2 * x, cx.BinSpec("linear", 10))
    for r in rows:
        assert abs(r.mean_y - 2 * r.bin_center) <= max(r.stderr, 1e-9)


def test_binned_log_domain():
    with pytest.raises(BadBinDomain):
        cx.binned_series([0, 1, 2], [1, 1, 1], cx.BinSpec("log"))


def test_binned_empty_bins_omitted():
    rows = cx.binned_series([1, 1, 100], [1, 1, 5], cx.BinSpec("linear", 10))
    assert [r.count for r in rows] == [2, 1]


def test_cdf_points():
    assert cx.cdf_points([Fraction(1, 2), None, 0, Fraction(1, 2), 1]) == [(0, 0.25), (0.5, 0.75), (1.0, 1.0)]


def test_friend_requests():
    edges = cx.directed_from_friend_requests([("a", "b", "accepted"), ("c", "a", "pending")])
    assert edges == [("a", "b"), ("b", "a"), ("c", "a")]


def test_copied_network_keeps_isolated_connected():
    t, s, p = setup([("a", "b"), ("c", "z")], [("a", "b")], ["a", "b", "c"])
    g = cx.copied_network(t, p)
    assert g.node_count == 3 and g.edge_count == 1


# -- canonical ten-user fixture ------------------------------------------------------------

def _exact(cell):
    if cell == "":
        return None
    return int(cell) if cell.isdigit() else Fraction(cell)


@pytest.fixture
def canonical(canonical_dir):
    t = io.read_edge_list(canonical_dir / "target.tsv")
    s = io.read_edge_list(canonical_dir / "source.tsv", directed=False)
    p = cx.partition(t, s, io.read_mapping(canonical_dir / "mapping.tsv"))
    log = io.read_interactions(canonical_dir / "interactions.tsv")
    return t, s, p, log


def test_canonical_user_metrics(canonical, canonical_dir):
    t, s, p, log = canonical
    recs = cx.user_metrics(t, p, log)
    inter = cx.interaction_sampling_stats(t, p, cx.interaction_subgraph(t, log).graph)
    with open(canonical_dir / "oracle_users.csv") as fh:
        oracle = list(csv.DictReader(fh))
    assert len(oracle) == t.node_count
    for row in oracle:
        u = t.index(row["node"])
        r, i = recs[u], inter[u]
        got = {
            "category": r.category, "cr": r.cr, "cr_ind": r.cr_ind, "cr_out": r.cr_out,
            "r_copied": r.r_copied, "r_native": r.r_native,
            "copied_fraction_of_reciprocated": r.copied_fraction_of_reciprocated,
            "copied_friend_count": r.copied_friend_count,
            "native_fof_follower_count": r.native_fof_follower_count,
            "social_activity": r.social_repin_ratio_activity,
            "social_influence": r.social_repin_ratio_influence,
            "fb_activity": r.fb_repin_ratio_activity, "fb_influence": r.fb_repin_ratio_influence,
            "int_reciprocated": i.reciprocated, "int_unreciprocated": i.unreciprocated,
            "int_copied": i.copied, "int_native": i.native,
        }
        for col, value in got.items():
            want = row[col] if col == "category" else _exact(row[col])
            assert value == want, (row["node"], col)


def test_canonical_pairs(canonical, canonical_dir):
    t, s, p, _ = canonical
    sim = cx.similarity_by_link_class(p, t, io.read_interests(canonical_dir / "interests.tsv"))
    clo = cx.closeness_by_link_class(p, s)
    with open(canonical_dir / "oracle_pairs.csv") as fh:
        oracle = list(csv.DictReader(fh))
    for measure, got in (("similarity", sim), ("closeness", clo)):
        for cls, vals in got.items():
            want = sorted(Fraction(r["value"]) for r in oracle
                          if r["measure"] == measure and r["link_class"] == cls)
            assert sorted(vals) == want, (measure, cls)


def test_canonical_counts(canonical):
    t, s, p, log = canonical
    assert p.counts() == {"connected_nodes": 6, "target_links": 18, "copied_links": 7,
                          "native_links": 11, "copiable_links": 7}
    inet = cx.interaction_subgraph(t, log)
    assert (inet.graph.edge_count, inet.social_events, inet.nonsocial_events) == (7, 8, 3)
