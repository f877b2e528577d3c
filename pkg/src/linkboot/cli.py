"""
Command-line entry point: ``linkboot <subcommand> ...``.

Exit codes: 0 success, 2 usage error, 3 input parse error, 4 runtime error.
Every output file gets a ``<name>.meta.json`` sidecar recording the tool
version, the full configuration and the seed.
"""

from __future__ import annotations

import argparse
import csv
import logging
import math
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from . import crossnet as cx
from .errors import InputParseError, LinkbootError
from .generators import GeneratorSpec, generate, realized_summary
from .graph import (
    connected_components,
    degree_stats,
    global_clustering,
    local_clustering_all,
    reciprocity,
)
from .io import (
    read_edge_list,
    read_friend_requests,
    read_interactions,
    read_interests,
    read_mapping,
    write_csv,
    write_edge_list,
    write_json,
)
from .sampler import (
    METRIC_COLUMNS,
    LbsParams,
    SweepReport,
    SweepRow,
    lbs_sample,
    lbs_sample_degree_weighted,
    lbs_sweep,
    measure_copied,
    replica_seed,
)
from .theory import (
    gcc_predicate,
    gcc_threshold_raw,
    pmf_moments,
    predict_all,
    predict_copied_clustering,
    predict_moments,
)

log = logging.getLogger("linkboot")

OUTPUT_ENV = "LINKBOOT_OUTPUT_DIR"
EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_RUNTIME = 0, 2, 3, 4
FAMILY_ALIASES = {"er": "erdos_renyi", "powerlaw": "powerlaw_config", "ring": "ring_rewire"}


class Outputs:
    """Tracks files written by a run so a failure can remove them."""

    def __init__(self, out_dir: Path, config: dict):
        self.dir = out_dir
        self.config = config
        self.written: list[Path] = []

    def path(self, name: str) -> Path:
        self.dir.mkdir(parents=True, exist_ok=True)
        p = self.dir / name
        self.written.append(p)
        return p

    def meta(self, target: Path, **extra):
        sidecar = self.path(target.name + ".meta.json")
        write_json(sidecar, {"tool": "linkboot", "version": __version__,
                             "config": self.config, "seed": self.config.get("seed"), **extra})

    def csv(self, name, header, rows, **extra):
        p = self.path(name)
        write_csv(p, header, rows)
        self.meta(p, **extra)
        return p

    def json(self, name, obj):
        p = self.path(name)
        write_json(p, {"meta": {"tool": "linkboot", "version": __version__,
                                "config": self.config, "seed": self.config.get("seed")}, **obj})
        return p

    def cleanup(self):
        for p in self.written:
            try:
                p.unlink()
            except FileNotFoundError:
                pass


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, Fraction):
        return repr(float(v))
    if isinstance(v, float):
        return "nan" if math.isnan(v) else repr(v)
    if isinstance(v, (np.floating,)):
        return _fmt(float(v))
    return v


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


# -- generate -----------------------------------------------------------------

def cmd_generate(args, out: Outputs):
    family = FAMILY_ALIASES.get(args.family, args.family)
    params = {
        "erdos_renyi": {"mean_degree": args.mean_degree},
        "powerlaw_config": {"gamma": args.gamma, "k_min": args.k_min, "k_max": args.k_max},
        "ring_rewire": {"k": args.k, "beta": args.beta},
    }[family]
    params = {k: v for k, v in params.items() if v is not None}
    spec = GeneratorSpec(family, args.n, params, args.seed)
    g = generate(spec)
    p = out.path(f"{args.name}.tsv")
    write_edge_list(g, p)
    out.meta(p)
    out.json(f"{args.name}.json", {"spec": spec.to_dict(), "summary": realized_summary(g)})


# -- sample / sweep -----------------------------------------------------------

def cmd_sample(args, out: Outputs):
    source = read_edge_list(args.source, directed=False)
    summaries = []
    for r in range(args.replicas):
        # same derivation as sweep replicas, so replica r reproduces sweep replica r
        seed = replica_seed(args.seed, r)
        if args.degree_weighted:
            copied = lbs_sample_degree_weighted(source, args.p1, args.p2, seed)
        else:
            copied = lbs_sample(source, LbsParams(args.p1, args.p2, seed))
        tag = "" if args.replicas == 1 else f"_r{r}"
        edges = out.path(f"copied{tag}.tsv")
        if copied.copied_graph is not None:
            write_edge_list(copied.copied_graph, edges)
        else:
            edges.write_text("")
        out.meta(edges, replica=r)
        nodes = out.path(f"sampled_nodes{tag}.txt")
        with open(nodes, "w", encoding="utf-8") as fh:
            for i in copied.sampled_nodes.tolist():
                fh.write(f"{source.label(i)}\n")
        out.meta(nodes, replica=r)
        m = measure_copied(copied)
        summaries.append({"replica": r, "seed_derivation": [args.seed, r], "sampled_nodes": copied.size,
                          "copied_edges": 0 if copied.copied_graph is None else copied.copied_graph.edge_count,
                          **m})
    out.json("sample_summary.json", {"p1": args.p1, "p2": args.p2, "p_e": args.p1 * args.p2,
                                     "replicas": summaries})


def cmd_sweep(args, out: Outputs):
    source = read_edge_list(args.source, directed=False)
    report = lbs_sweep(source, args.p1, args.p2, args.replicas, args.seed)
    p = out.path("sweep.csv")
    p.write_text(report.to_csv(), encoding="utf-8")
    out.meta(p)


def _read_sweep(path) -> SweepReport:
    rows = []
    with open(path, encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for lineno, rec in enumerate(reader, 2):
            try:
                rows.append(SweepRow(**{k: (int(v) if k == "replica" else float(v))
                                        for k, v in rec.items()}))
            except (TypeError, ValueError) as exc:
                raise InputParseError(path, lineno, f"bad sweep row: {exc}") from None
    return SweepReport(rows)


# -- theory / compare ---------------------------------------------------------

def _source_inputs(args):
    """Source moments, pmf, node count and clustering from whichever flags were given."""
    pmf = n = c_src = None
    mean_k, mean_k2 = args.mean_k, args.mean_k2
    if getattr(args, "source", None):
        g = read_edge_list(args.source, directed=False)
        ds = degree_stats(g)
        pmf, n = ds.out_pmf, g.node_count
        mean_k, mean_k2 = ds.mean_k, ds.mean_k2
        c_src = global_clustering(g, "mean_local")
    elif getattr(args, "pmf", None):
        pmf = _read_pmf(args.pmf)
        mean_k, mean_k2 = pmf_moments(pmf)
    if args.n is not None:
        n = args.n
    if args.clustering_src is not None:
        c_src = args.clustering_src
    return mean_k, mean_k2, pmf, n, c_src


def _read_pmf(path) -> np.ndarray:
    probs = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#") or line.lower().startswith("degree"):
                continue
            parts = line.replace("\t", ",").split(",")
            try:
                k, p = int(parts[0]), float(parts[1])
            except (IndexError, ValueError):
                raise InputParseError(path, lineno, "expected 'degree,probability'") from None
            probs[k] = probs.get(k, 0.0) + p
    if not probs:
        raise InputParseError(path, 0, "empty pmf")
    arr = np.zeros(max(probs) + 1)
    for k, p in probs.items():
        arr[k] = p
    return arr


def cmd_theory(args, out: Outputs):
    mean_k, mean_k2, pmf, n, c_src = _source_inputs(args)
    preds = predict_all(args.p1, args.p2, mean_k=mean_k, mean_k2=mean_k2, pmf=pmf, n=n,
                        clustering_src=c_src, k_max_out=args.k_max_out)
    out.json("theory.json", {"predictions": [p.to_dict() for p in preds]})


COMPARE_COLUMNS = (
    "p1", "p2", "p_e", "replicas",
    "reciprocity", "reciprocity_pred", "reciprocity_dev",
    "mean_k", "mean_k_pred", "mean_k_dev", "mean_k2", "mean_k2_pred", "mean_k2_dev",
    "clustering_mean_local", "clustering_pred", "clustering_dev",
    "gcc_weak_frac", "gcc_strong_frac", "gcc_threshold", "gcc_pred",
    "gcc_weak_obs", "gcc_strong_obs", "gcc_weak_agrees", "gcc_strong_agrees",
)


def compare_rows(report: SweepReport, mean_k, mean_k2, c_src, gcc_cutoff):
    rows = []
    for cell in report.cells():
        m = cell.mean
        mk = mk2 = thr = gcc = None
        if mean_k is not None and mean_k2 is not None:
            mk, mk2 = predict_moments(mean_k, mean_k2, cell.p_e)
            thr = gcc_threshold_raw(mean_k, mean_k2)
            gcc = gcc_predicate(mean_k, mean_k2, cell.p_e)
        c_pred = None if c_src is None else predict_copied_clustering(cell.p2, c_src)
        weak_obs = m["gcc_weak_frac"] > gcc_cutoff
        strong_obs = m["gcc_strong_frac"] > gcc_cutoff

        def dev(measured, pred):
            return None if pred is None else measured - pred

        rows.append([
            cell.p1, cell.p2, cell.p_e, cell.replicas,
            m["reciprocity"], cell.p2, m["reciprocity"] - cell.p2,
            m["mean_k"], mk, dev(m["mean_k"], mk), m["mean_k2"], mk2, dev(m["mean_k2"], mk2),
            m["clustering_mean_local"], c_pred, dev(m["clustering_mean_local"], c_pred),
            m["gcc_weak_frac"], m["gcc_strong_frac"], thr, gcc,
            weak_obs, strong_obs,
            None if gcc is None else weak_obs == gcc, None if gcc is None else strong_obs == gcc,
        ])
    return rows


def cmd_compare(args, out: Outputs):
    report = _read_sweep(args.sweep)
    mean_k, mean_k2, _, _, c_src = _source_inputs(args)
    rows = compare_rows(report, mean_k, mean_k2, c_src, args.gcc_cutoff)
    out.csv("compare.csv", COMPARE_COLUMNS, [[_fmt(v) for v in r] for r in rows])


# -- metrics ------------------------------------------------------------------

def cmd_metrics(args, out: Outputs):
    g = read_edge_list(args.graph, directed=not args.undirected)
    ds = degree_stats(g)
    summary = {
        "nodes": g.node_count, "edges": g.edge_count, "directed": g.directed,
        "dropped_duplicates": g.ingest_report.duplicates,
        "dropped_self_loops": g.ingest_report.self_loops,
        "mean_k": ds.mean_k, "mean_k2": ds.mean_k2, "mean_jk": ds.mean_jk,
    }
    if g.directed and g.edge_count:
        summary["reciprocity"] = reciprocity(g)
    for mode in ("mean_local", "transitivity"):
        try:
            summary[f"clustering_{mode}"] = global_clustering(g, mode)
        except LinkbootError:
            summary[f"clustering_{mode}"] = None
    kinds = ("weak", "strong") if g.directed else ("undirected",)
    sizes_rows = []
    for kind in kinds:
        rep = connected_components(g, kind)
        summary[f"gcc_{kind}_fraction"] = rep.gcc_fraction_of_nodes
        sizes_rows += [(kind, s) for s in rep.component_sizes]
    out.json("metrics.json", {"metrics": summary})
    out.csv("degree_pmf.csv", ("degree", "out_probability", "in_probability"),
            [(k, _fmt(float(ds.out_pmf[k]) if k < len(ds.out_pmf) else 0.0),
              _fmt(float(ds.in_pmf[k]) if k < len(ds.in_pmf) else 0.0))
             for k in range(max(len(ds.out_pmf), len(ds.in_pmf)))])
    out.csv("component_sizes.csv", ("kind", "size"), sizes_rows)


# -- crossnet -----------------------------------------------------------------

USER_COLUMNS = (
    "node", "category", "cr", "cr_ind", "cr_out", "r_copied", "r_native",
    "copied_fraction_of_reciprocated", "copied_friend_count", "native_fof_follower_count",
    "events_made", "events_received",
    "social_repin_ratio_activity", "social_repin_ratio_influence",
    "fb_repin_ratio_activity", "fb_repin_ratio_influence",
    "interaction_reciprocated", "interaction_unreciprocated",
    "interaction_copied", "interaction_native",
)
INTERACTION_FIELDS = ("reciprocated", "unreciprocated", "copied", "native")


def cmd_crossnet(args, out: Outputs):
    if args.friend_requests:
        edges = read_friend_requests(args.friend_requests)
        target = _graph_from_label_edges(edges)
    else:
        target = read_edge_list(args.target, directed=True, symmetrize=args.target_undirected)
    source = read_edge_list(args.source, directed=False)
    mapping = read_mapping(args.mapping)
    part = cx.partition(target, source, mapping)
    ilog = read_interactions(args.interactions) if args.interactions else None

    records = cx.user_metrics(target, part, ilog, social_kind=args.social_kind)
    if ilog is not None:
        inet = cx.interaction_subgraph(target, ilog, kind=args.social_kind)
        stats = cx.interaction_sampling_stats(target, part, inet.graph)
    else:
        stats = {}
    out.csv("user_metrics.csv", USER_COLUMNS, [
        [r.node, r.category, *(_fmt(getattr(r, c)) for c in USER_COLUMNS[2:8]),
         r.copied_friend_count, r.native_fof_follower_count,
         sum(r.activity.values()), sum(r.influence.values()),
         *(_fmt(getattr(r, c)) for c in USER_COLUMNS[12:16]),
         *(_fmt(getattr(stats[u], f)) if u in stats else "" for f in INTERACTION_FIELDS)]
        for u, r in enumerate(records)
    ])

    cdfs = {f"cdf_{c}.csv": [getattr(r, c) for r in records]
            for c in ("cr", "cr_ind", "cr_out", "r_copied", "r_native", "copied_fraction_of_reciprocated")}
    c_copied = local_clustering_all(cx.link_subgraph(target, part, copied=True))
    c_native = local_clustering_all(cx.link_subgraph(target, part, copied=False))
    # zero-valued points are left in; consumers can filter
    cdfs["cdf_clustering_copied.csv"] = c_copied.tolist()
    cdfs["cdf_clustering_native.csv"] = c_native.tolist()

    copied_net = cx.copied_network(target, part)
    comp = connected_components(copied_net, "weak")
    summary = {"links": part.counts(), "categories": _category_counts(records),
               "copied_network": {"nodes": copied_net.node_count, "edges": copied_net.edge_count,
                                  "gcc_fraction_of_connected": comp.gcc_fraction_of_nodes,
                                  "gcc_fraction_of_target": comp.gcc_size / target.node_count}}
    out.csv("copied_component_sizes.csv", ("size",), [(s,) for s in comp.component_sizes])

    closeness = cx.closeness_by_link_class(part, source)
    for cls, vals in closeness.items():
        cdfs[f"cdf_closeness_{cls}.csv"] = vals
    if args.interests:
        sim = cx.similarity_by_link_class(part, target, read_interests(args.interests))
        for cls, vals in sim.items():
            cdfs[f"cdf_similarity_{cls}.csv"] = vals

    if ilog is not None:
        summary["interactions"] = {"events": len(ilog), "social_events": inet.social_events,
                                   "nonsocial_events": inet.nonsocial_events,
                                   "interaction_links": inet.graph.edge_count}
        for field_name in ("reciprocated", "unreciprocated", "copied", "native",
                           "clustering_target", "clustering_interaction"):
            cdfs[f"cdf_interaction_{field_name}.csv"] = [getattr(s, field_name) for s in stats.values()]
        bins = cx.BinSpec(kind=args.bin_kind, n_bins=args.bins)
        made = [sum(r.activity.values()) for r in records]
        recv = [sum(r.influence.values()) for r in records]
        series = {
            "binned_cr_out_by_activity.csv": (made, [r.cr_out for r in records]),
            "binned_cr_by_influence.csv": (recv, [r.cr for r in records]),
            "binned_social_ratio_by_activity.csv": (made, [r.social_repin_ratio_activity for r in records]),
            "binned_social_ratio_by_influence.csv": (recv, [r.social_repin_ratio_influence for r in records]),
            "binned_fb_ratio_by_influence.csv": (recv, [r.fb_repin_ratio_influence for r in records]),
        }
        for name, (x, y) in series.items():
            _write_binned(out, name, x, y, bins)
    fof_x = [r.copied_friend_count for r in records]
    fof_y = [r.native_fof_follower_count for r in records]
    _write_binned(out, "binned_fof_followers_by_copied.csv", fof_x, fof_y,
                  cx.BinSpec(kind=args.bin_kind, n_bins=args.bins))

    for name, vals in cdfs.items():
        out.csv(name, ("value", "cumulative_fraction"),
                [(_fmt(v), _fmt(c)) for v, c in cx.cdf_points(vals)])
    out.json("crossnet_summary.json", summary)


def _write_binned(out, name, x, y, bins):
    if bins.kind == "log":
        keep = [i for i, xv in enumerate(x) if xv > 0]
        x = [x[i] for i in keep]
        y = [y[i] for i in keep]
    rows = cx.binned_series(x, [None if v is None else float(v) for v in y], bins) if x else []
    out.csv(name, ("bin_center", "mean_y", "stderr", "count"),
            [[_fmt(r.bin_center), _fmt(r.mean_y), _fmt(r.stderr), r.count] for r in rows])


def _graph_from_label_edges(edges):
    from .graph import build_graph

    index, pairs = {}, []
    for u, v in edges:
        pairs.append((index.setdefault(u, len(index)), index.setdefault(v, len(index))))
    labels = list(index)
    return build_graph(pairs, directed=True, node_count=len(labels), labels=labels)


def _category_counts(records):
    counts = {"native": 0, "expat": 0, "binetworked": 0, "undefined": 0}
    for r in records:
        counts[r.category] += 1
    return counts


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="linkboot", description=__doc__.splitlines()[1])
    parser.add_argument("--version", action="version", version=f"linkboot {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=True):
        p.add_argument("--out-dir", type=Path, default=None,
                       help=f"output directory (default ${OUTPUT_ENV} or .)")
        if seed:
            p.add_argument("--seed", type=int, default=0)
        return p

    g = common(sub.add_parser("generate", help="write a synthetic source network"))
    g.add_argument("--family", required=True,
                   choices=sorted(set(FAMILY_ALIASES) | set(FAMILY_ALIASES.values())))
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--mean-degree", type=float)
    g.add_argument("--gamma", type=float)
    g.add_argument("--k-min", type=int)
    g.add_argument("--k-max", type=int)
    g.add_argument("--k", type=int)
    g.add_argument("--beta", type=float)
    g.add_argument("--name", default="source")

    s = common(sub.add_parser("sample", help="draw copied networks from a source edge list"))
    s.add_argument("--source", type=Path, required=True)
    s.add_argument("--p1", type=float, required=True)
    s.add_argument("--p2", type=float, required=True)
    s.add_argument("--replicas", type=int, default=1)
    s.add_argument("--degree-weighted", action="store_true",
                   help="treat --p1 as the base rate of degree-proportional node sampling")

    w = common(sub.add_parser("sweep", help="measure copied networks over a p1 x p2 grid"))
    w.add_argument("--source", type=Path, required=True)
    w.add_argument("--p1", type=_float_list, required=True, help="comma-separated grid")
    w.add_argument("--p2", type=_float_list, required=True, help="comma-separated grid")
    w.add_argument("--replicas", type=int, default=1)

    def source_flags(p):
        src = p.add_mutually_exclusive_group()
        src.add_argument("--source", type=Path, help="source edge list")
        src.add_argument("--pmf", type=Path, help="CSV of degree,probability")
        p.add_argument("--mean-k", type=float)
        p.add_argument("--mean-k2", type=float)
        p.add_argument("--n", type=int, help="source node count")
        p.add_argument("--clustering-src", type=float)

    t = common(sub.add_parser("theory", help="closed-form predictions"), seed=False)
    source_flags(t)
    t.add_argument("--p1", type=float, required=True)
    t.add_argument("--p2", type=float, required=True)
    t.add_argument("--k-max-out", type=int)

    c = common(sub.add_parser("compare", help="join a sweep CSV with predictions"), seed=False)
    c.add_argument("--sweep", type=Path, required=True)
    source_flags(c)
    c.add_argument("--gcc-cutoff", type=float, default=0.05,
                   help="GCC fraction above which a giant component counts as observed")

    x = common(sub.add_parser("crossnet", help="copied/native analytics on real data"), seed=False)
    tgt = x.add_mutually_exclusive_group(required=True)
    tgt.add_argument("--target", type=Path, help="target follow edge list")
    tgt.add_argument("--friend-requests", type=Path,
                     help="initiator/responder/outcome TSV inducing a directed target")
    x.add_argument("--target-undirected", action="store_true",
                   help="target edges are friendships; store both directions")
    x.add_argument("--source", type=Path, required=True)
    x.add_argument("--mapping", type=Path, required=True)
    x.add_argument("--interactions", type=Path)
    x.add_argument("--interests", type=Path)
    x.add_argument("--social-kind", default=None, help="event kind counted as social (default all)")
    x.add_argument("--bins", type=int, default=10)
    x.add_argument("--bin-kind", choices=("log", "linear"), default="log")

    m = common(sub.add_parser("metrics", help="structural metrics of one edge list"), seed=False)
    m.add_argument("--graph", type=Path, required=True)
    m.add_argument("--undirected", action="store_true")
    return parser


COMMANDS = {
    "generate": cmd_generate, "sample": cmd_sample, "sweep": cmd_sweep, "theory": cmd_theory,
    "compare": cmd_compare, "crossnet": cmd_crossnet, "metrics": cmd_metrics,
}


def _config(args) -> dict:
    out = {}
    for k, v in sorted(vars(args).items()):
        out[k] = str(v) if isinstance(v, Path) else v
    return out


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    out_dir = args.out_dir or Path(os.environ.get(OUTPUT_ENV, "."))
    config = _config(args)
    config["out_dir"] = str(out_dir)
    outputs = Outputs(out_dir, config)
    try:
        COMMANDS[args.command](args, outputs)
    except InputParseError as exc:
        outputs.cleanup()
        print(f"linkboot: input error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except FileNotFoundError as exc:
        outputs.cleanup()
        print(f"linkboot: input error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (LinkbootError, ValueError, OSError) as exc:
        outputs.cleanup()
        print(f"linkboot: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
