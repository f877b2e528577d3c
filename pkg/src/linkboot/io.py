"""
Readers and writers for the tab-separated input formats.

Edge lists are streamed in record batches through pyarrow so large files are never held
in memory as text; node identifiers are arbitrary strings remapped to dense
indices in order of first appearance.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np
import pyarrow as pa
import pyarrow.compute as pc
import pyarrow.csv as pacsv

from .crossnet import AccountMapping, InteractionLog, directed_from_friend_requests
from .errors import InputParseError
from .graph import Graph, build_graph

BLOCK_BYTES = 1 << 24


def _scan_for_error(path, ncols: int, validators=()):
    """Slow line-by-line pass used only to pinpoint a malformed line."""
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.rstrip("\n").rstrip("\r")
                if not line.strip() or line.startswith("#"):
                    continue
                fields = line.split("\t")
                if len(fields) != ncols:
                    raise InputParseError(path, lineno, f"expected {ncols} tab-separated fields, got {len(fields)}")
                if any(not f for f in fields):
                    raise InputParseError(path, lineno, "empty field")
                for col, check, what in validators:
                    try:
                        check(fields[col])
                    except (TypeError, ValueError):
                        raise InputParseError(path, lineno,
                                              f"field {col + 1} is not {what}: {fields[col]!r}") from None
    except UnicodeDecodeError as exc:
        raise InputParseError(path, 0, f"input is not valid UTF-8 ({exc.reason})") from None
    raise InputParseError(path, 0, "unreadable input")


def _skip_comment(row):
    return "skip" if row.text.lstrip().startswith("#") else "error"


def _batches(path, ncols: int):
    """
    Stream record batches of ``ncols`` string columns.

    Comment rows are dropped; any malformed row triggers a rescan that
    reports its line number.
    """
    names = [f"c{i}" for i in range(ncols)]
    try:
        reader = pacsv.open_csv(
            path,
            read_options=pacsv.ReadOptions(column_names=names, block_size=BLOCK_BYTES, use_threads=False),
            parse_options=pacsv.ParseOptions(delimiter="\t", quote_char=False, escape_char=False,
                                             invalid_row_handler=_skip_comment),
            convert_options=pacsv.ConvertOptions(column_types={n: pa.string() for n in names}),
        )
    except pa.ArrowInvalid as exc:
        if "Empty CSV file" in str(exc):
            return
        _scan_for_error(path, ncols)
    except (FileNotFoundError, IsADirectoryError):
        raise
    while True:
        try:
            batch = reader.read_next_batch()
        except StopIteration:
            return
        except pa.ArrowInvalid:
            _scan_for_error(path, ncols)
        first = batch.column(0)
        comment = pc.starts_with(first, "#")
        if pc.any(comment).as_py():
            batch = batch.filter(pc.invert(comment))
        for col in batch.columns:
            if pc.any(pc.equal(pc.utf8_length(col), 0)).as_py():
                _scan_for_error(path, ncols)
        if batch.num_rows:
            yield batch


def read_edge_list(path, directed: bool = True, symmetrize: bool = False) -> Graph:
    """
    Read ``src<TAB>dst`` lines into a :class:`Graph`.

    ``#`` lines are comments. With ``symmetrize`` a directed graph gets every
    edge in both directions, which is how undirected target networks are
    represented.
    """
    known = pa.array([], type=pa.string())
    codes = []
    for batch in _batches(path, 2):
        both = pa.chunked_array([batch.column(0), batch.column(1)]).combine_chunks()
        enc = both.dictionary_encode()
        local = enc.dictionary
        to_global = pc.index_in(local, value_set=known).to_numpy(zero_copy_only=False)
        new = np.isnan(to_global) if to_global.dtype.kind == "f" else to_global < 0
        to_global = np.where(new, -1, to_global).astype(np.int64)
        if new.any():
            fresh = local.filter(pa.array(new))
            to_global[new] = np.arange(len(known), len(known) + len(fresh))
            known = pa.concat_arrays([known, fresh])
        idx = to_global[enc.indices.to_numpy(zero_copy_only=False)]
        half = batch.num_rows
        codes.append(np.column_stack([idx[:half], idx[half:]]))
    if len(known) == 0:
        raise InputParseError(path, 0, "no edges found")
    pairs = np.concatenate(codes)
    del codes
    if directed and symmetrize:
        pairs = np.concatenate([pairs, pairs[:, ::-1]])
    return build_graph(pairs, directed=directed, node_count=len(known),
                       labels=known.to_numpy(zero_copy_only=False))


def write_edge_list(g: Graph, path, header: str | None = None) -> None:
    src, dst = g.edges()
    labels = g.labels
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if header:
            for line in header.splitlines():
                fh.write(f"# {line}\n")
        if labels is None:
            np.savetxt(fh, np.column_stack([src, dst]), fmt="%d", delimiter="\t")
        else:
            for u, v in zip(src.tolist(), dst.tolist()):
                fh.write(f"{labels[u]}\t{labels[v]}\n")


def _rows(path, ncols):
    for batch in _batches(path, ncols):
        yield from zip(*(col.to_pylist() for col in batch.columns))


def read_mapping(path) -> AccountMapping:
    pairs = list(_rows(path, 2))
    try:
        return AccountMapping.from_pairs(pairs)
    except ValueError as exc:
        raise InputParseError(path, 0, str(exc)) from None


def read_interactions(path) -> InteractionLog:
    events = []
    for actor, author, kind, ts in _rows(path, 4):
        try:
            t = float(ts)
        except ValueError:
            _scan_for_error(path, 4, [(3, float, "a unix timestamp")])
        events.append((actor, author, kind, t))
    return InteractionLog(events)


def read_interests(path) -> dict:
    out = {}
    for node, labels in _rows(path, 2):
        out[node] = frozenset(x.strip() for x in labels.split(",") if x.strip())
    return out


def read_friend_requests(path) -> list[tuple]:
    return directed_from_friend_requests(_rows(path, 3))


def write_csv(path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, Path):
        return str(o)
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    return str(o)
