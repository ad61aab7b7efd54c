"""Loaders for the checked-in graph-pair transcriptions."""
from __future__ import annotations

import json
from pathlib import Path

from .canonical import canonical_form, canonical_id
from .data import data_dir
from .graphs import GraphPair, LabelledGraph, WeightVector
from .template import default_template


def _edge_key(e) -> str:
    return f"{e.cls}#{e.rank}"


def pair_from_edges(doc: dict) -> GraphPair:
    """Build a pair from an edge correspondence list.

    Each entry maps a G_S edge 'class#rank' to a G_T edge; flip says whether
    the first end of the S edge goes to the second end of the T edge.
    """
    tpl = default_template()
    gs = LabelledGraph(tpl, WeightVector(2, tuple(doc["ws"])), "S", tuple(doc["phaseS"]))
    gt = LabelledGraph(tpl, WeightVector(2, tuple(doc["wt"])), "T", tuple(doc["phaseT"]))
    s_by = {_edge_key(e): e for e in gs.edges}
    t_by = {_edge_key(e): e for e in gt.edges}
    phi = [-1] * len(gs.slot_edge)
    for row in doc["edges"]:
        e, f = s_by[row["S"]], t_by[row["T"]]
        a, b = f.ends[::-1] if row["flip"] else f.ends
        phi[e.ends[0]], phi[e.ends[1]] = a, b
    return GraphPair(gs, gt, tuple(phi)).validate()


def pair_to_edges(p: GraphPair) -> list[dict]:
    rows = []
    for e, fid in zip(p.gs.edges, p.edge_map):
        f = p.gt.edges[fid]
        rows.append({"S": _edge_key(e), "T": _edge_key(f), "flip": p.phi[e.ends[0]] != f.ends[0]})
    return rows


def decode_pair(doc: dict) -> GraphPair:
    """Inverse of search.encode_pair."""
    tpl = default_template()
    gs = LabelledGraph(tpl, WeightVector(2, tuple(doc["ws"])), "S", tuple(doc["phaseS"]))
    gt = LabelledGraph(tpl, WeightVector(2, tuple(doc["wt"])), "T", tuple(doc["phaseT"]))
    return GraphPair(gs, gt, tuple(doc["phi"])).validate()


def load_figure8_pair() -> GraphPair:
    doc = json.loads((Path(data_dir()) / "figure8.pair").read_text())
    return pair_from_edges(doc)


def figure8_class_id() -> str:
    return canonical_id(canonical_form(load_figure8_pair()))


def class_id_of(x) -> str:
    """Canonical class id of a GraphPair, a survivor record, an encoded pair or an id."""
    if isinstance(x, GraphPair):
        return canonical_id(canonical_form(x))
    if isinstance(x, str):
        return x
    if isinstance(x, dict):
        if "pair" in x:
            x = x["pair"]
        if "phi" in x:
            return canonical_id(canonical_form(decode_pair(x)))
        if "edges" in x:
            return canonical_id(canonical_form(pair_from_edges(x)))
        if "classId" in x:
            return x["classId"]
    raise TypeError(f"cannot read a pair from {type(x).__name__}")


def load_figure9_cases() -> dict:
    return json.loads((Path(data_dir()) / "figure9.cases").read_text())
