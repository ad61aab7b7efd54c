"""Exhaustive search over two-vertex graph pairs (s = 2) with elimination traces.

Work is split by (G_S weights, G_T weights).  Each unit is processed
independently and results are merged in a fixed order, so the trace does not
depend on the number of worker processes.
"""
from __future__ import annotations

import itertools
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Iterable

from .canonical import (canonical_form, canonical_id, labelled_pair_oriented_form, oriented_form)
from .filters import (DEFAULT_ORDER, SURVIVOR, check_family_bounds, check_parity_graph,
                      run_pair_filters)
from .graphs import LabelledGraph, WeightVector, bijections
from .template import default_template, weight_permutations

WEIGHT_RULES = ("L2.6.1", "L2.6.2", "L2.7.2", "L2.7.3")
ALL_RULES = ("L2.4", "L2.5.1", "L2.5.2", "L2.5.3", "L2.6.1", "L2.6.2",
             "L2.7.1", "L2.7.2", "L2.7.3", "L2.7.4", "L2.8")


@dataclass
class SearchConfig:
    s_values: tuple[int, ...] = (2,)
    disabled_rules: frozenset = frozenset()
    symmetry: bool = True
    workers: int = 1
    out_dir: str | None = None
    filter_order: tuple[str, ...] = DEFAULT_ORDER
    # the s = 2 enumeration window; vectors outside the proven bounds are
    # enumerated so that the bound rules show up in the trace
    max_loop_weight: int = 5
    max_family_weight: int = 3
    checkpoint: str | None = None
    max_configs: int | None = None
    max_s: int = 12

    def __post_init__(self):
        self.s_values = tuple(self.s_values)
        self.disabled_rules = frozenset(self.disabled_rules)
        for s in self.s_values:
            if s < 2 or s % 2:
                raise ValueError(f"s must be even and >= 2, got {s}")
        unknown = set(self.disabled_rules) - set(ALL_RULES)
        if unknown:
            raise ValueError(f"unknown rule ids: {sorted(unknown)}")

    def snapshot(self) -> dict:
        d = asdict(self)
        d["disabled_rules"] = sorted(self.disabled_rules)
        d["s_values"] = list(self.s_values)
        d["filter_order"] = list(self.filter_order)
        return d


class SearchBudgetExceeded(RuntimeError):
    def __init__(self, trace: "EliminationTrace", checkpoint: str | None):
        super().__init__(f"configuration budget exceeded after {len(trace.records)} records; "
                         f"checkpoint at {checkpoint}")
        self.trace = trace
        self.checkpoint = checkpoint


@dataclass
class EliminationTrace:
    s: int
    records: list[dict] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def summary(self) -> dict:
        hist: dict[str, int] = {}
        surv = []
        for r in self.records:
            rule = r["verdict"]["rule"]
            if rule == SURVIVOR:
                surv.append(r)
            else:
                hist[rule] = hist.get(rule, 0) + 1
        classes = sorted({r["pair"]["classId"] for r in surv if "pair" in r})
        return {"enumerated": len(self.records), "eliminated": dict(sorted(hist.items())),
                "survivors": len(surv), "survivorClasses": classes, **self.meta}

    def to_json(self) -> dict:
        return {"s": self.s, "records": self.records, "summary": self.summary()}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, doc: dict) -> "EliminationTrace":
        summary = doc.get("summary", {})
        meta = {k: v for k, v in summary.items()
                if k not in ("enumerated", "eliminated", "survivors", "survivorClasses")}
        return cls(int(doc["s"]), list(doc["records"]), meta)

    def survivors(self) -> list[dict]:
        return [r for r in self.records if r["verdict"]["rule"] == SURVIVOR]


def _jsonable(x):
    if isinstance(x, (tuple, list)):
        return [_jsonable(y) for y in x]
    if isinstance(x, frozenset):
        return sorted(_jsonable(y) for y in x)
    return x


def weight_window(s: int, loop_max: int, family_max: int) -> list[WeightVector]:
    out = []
    for x1 in range(loop_max + 1):
        for r in itertools.product(range(family_max + 1), repeat=4):
            if 2 * x1 + sum(r) == 5 * s:
                out.append(WeightVector(s, (x1,) + r))
    return out


def encode_pair(p) -> dict:
    return {"ws": list(p.gs.weights.x), "wt": list(p.gt.weights.x),
            "phaseS": list(p.gs.phases), "phaseT": list(p.gt.phases), "phi": list(p.phi)}


def _record(ws, wt, tags, rule, witness, rid=None, pair=None):
    rec = {"id": rid, "config": {"s": 2, "ws": list(ws), "wt": list(wt), "caseTags": tags},
           "verdict": {"rule": rule, "witness": _jsonable(witness)}}
    if pair is not None:
        rec["pair"] = pair
    return rec


def process_unit(args) -> list[tuple[str | None, dict]]:
    """All records of one weight-vector pair, each with its deduplication key."""
    ws_x, wt_x, disabled, symmetry, order = args
    disabled = frozenset(disabled)
    tpl = default_template()
    ws, wt = WeightVector(2, tuple(ws_x)), WeightVector(2, tuple(wt_x))
    out = []
    probe_s = LabelledGraph(tpl, ws, "S", (0, 0))
    probe_t = LabelledGraph(tpl, wt, "T", (0, 0))
    for g in (probe_s, probe_t):
        v = check_family_bounds(g, disabled)
        if not v.passed:
            out.append((None, _record(ws_x, wt_x, {"level": "weights"}, v.rule, (g.side,) + v.witness)))
            return out
    for ps in itertools.product(range(2), repeat=2):
        gs = LabelledGraph(tpl, ws, "S", ps)
        vs = check_parity_graph(gs)
        for pt in itertools.product(range(2), repeat=2):
            gt = LabelledGraph(tpl, wt, "T", pt)
            tags = {"level": "labels", "phaseS": list(ps), "phaseT": list(pt)}
            if "L2.5.2" not in disabled:
                vt = check_parity_graph(gt)
                bad = vs if not vs.passed else (vt if not vt.passed else None)
                if bad is not None:
                    key = canonical_id(labelled_pair_oriented_form(gs, gt)) if symmetry else None
                    out.append((key, _record(ws_x, wt_x, tags, "L2.5.2", bad.witness, key)))
                    continue
            count = 0
            for k, p in enumerate(bijections(gs, gt)):
                count += 1
                verdict = run_pair_filters(p, order, disabled)
                key = canonical_id(oriented_form(p)) if symmetry else None
                ptags = {"level": "pair", "phaseS": list(ps), "phaseT": list(pt), "bijection": k}
                if verdict is None:
                    pair = encode_pair(p)
                    pair["classId"] = canonical_id(canonical_form(p))
                    out.append((key, _record(ws_x, wt_x, ptags, SURVIVOR, [], key, pair)))
                else:
                    out.append((key, _record(ws_x, wt_x, ptags, verdict.rule, verdict.witness, key)))
            if count == 0:
                # labels are parity-consistent on each side but the edge types cannot be matched
                key = canonical_id(labelled_pair_oriented_form(gs, gt)) if symmetry else None
                out.append((key, _record(ws_x, wt_x, tags, "L2.5.2",
                                         ["no parity-compatible bijection"], key)))
    return out


def weight_pairs(cfg: SearchConfig) -> list[tuple[tuple, tuple]]:
    vs = weight_window(2, cfg.max_loop_weight, cfg.max_family_weight)
    pairs = [(a.x, b.x) for a in vs for b in vs]
    if not cfg.symmetry:
        return pairs
    perms = weight_permutations(default_template())

    def act(p, x):
        return tuple(x[p[i]] for i in range(5))

    reps = set()
    for a, b in pairs:
        orbit = [(act(g, a), act(h, b)) for g in perms for h in perms]
        reps.add(min(orbit))
    return sorted(reps)


def _load_checkpoint(path) -> dict:
    if path and os.path.exists(path):
        with open(path) as fh:
            return json.load(fh)
    return {"units": {}}


def _save_checkpoint(path, state):
    tmp = str(path) + ".tmp"
    with open(tmp, "w") as fh:
        json.dump(state, fh, sort_keys=True)
    os.replace(tmp, path)


def search_s2(cfg: SearchConfig) -> tuple[list[dict], EliminationTrace]:
    if tuple(cfg.s_values) != (2,):
        raise ValueError("search_s2 requires s = 2")
    units = weight_pairs(cfg)
    state = _load_checkpoint(cfg.checkpoint)
    done: dict = state["units"]
    args = [(a, b, sorted(cfg.disabled_rules), cfg.symmetry, tuple(cfg.filter_order)) for a, b in units]
    todo = [a for a in args if _unit_key(a) not in done]
    processed = sum(len(v) for v in done.values())

    def consume(results_iter):
        nonlocal processed
        for a, res in results_iter:
            done[_unit_key(a)] = [[k, r] for k, r in res]
            processed += len(res)
            if cfg.checkpoint:
                _save_checkpoint(cfg.checkpoint, state)
            if cfg.max_configs is not None and processed > cfg.max_configs:
                if cfg.checkpoint:
                    _save_checkpoint(cfg.checkpoint, state)
                raise SearchBudgetExceeded(_merge(args, done, cfg), cfg.checkpoint)

    if cfg.workers <= 1:
        consume((a, process_unit(a)) for a in todo)
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as ex:
            consume(zip(todo, ex.map(process_unit, todo, chunksize=4)))
    trace = _merge(args, done, cfg)
    survivors = []
    seen = set()
    for r in trace.survivors():
        cid = r["pair"]["classId"]
        if cid not in seen:
            seen.add(cid)
            survivors.append(r)
    return survivors, trace


def _unit_key(a) -> str:
    return json.dumps([list(a[0]), list(a[1])])


def _merge(args, done, cfg) -> EliminationTrace:
    records = []
    seen = set()
    for a in args:
        key = _unit_key(a)
        if key not in done:
            continue
        for k, r in done[key]:
            if cfg.symmetry and k is not None:
                if k in seen:
                    continue
                seen.add(k)
            records.append(r)
    meta = {"symmetry": cfg.symmetry, "disabledRules": sorted(cfg.disabled_rules),
            "weightPairs": len(args), "complete": len(done) == len(args)}
    return EliminationTrace(2, records, meta)
