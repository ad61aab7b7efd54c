"""Elimination tree for s >= 4.

Here G_S has s vertices and is not enumerated.  A configuration is a G_T
weight vector with label phases at v_1 and v_2.  Labels increase
counterclockwise around v_1 and decrease around v_2, since the two fat
vertices carry opposite orientations.  Every configuration is pushed through a
decision tree whose node preconditions are computed from the labelled G_T:
parity, associated permutations, S-cycle label pairs, loop counts and
successiveness of label occurrences.  Where the case analysis splits on
how a subgraph of G_S sits in an annulus, the split is recorded at the node
as an inherited assumption and each branch becomes its own trace record.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

from .canonical import dart_automorphisms, map_graph
from .filters import SURVIVOR, find_scycles, label_parity_violations, shift_orbits
from .graphs import DomainError, LabelledGraph, WeightVector, enumerate_weight_vectors
from .search import EliminationTrace
from .template import default_template


class CoverageGap(RuntimeError):
    def __init__(self, report: dict):
        super().__init__(f"{len(report['gaps'])} configurations reach no terminal node; "
                         f"{len(report['overlaps'])} reach more than one")
        self.report = report


@dataclass(frozen=True)
class HighConfig:
    s: int
    wt: tuple[int, ...]
    phases: tuple[int, int]

    def tags(self) -> dict:
        return {"phases": list(self.phases)}


class Facts:
    """Quantities read off the labelled G_T of one configuration."""

    def __init__(self, cfg: HighConfig):
        self.cfg = cfg
        self.s = cfg.s
        self.g = LabelledGraph(default_template(), WeightVector(cfg.s, cfg.wt), "T", cfg.phases, (1, -1))
        self.q1 = cfg.wt[0]

    @cached_property
    def parity_bad(self) -> list[int]:
        return label_parity_violations(self.g)

    @cached_property
    def frame(self) -> LabelledGraph | None:
        """G_T moved so the short family (if any) is d and the rank-0 edge of a has label 1 at v_1."""
        g, s = self.g, self.s
        x = g.weights.x
        short = [c for c, i in (("a", 1), ("b", 2), ("c", 3), ("d", 4)) if x[i] == s - 2]
        if self.q1 == s // 2 + 1:
            if len(short) != 1 or sorted(x[1:]) != [s - 2, s, s, s]:
                return None
            target = short[0]
        elif self.q1 == s // 2:
            target = "d"
        else:
            return None
        tpl = g.template
        aut = None
        for vm, dm, sign in sorted(dart_automorphisms(tpl), key=lambda a: -a[2]):
            if vm[0] != 0:
                continue
            image = {tpl.corner_words[v][i].cls: tpl.corner_words[w][j].cls for (v, i), (w, j) in dm.items()}
            if image[target] == "d":
                aut = (vm, dm, sign)
                break
        sign = aut[2]
        reflect = (lambda l: (1 - l) % s + 1) if sign == -1 else (lambda l: l)
        h, _ = map_graph(g, aut, relabel=reflect)
        first = h.edge_labels(h.families["a"][0])[0]
        h, _ = map_graph(h, _identity(tpl), relabel=lambda l: (l - first) % s + 1)
        return h

    def shift(self, cls: str) -> int | None:
        h = self.frame
        fam = h.families.get(cls, ())
        ks = {(h.edge_labels(e)[1] - h.edge_labels(e)[0]) % self.s for e in fam}
        return ks.pop() if len(ks) == 1 else None

    @cached_property
    def k(self) -> int | None:
        return self.shift("a") if self.frame is not None else None

    @cached_property
    def scycles(self) -> list[tuple[frozenset, int]]:
        h = self.frame
        return [(sc.label_set, h.slot_vertex[sc.corners[0][0]] + 1) for sc in find_scycles(h)]

    def has_scycle(self, pair, vertex=None) -> bool:
        ps = frozenset((x - 1) % self.s + 1 for x in pair)
        return any(ls == ps and (vertex is None or v == vertex) for ls, v in self.scycles)

    @cached_property
    def gs_edge_counts(self) -> dict[frozenset, int]:
        """Edges of G_S between u_i and u_j coming from negative edges of G_T, keyed by {i, j}."""
        h = self.frame
        out: dict[frozenset, int] = {}
        for e in h.edges:
            if not h.is_positive(e):
                key = frozenset(h.edge_labels(e))
                out[key] = out.get(key, 0) + 1
        return out

    def gs_loops(self, j: int) -> int:
        return self.gs_edge_counts.get(frozenset([j]), 0)

    def slots_with_label(self, vertex: int, label: int) -> list[int]:
        h = self.frame
        return [x for x in h.vertex_slots(vertex) if h.slot_label[x] == label]

    def successive(self, vertex: int, label: int, x: int, y: int) -> bool:
        occ = self.slots_with_label(vertex, label)
        i, j = occ.index(x), occ.index(y)
        return (i - j) % len(occ) in (1, len(occ) - 1)

    def end_at(self, e, vertex: int) -> int:
        return next(x for x in e.ends if self.frame.slot_vertex[x] == vertex)

    def edge_with(self, cls: str, label_v1: int):
        h = self.frame
        for e in h.families.get(cls, ()):
            if h.slot_label[self.end_at(e, 0)] == label_v1:
                return e
        return None

    def loop_with(self, vertex: int, labels: set):
        h = self.frame
        loop = "L1" if vertex == 0 else "L2"
        for e in h.families.get(loop, ()):
            if set(h.edge_labels(e)) == labels:
                return e
        return None


def _identity(tpl):
    return ({v: v for v in range(tpl.n_vertices)}, {d: d for d in tpl.darts()}, 1)


# -- node predicates ---------------------------------------------------------------

def _half_identity_jump(f: Facts):
    """sigma = id with q1 = s/2: a_1, e_1 not successive at v_1 but a_2, f_1 successive at v_2."""
    s = f.s
    a = f.edge_with("a", 1)
    e = f.loop_with(0, {1, s})
    ff = f.loop_with(1, {1, s})
    if a is None or e is None or ff is None:
        return None
    h = f.frame
    a1, a2 = f.end_at(a, 0), f.end_at(a, 1)
    if h.slot_label[a2] != 1:
        return None
    e1 = next(x for x in e.ends if h.slot_label[x] == 1)
    f1 = next(x for x in ff.ends if h.slot_label[x] == 1)
    if not f.successive(0, 1, a1, e1) and f.successive(1, 1, a2, f1):
        return {"a": a.id, "e": e.id, "f": ff.id, "a1": a1, "e1": e1, "a2": a2, "f1": f1}
    return None


def _half_involution_count(f: Facts):
    """sigma(i) = i + s/2: each pair {j, j+s/2} spans 8 positive edges of G_S, so 4 are parallel."""
    s = f.s
    counts = {tuple(sorted(o)): f.gs_edge_counts.get(frozenset(o), 0) for o in shift_orbits(s, s // 2)}
    positive_elsewhere = sum(n for key, n in f.gs_edge_counts.items()
                             if tuple(sorted(key)) not in counts)
    if positive_elsewhere == 0 and all(n == 8 for n in counts.values()):
        # two vertices in an annulus: edges between them fall into at most two parallel classes
        return {"components": len(counts), "edgesPerComponent": 8, "parallelAtLeast": math.ceil(8 / 2)}
    return None


def _plus_frame_ok(f: Facts):
    s, k = f.s, f.k
    h = f.frame
    if h is None or h.weights.x != (s // 2 + 1, s, s, s, s - 2):
        return None
    kb, kc, kd = f.shift("b"), f.shift("c"), f.shift("d")
    if None in (k, kb, kc, kd) or not (k == kb == kd) or (kc - k) % s not in (2, s - 2):
        return None
    r = 1 + k
    if not f.has_scycle((s // 2, s // 2 + 1), 1) or not f.has_scycle((r + s // 2 - 1, r + s // 2), 2):
        return None
    return {"sigmaShift": k, "tauShift": kc}


def _plus_s4_disjoint(f: Facts):
    sets = [ls for ls, _ in f.scycles]
    for i, a in enumerate(sets):
        for b in sets[i + 1:]:
            if not a & b:
                return {"labelPairs": [sorted(a), sorted(b)]}
    return None


def _plus_big_involution(f: Facts):
    s = f.s
    if f.has_scycle((s // 2, s // 2 + 1)) and f.has_scycle((s, 1)):
        return {"labelPairs": [[s // 2, s // 2 + 1], [1, s]]}
    return None


def _plus_big_identity(f: Facts):
    s = f.s
    tau = f.shift("c")
    orbits = shift_orbits(s, tau)
    loops = [f.gs_loops(j) for j in range(1, s + 1)]
    if len(orbits) == 2 and all(len(o) >= 3 for o in orbits) and all(n >= 1 for n in loops):
        return {"tauOrbits": [list(o) for o in orbits], "loopsPerVertex": loops}
    return None


def _plus_s4_identity(f: Facts):
    loops = [f.gs_loops(j) for j in range(1, 5)]
    twos = sum(1 for ls, _ in f.scycles if ls == frozenset({2, 3}))
    b = f.edge_with("b", 1)
    ff = f.edge_with("c", 3)
    if loops != [3, 2, 2, 3] or twos != 2 or b is None or ff is None:
        return None
    h = f.frame
    b2, f2 = f.end_at(b, 1), f.end_at(ff, 1)
    if h.slot_label[b2] != 1 or h.slot_label[f2] != 1 or not f.successive(1, 1, b2, f2):
        return None
    return {"loopsPerVertex": loops, "b": b.id, "f": ff.id, "b2": b2, "f2": f2}


@dataclass(frozen=True)
class TreeNode:
    id: str
    parent: str | None
    description: str
    precondition: Callable[[Facts], object]
    rule: str | None = None
    subcases: tuple[str, ...] = ("-",)
    inherited: str = ""

    @property
    def terminal(self) -> bool:
        return self.rule is not None


def _truthy(value):
    return {} if value is True else value


def default_tree() -> list[TreeNode]:
    half = lambda f: not f.parity_bad and f.q1 == f.s // 2 and f.frame is not None and f.k is not None
    plus = lambda f: not f.parity_bad and f.q1 == f.s // 2 + 1 and _plus_frame_ok(f)
    return [
        TreeNode("root", None, "all configurations", lambda f: True),
        TreeNode("parity", "root", "some edge of G_T has a sign that agrees with its labels",
                 lambda f: {"edges": f.parity_bad} if f.parity_bad else None, "L2.5.2"),
        TreeNode("half", "root", "q1 = s/2, so G_T = G(s/2,s,s,s,s)",
                 lambda f: half(f) and f.frame.weights.x == (f.s // 2,) + (f.s,) * 4
                 and all(f.shift(c) == f.k for c in "bcd") and {"sigmaShift": f.k}),
        TreeNode("half.identity", "half", "sigma = id; jumping fails for u_1, u_s",
                 lambda f: f.k == 0 and _half_identity_jump(f), "L2.4",
                 inherited="the subgraph of G_S on u_1, u_s has one of two annulus placements, "
                           "in both of which a_1,e_1 are not successive at u_1"),
        TreeNode("half.long-orbits", "half", "sigma^2 != id; the cycle L through u_1 with edge b forces sigma^2 = id",
                 lambda f: (2 * f.k) % f.s != 0 and {"orbits": [list(o) for o in shift_orbits(f.s, f.k)]},
                 "L2.8", subcases=("edge-between", "four-classes"),
                 inherited="L together with b has one of two annulus placements"),
        TreeNode("half.involution", "half", "sigma(i) = i + s/2; four mutually parallel positive edges in G_S",
                 lambda f: f.k == f.s // 2 and _half_involution_count(f), "L2.6.1"),
        TreeNode("plus", "root", "q1 = s/2+1, so G_T = G(s/2+1,s,s,s,s-2) with end S-cycles",
                 plus),
        TreeNode("plus.s4.shifted", "plus", "s = 4, sigma != id; S-cycles {2,3} and {4,1}",
                 lambda f: f.s == 4 and f.k != 0 and _plus_s4_disjoint(f), "L2.7.1"),
        TreeNode("plus.long-orbits", "plus", "s > 4, sigma^2 != id; b and c would be parallel to a",
                 lambda f: f.s > 4 and (2 * f.k) % f.s != 0
                 and {"orbits": [list(o) for o in shift_orbits(f.s, f.k)]},
                 "L2.8", subcases=("b-parallel", "c-located"),
                 inherited="L together with b and c has one of the annulus placements considered"),
        TreeNode("plus.involution", "plus", "s > 4, sigma(i) = i + s/2; S-cycles {s/2,s/2+1}, {s,1} not both essential",
                 lambda f: f.s > 4 and f.k == f.s // 2 and _plus_big_involution(f), "L2.5.3",
                 inherited="the two S-cycles cannot simultaneously form essential cycles on the torus"),
        TreeNode("plus.identity", "plus", "s > 4, sigma = id; tau = i-2 cycles plus loops give a trivial loop",
                 lambda f: f.s > 4 and f.k == 0 and _plus_big_identity(f), "L2.8",
                 inherited="an essential cycle through >= 3 vertices with a loop at each vertex forces a trivial loop"),
        TreeNode("plus.s4.identity", "plus", "s = 4, sigma = id; endpoints of b and f adjacent at both u_1 and v_2",
                 lambda f: f.s == 4 and f.k == 0 and _plus_s4_identity(f), "L2.4",
                 inherited="G_S is forced into the single placement where b, f are successive at u_1"),
    ]


def enumerate_high_configs(s: int) -> list[HighConfig]:
    if s < 4 or s % 2:
        raise DomainError(f"the high-s tree needs even s >= 4, got {s}")
    return [HighConfig(s, w.x, (p1, p2)) for w in enumerate_weight_vectors(s, "T")
            for p1 in range(s) for p2 in range(s)]


def classify(tree: list[TreeNode], f: Facts) -> tuple[list[tuple[TreeNode, object]], list[str]]:
    """Terminal nodes reached by f, and problems (no child / several children) met on the way."""
    children: dict[str | None, list[TreeNode]] = {}
    for n in tree:
        children.setdefault(n.parent, []).append(n)
    problems = []
    reached = []
    node = children[None][0]
    while not node.terminal:
        hits = []
        for c in children.get(node.id, []):
            w = c.precondition(f)
            if w is not None and w is not False:
                hits.append((c, _truthy(w)))
        if not hits:
            problems.append(f"gap below {node.id}")
            break
        if len(hits) > 1:
            problems.append(f"overlap below {node.id}: {[c.id for c, _ in hits]}")
        node, w = hits[0]
        if node.terminal:
            reached.append((node, w))
    return reached, problems


def coverage_check(tree: list[TreeNode], configs: list[HighConfig]) -> dict:
    gaps, overlaps, hits = [], [], {}
    for cfg in configs:
        reached, problems = classify(tree, Facts(cfg))
        for p in problems:
            entry = {"s": cfg.s, "wt": list(cfg.wt), "phases": list(cfg.phases), "problem": p}
            (overlaps if p.startswith("overlap") else gaps).append(entry)
        for n, _ in reached:
            hits[n.id] = hits.get(n.id, 0) + 1
    return {"configurations": len(configs), "gaps": gaps, "overlaps": overlaps,
            "terminalHits": dict(sorted(hits.items())), "complete": not gaps and not overlaps}


def eliminate_high_s(s_values, tree: list[TreeNode] | None = None, strict: bool = True) -> dict[int, EliminationTrace]:
    tree = tree or default_tree()
    out = {}
    for s in s_values:
        configs = enumerate_high_configs(s)
        records = []
        gaps = []
        for cfg in configs:
            f = Facts(cfg)
            reached, problems = classify(tree, f)
            base = {"s": s, "ws": None, "wt": list(cfg.wt)}
            if problems or not reached:
                gaps.append({"wt": list(cfg.wt), "phases": list(cfg.phases), "problems": problems})
                records.append({"id": None, "config": {**base, "caseTags": cfg.tags()},
                                "verdict": {"rule": SURVIVOR, "witness": problems}})
                continue
            node, w = reached[0]
            for sub in node.subcases:
                tags = {**cfg.tags(), "node": node.id, "subcase": sub}
                if f.k is not None and node.id != "parity":
                    tags["sigmaShift"] = f.k
                records.append({"id": None, "config": {**base, "caseTags": tags},
                                "verdict": {"rule": node.rule, "witness": _plain(w)}})
        trace = EliminationTrace(s, records, {"coverageGaps": gaps, "configurations": len(configs)})
        if strict and gaps:
            raise CoverageGap({"gaps": gaps, "overlaps": []})
        out[s] = trace
    return out


def _plain(w):
    return json.loads(json.dumps(w, default=lambda o: sorted(o) if isinstance(o, (set, frozenset)) else str(o)))


def tree_table(tree: list[TreeNode] | None = None) -> list[dict]:
    return [{"id": n.id, "parent": n.parent, "rule": n.rule, "description": n.description,
             "subcases": list(n.subcases) if n.terminal else [], "inherited": n.inherited}
            for n in (tree or default_tree())]
