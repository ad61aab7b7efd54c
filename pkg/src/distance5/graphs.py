"""Labelled intersection graphs on a torus template and matched graph pairs.

Slots are integers: vertex v owns slots v*valence .. (v+1)*valence - 1 in
counterclockwise order.  Vertex index k stands for u_{k+1} (or v_{k+1}),
so its parity is (k + 1) % 2.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator

from .template import TorusTemplate, default_template


class DomainError(ValueError):
    pass


class IncompatiblePair(ValueError):
    pass


@dataclass(frozen=True, order=True)
class WeightVector:
    """x1 is the loop weight at each vertex; x2..x5 are the non-loop classes."""
    s: int
    x: tuple[int, ...]

    def __post_init__(self):
        if len(self.x) != 5 or min(self.x) < 0:
            raise ValueError(f"bad weights {self.x}")
        if 2 * self.x[0] + sum(self.x[1:]) != 5 * self.s:
            raise ValueError(f"valence identity fails: 2*{self.x[0]} + {sum(self.x[1:])} != {5 * self.s}")

    @property
    def edges(self) -> int:
        # two vertices, each carrying x1 loops
        return 2 * self.x[0] + sum(self.x[1:])

    def __str__(self):
        return "G(" + ",".join(map(str, self.x)) + ")"


def enumerate_weight_vectors(s: int, side: str) -> list[WeightVector]:
    """All weight vectors meeting the valence identity and the side's family bounds.

    Side S (two-vertex G_S, partner with s = 2 vertices): loops <= 3, other
    families <= 2.  Side T: loops <= s/2 + 1 when s >= 4, other families <= s.
    """
    if s < 2 or s % 2:
        raise DomainError(f"s must be an even integer >= 2, got {s}")
    if side == "S":
        if s != 2:
            raise DomainError("a two-vertex G_S only arises when G_T also has two vertices (s = 2)")
        loop_max, other_max = 3, 2
    elif side == "T":
        loop_max = s // 2 + 1 if s >= 4 else 5 * s // 2
        other_max = s
    else:
        raise DomainError(f"side must be S or T, got {side!r}")
    out = []
    for x1 in range(loop_max + 1):
        rest = 5 * s - 2 * x1
        for r in itertools.product(range(other_max + 1), repeat=4):
            if sum(r) == rest:
                out.append(WeightVector(s, (x1,) + r))
    return out


@dataclass(frozen=True)
class Edge:
    id: int
    cls: str
    rank: int
    ends: tuple[int, int]  # (slot at endA, slot at endB)


class LabelledGraph:
    """A weighted template with a label word at every vertex.

    t is the partner graph's vertex count; the label at slot p of vertex v is
    1 + ((phase[v] + direction[v] * p) mod t).
    """

    def __init__(self, template: TorusTemplate, weights: WeightVector, side: str,
                 phases: tuple[int, ...], directions: tuple[int, ...] | None = None):
        self.template = template
        self.weights = weights
        self.side = side
        self.t = weights.s
        self.phases = tuple(phases)
        self.directions = tuple(directions) if directions else (1,) * template.n_vertices
        self.n_vertices = template.n_vertices
        self.valence = 5 * self.t
        self._expand()

    def _expand(self):
        tpl, x = self.template, self.weights.x
        slot_edge: list[int] = []
        slot_vertex: list[int] = []
        ends: dict[tuple[str, int], list[int | None]] = {}
        for c in tpl.classes:
            k = tpl.weight_of(c.id, x)
            for r in range(k):
                ends[(c.id, r)] = [None, None]
        keys = sorted(ends, key=lambda k: ([c.id for c in tpl.classes].index(k[0]), k[1]))
        index = {k: i for i, k in enumerate(keys)}
        pending = []
        for v, word in enumerate(tpl.corner_words):
            for corner in word:
                k = tpl.weight_of(corner.cls, x)
                # a parallel family runs 0..k-1 ccw at endA and k-1..0 ccw at endB
                ranks = range(k) if corner.end == 0 else range(k - 1, -1, -1)
                for r in ranks:
                    slot = len(slot_edge)
                    slot_edge.append(index[(corner.cls, r)])
                    slot_vertex.append(v)
                    ends[(corner.cls, r)][corner.end] = slot
            if len(slot_edge) != (v + 1) * self.valence:
                raise ValueError(f"vertex {v} has valence {len(slot_edge) - v * self.valence}, "
                                 f"expected {self.valence}")
        self.edges = tuple(Edge(i, k[0], k[1], tuple(ends[k])) for i, k in enumerate(keys))
        self.slot_edge = tuple(slot_edge)
        self.slot_vertex = tuple(slot_vertex)
        self.slot_label = tuple(
            1 + (self.phases[v] + self.directions[v] * (p % self.valence)) % self.t
            for p, v in enumerate(slot_vertex))

    # -- structure -----------------------------------------------------------
    def other_end(self, slot: int) -> int:
        a, b = self.edges[self.slot_edge[slot]].ends
        return b if slot == a else a

    def next_ccw(self, slot: int) -> int:
        v = self.slot_vertex[slot]
        return v * self.valence + (slot - v * self.valence + 1) % self.valence

    def position(self, slot: int) -> int:
        return slot % self.valence

    def vertex_slots(self, v: int) -> range:
        return range(v * self.valence, (v + 1) * self.valence)

    def is_positive(self, e: Edge) -> bool:
        u, w = (self.slot_vertex[s] for s in e.ends)
        return (u - w) % 2 == 0

    def edge_labels(self, e: Edge) -> tuple[int, int]:
        return tuple(self.slot_label[s] for s in e.ends)

    @cached_property
    def families(self) -> dict[str, tuple[Edge, ...]]:
        fam: dict[str, list[Edge]] = {}
        for e in self.edges:
            fam.setdefault(e.cls, []).append(e)
        return {k: tuple(sorted(v, key=lambda e: e.rank)) for k, v in fam.items()}

    def label_word(self, v: int) -> tuple[int, ...]:
        return tuple(self.slot_label[s] for s in self.vertex_slots(v))

    def tag(self, e: Edge, from_slot: int) -> tuple[int, int]:
        """Displacement of e traversed starting at from_slot."""
        tx, ty = self.template.cls(e.cls).tag
        return (tx, ty) if from_slot == e.ends[0] else (-tx, -ty)

    def key(self):
        return (self.side, self.weights.x, self.phases, self.directions)

    def __repr__(self):
        return f"LabelledGraph({self.side}, {self.weights}, phases={self.phases})"


def check_label_words(g: LabelledGraph) -> bool:
    """Every vertex reads (1..t) five times up to rotation and reflection."""
    for v in range(g.n_vertices):
        w = g.label_word(v)
        base = tuple(range(1, g.t + 1)) * 5
        rev = tuple(reversed(base))
        if not any(w[i:] + w[:i] in (base, rev) for i in range(len(w))):
            return False
    return True


@dataclass(frozen=True)
class GraphPair:
    """G_S and G_T with the bijection phi from G_S slots to G_T slots."""
    gs: LabelledGraph
    gt: LabelledGraph
    phi: tuple[int, ...]

    multiplicity = 5
    jumping_number = 2

    @cached_property
    def phi_inv(self) -> tuple[int, ...]:
        inv = [0] * len(self.phi)
        for a, b in enumerate(self.phi):
            inv[b] = a
        return tuple(inv)

    @cached_property
    def edge_map(self) -> tuple[int, ...]:
        """G_S edge id -> G_T edge id."""
        return tuple(self.gt.slot_edge[self.phi[e.ends[0]]] for e in self.gs.edges)

    def validate(self):
        gs, gt, phi = self.gs, self.gt, self.phi
        if sorted(phi) != list(range(len(gt.slot_edge))) or len(phi) != len(gs.slot_edge):
            raise ValueError("phi is not a bijection of slots")
        for x, y in enumerate(phi):
            if (gt.slot_vertex[y] + 1, gt.slot_label[y]) != (gs.slot_label[x], gs.slot_vertex[x] + 1):
                raise ValueError(f"duality fails at slot {x}")
        for e in gs.edges:
            a, b = (phi[s] for s in e.ends)
            if gt.other_end(a) != b:
                raise ValueError(f"edge {e.id} does not map onto a single edge")
        return self

    def key(self):
        return (self.gs.key(), self.gt.key(), self.phi)

    def exchanged(self) -> "GraphPair":
        return GraphPair(self.gt, self.gs, self.phi_inv)


def assemble_pairs(ws: WeightVector, wt: WeightVector, template: TorusTemplate | None = None,
                   gs_phases=None, gt_phases=None) -> Iterator[GraphPair]:
    """Every duality-consistent pair for two-vertex G_S and G_T, with no filtering."""
    template = template or default_template()
    if ws.edges != wt.edges or ws.s != 2 or wt.s != 2:
        raise IncompatiblePair(f"edge totals {ws.edges} and {wt.edges} do not match for two-vertex graphs")
    if ws.edges == 0:
        return
    phase_set = list(itertools.product(range(2), repeat=2))
    for ps in gs_phases or phase_set:
        gs = LabelledGraph(template, ws, "S", ps)
        for pt in gt_phases or phase_set:
            gt = LabelledGraph(template, wt, "T", pt)
            yield from bijections(gs, gt)


def bijections(gs: LabelledGraph, gt: LabelledGraph) -> Iterator[GraphPair]:
    """Backtrack over slot bijections that respect duality and carry edges to edges."""
    # a G_S slot of type (vertex i, label j) must go to a G_T slot of type (vertex j, label i)
    def stype(x):
        return (gs.slot_vertex[x], gs.slot_label[x] - 1)

    def ttype(y):
        return (gt.slot_label[y] - 1, gt.slot_vertex[y])

    by_type: dict[tuple, list[int]] = {}
    for f in gt.edges:
        by_type.setdefault(tuple(sorted(ttype(y) for y in f.ends)), []).append(f.id)
    order = list(gs.edges)
    phi = [-1] * len(gs.slot_edge)
    used = [False] * len(gt.edges)

    def rec(i):
        if i == len(order):
            yield GraphPair(gs, gt, tuple(phi))
            return
        e = order[i]
        x, y = e.ends
        for fid in by_type.get(tuple(sorted((stype(x), stype(y)))), ()):
            if used[fid]:
                continue
            a, b = gt.edges[fid].ends
            for X, Y in ((a, b), (b, a)):
                if ttype(X) != stype(x) or ttype(Y) != stype(y):
                    continue
                used[fid] = True
                phi[x], phi[y] = X, Y
                yield from rec(i + 1)
                used[fid] = False
            phi[x] = phi[y] = -1

    yield from rec(0)


@dataclass(frozen=True)
class EdgeClassification:
    s_edge: int
    t_edge: int
    sign_s: str
    sign_t: str
    labels_s: tuple[int, int]
    labels_t: tuple[int, int]


def classify_edges(p: GraphPair) -> list[EdgeClassification]:
    out = []
    for e, fid in zip(p.gs.edges, p.edge_map):
        f = p.gt.edges[fid]
        out.append(EdgeClassification(
            e.id, fid, "+" if p.gs.is_positive(e) else "-", "+" if p.gt.is_positive(f) else "-",
            p.gs.edge_labels(e), p.gt.edge_labels(f)))
    return out
