"""Canonical forms of graph pairs and labelled graphs under the symmetry group.

A pair is turned into an abstract structure on its intersection points:
rotation at the G_S vertex, rotation at the G_T vertex, edge partner, and
the two parallel-family colourings.  Vertex names, slot numbering and the
template's automorphisms then disappear.  The remaining symmetries are
reversing either rotation and, for two-vertex graphs, swapping the roles
of G_S and G_T.  The canonical form is the least breadth-first encoding
over all variants and start points.
"""
from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass

from .graphs import GraphPair, LabelledGraph


@dataclass(frozen=True)
class Symmetry:
    """Reverse the G_S rotation, reverse the G_T rotation, then optionally exchange."""
    mirror_s: bool = False
    mirror_t: bool = False
    exchange: bool = False

    def __matmul__(self, other: "Symmetry") -> "Symmetry":
        # apply other first, then self
        ms, mt = other.mirror_s, other.mirror_t
        if other.exchange:
            a, b = self.mirror_t, self.mirror_s
        else:
            a, b = self.mirror_s, self.mirror_t
        return Symmetry(ms ^ a, mt ^ b, other.exchange ^ self.exchange)


SYMMETRIES = tuple(Symmetry(*bits) for bits in itertools.product((False, True), repeat=3))


@dataclass(frozen=True)
class Structure:
    rot_s: tuple[int, ...]
    rot_t: tuple[int, ...]
    partner: tuple[int, ...]
    fam_s: tuple[int, ...]
    fam_t: tuple[int, ...]

    @property
    def n(self):
        return len(self.partner)

    def apply(self, g: Symmetry) -> "Structure":
        rs, rt = self.rot_s, self.rot_t
        if g.mirror_s:
            rs = _inverse(rs)
        if g.mirror_t:
            rt = _inverse(rt)
        if g.exchange:
            return Structure(rt, rs, self.partner, self.fam_t, self.fam_s)
        return Structure(rs, rt, self.partner, self.fam_s, self.fam_t)

    def relabel(self, perm) -> "Structure":
        """Rename point x as perm[x]."""
        n = self.n
        inv = [0] * n
        for x, y in enumerate(perm):
            inv[y] = x

        def conj(f):
            return tuple(perm[f[inv[y]]] for y in range(n))

        return Structure(conj(self.rot_s), conj(self.rot_t), conj(self.partner),
                         tuple(self.fam_s[inv[y]] for y in range(n)),
                         tuple(self.fam_t[inv[y]] for y in range(n)))


def _inverse(f):
    inv = [0] * len(f)
    for a, b in enumerate(f):
        inv[b] = a
    return tuple(inv)


def pair_structure(p: GraphPair) -> Structure:
    gs, gt, phi, inv = p.gs, p.gt, p.phi, p.phi_inv
    n = len(phi)
    cls_s = sorted({e.cls for e in gs.edges})
    cls_t = sorted({e.cls for e in gt.edges})
    return Structure(
        tuple(gs.next_ccw(x) for x in range(n)),
        tuple(inv[gt.next_ccw(phi[x])] for x in range(n)),
        tuple(gs.other_end(x) for x in range(n)),
        tuple(cls_s.index(gs.edges[gs.slot_edge[x]].cls) for x in range(n)),
        tuple(cls_t.index(gt.edges[gt.slot_edge[phi[x]]].cls) for x in range(n)),
    )


def _encode(st: Structure, start: int) -> tuple | None:
    gens = (st.rot_s, st.rot_t, st.partner)
    idx = {start: 0}
    order = [start]
    fs, ft = {}, {}
    code = []
    i = 0
    while i < len(order):
        x = order[i]
        for g in gens:
            y = g[x]
            if y not in idx:
                idx[y] = len(order)
                order.append(y)
            code.append(idx[y])
        code.append(fs.setdefault(st.fam_s[x], len(fs)))
        code.append(ft.setdefault(st.fam_t[x], len(ft)))
        i += 1
    if len(order) != st.n:
        return None
    return tuple(code)


def _family_sizes(fam):
    size = {}
    for f in fam:
        size[f] = size.get(f, 0) + 1
    return [size[f] for f in fam]


def structure_form(st: Structure, allow_exchange: bool = True) -> tuple:
    best = None
    for g in SYMMETRIES:
        if g.exchange and not allow_exchange:
            continue
        v = st.apply(g)
        # only start from points with the least (family size, family size) invariant
        ss, tt = _family_sizes(v.fam_s), _family_sizes(v.fam_t)
        inv = [(ss[x], tt[x]) for x in range(v.n)]
        m = min(inv)
        for x in range(v.n):
            if inv[x] != m:
                continue
            code = _encode(v, x)
            if code is None:
                # disconnected structures are compared componentwise
                code = _components_code(v)
            if best is None or code < best:
                best = code
    return best


def _components_code(st: Structure) -> tuple:
    seen, comps = set(), []
    for x in range(st.n):
        if x in seen:
            continue
        stack, comp = [x], {x}
        while stack:
            y = stack.pop()
            for g in (st.rot_s, st.rot_t, st.partner):
                if g[y] not in comp:
                    comp.add(g[y])
                    stack.append(g[y])
        seen |= comp
        pts = sorted(comp)
        where = {y: i for i, y in enumerate(pts)}
        sub = Structure(*(tuple(where[g[y]] for y in pts) for g in (st.rot_s, st.rot_t, st.partner)),
                        tuple(st.fam_s[y] for y in pts), tuple(st.fam_t[y] for y in pts))
        comps.append(min(_encode(sub, y) for y in range(len(pts))))
    return (-1,) + tuple(itertools.chain.from_iterable(sorted(comps)))


def canonical_form(p: GraphPair) -> tuple:
    exch = p.gs.n_vertices == p.gt.n_vertices
    return structure_form(pair_structure(p), allow_exchange=exch)


def canonical_id(form) -> str:
    return hashlib.sha256(repr(form).encode()).hexdigest()[:16]


def pair_id(p: GraphPair) -> str:
    return canonical_id(canonical_form(p))


def structures_isomorphic(a: Structure, b: Structure, allow_exchange: bool = True) -> bool:
    """Direct isomorphism search, independent of the encoding used for canonical forms."""
    if a.n != b.n:
        return False
    for g in SYMMETRIES:
        if g.exchange and not allow_exchange:
            continue
        v = a.apply(g)
        for y0 in range(b.n):
            f = {0: y0}
            fam_map_s, fam_map_t = {}, {}
            stack, ok = [0], True
            while stack and ok:
                x = stack.pop()
                y = f[x]
                if fam_map_s.setdefault(v.fam_s[x], b.fam_s[y]) != b.fam_s[y] or \
                        fam_map_t.setdefault(v.fam_t[x], b.fam_t[y]) != b.fam_t[y]:
                    ok = False
                    break
                for ga, gb in ((v.rot_s, b.rot_s), (v.rot_t, b.rot_t), (v.partner, b.partner)):
                    if ga[x] in f:
                        if f[ga[x]] != gb[y]:
                            ok = False
                            break
                    else:
                        f[ga[x]] = gb[y]
                        stack.append(ga[x])
            if ok and len(f) == a.n and len(set(f.values())) == a.n and \
                    len(set(fam_map_s.values())) == len(fam_map_s) and \
                    len(set(fam_map_t.values())) == len(fam_map_t):
                return True
    return False


# -- labelled graphs without a bijection -------------------------------------------

def labelled_graph_form(g: LabelledGraph) -> tuple:
    """Least encoding over start slots, rotation reversal and relabelling of partner vertices.

    Partner relabelling is restricted to the maps that keep label words valid:
    rotations and reflections of 1..t.
    """
    n = len(g.slot_edge)
    rot = tuple(g.next_ccw(x) for x in range(n))
    partner = tuple(g.other_end(x) for x in range(n))
    fam = [e.cls for e in g.edges]
    fam_of = [fam[g.slot_edge[x]] for x in range(n)]
    parity = [g.slot_vertex[x] % 2 for x in range(n)]
    t = g.t
    relabels = [lambda l, a=a, r=r: (r * (l - 1) + a) % t for a in range(t) for r in (1, -1)]
    best = None
    for mirror in (False, True):
        r = _inverse(rot) if mirror else rot
        for rl in relabels:
            lab = [rl(g.slot_label[x]) for x in range(n)]
            for start in range(n):
                idx = {start: 0}
                order = [start]
                fmap, pmap = {}, {}
                code = []
                i = 0
                while i < len(order):
                    x = order[i]
                    for gen in (r, partner):
                        y = gen[x]
                        if y not in idx:
                            idx[y] = len(order)
                            order.append(y)
                        code.append(idx[y])
                    code.append(fmap.setdefault(fam_of[x], len(fmap)))
                    code.append(pmap.setdefault(parity[x], len(pmap)))
                    code.append(lab[x])
                    i += 1
                code = tuple(code)
                if best is None or code < best:
                    best = code
    return best


def labelled_pair_form(gs: LabelledGraph, gt: LabelledGraph) -> tuple:
    a, b = labelled_graph_form(gs), labelled_graph_form(gt)
    if gs.n_vertices == gt.n_vertices:
        return tuple(sorted((a, b)))
    return (a, b)


# -- explicit symmetries in template coordinates -------------------------------------

def _corner_index(g: LabelledGraph):
    """slot -> (vertex, corner index, index inside the corner)."""
    out = []
    tpl, x = g.template, g.weights.x
    for v, word in enumerate(tpl.corner_words):
        for i, c in enumerate(word):
            for q in range(tpl.weight_of(c.cls, x)):
                out.append((v, i, q))
    return out


def map_graph(g: LabelledGraph, aut, relabel=None) -> tuple[LabelledGraph, list[int]]:
    """Image of g under a template automorphism, with labels optionally renamed.

    aut is (vertex map, dart map, sign) as produced by template_automorphisms
    with darts included; returns the new graph and the old-slot -> new-slot map.
    """
    from .template import TorusTemplate  # noqa: F401
    vmap, dmap, sign = aut
    tpl = g.template
    slots = dict(tpl.weight_slots)
    new_x = list(g.weights.x)
    for v, word in enumerate(tpl.corner_words):
        for i, c in enumerate(word):
            w, j = dmap[(v, i)]
            new_x[slots[tpl.corner_words[w][j].cls] - 1] = g.weights.x[slots[c.cls] - 1]
    from .graphs import WeightVector
    wv = WeightVector(g.weights.s, tuple(new_x))
    probe = LabelledGraph(tpl, wv, g.side, (0,) * g.n_vertices)
    start = {}
    for x, (v, i, q) in enumerate(_corner_index(probe)):
        start.setdefault((v, i), x)
    smap = []
    for x, (v, i, q) in enumerate(_corner_index(g)):
        w, j = dmap[(v, i)]
        k = tpl.weight_of(tpl.corner_words[v][i].cls, g.weights.x)
        smap.append(start[(w, j)] + (q if sign == 1 else k - 1 - q))
    lab = [0] * len(smap)
    for x, y in enumerate(smap):
        l = g.slot_label[x]
        lab[y] = relabel(l) if relabel else l
    phases, dirs = [], []
    t = g.t
    for w in range(g.n_vertices):
        base = w * g.valence
        for d in (1, -1):
            ph = lab[base] - 1
            if all(lab[base + p] == 1 + (ph + d * p) % t for p in range(g.valence)):
                phases.append(ph)
                dirs.append(d)
                break
        else:
            raise ValueError("image labels are not a valid label word")
    if t == 2:
        dirs = [1] * g.n_vertices
    out = LabelledGraph(tpl, wv, g.side, tuple(phases), tuple(dirs))
    assert list(out.slot_label) == lab
    return out, smap


def dart_automorphisms(template):
    """Template automorphisms as (vertex map, dart map, sign)."""
    from .template import _dart_partner
    partner = _dart_partner(template)
    darts = template.darts()
    nxt = {(v, i): (v, (i + 1) % len(template.corner_words[v])) for v, i in darts}
    prv = {b: a for a, b in nxt.items()}
    out = []
    for sign, rot in ((1, nxt), (-1, prv)):
        for d0 in darts:
            f = {darts[0]: d0}
            stack, ok = [darts[0]], True
            while stack and ok:
                x = stack.pop()
                for a, b in ((nxt, rot), (partner, partner)):
                    y, fy = a[x], b[f[x]]
                    if y in f:
                        if f[y] != fy:
                            ok = False
                            break
                    else:
                        f[y] = fy
                        stack.append(y)
            if ok and len(set(f.values())) == len(darts) == len(f):
                vmap = {v: f[(v, 0)][0] for v in range(template.n_vertices)}
                out.append((vmap, f, sign))
    return out


def transform_pair(p: GraphPair, aut_s=None, aut_t=None, exchange: bool = False) -> GraphPair:
    """Apply template automorphisms to G_S and G_T, then optionally exchange the roles."""
    gs, gt = p.gs, p.gt
    ident_s = ({v: v for v in range(gs.n_vertices)}, {d: d for d in gs.template.darts()}, 1)
    ident_t = ({v: v for v in range(gt.n_vertices)}, {d: d for d in gt.template.darts()}, 1)
    aut_s, aut_t = aut_s or ident_s, aut_t or ident_t
    # G_S labels name G_T vertices and vice versa
    gs2, ms = map_graph(gs, aut_s, relabel=lambda l: aut_t[0][l - 1] + 1)
    gt2, mt = map_graph(gt, aut_t, relabel=lambda l: aut_s[0][l - 1] + 1)
    phi = [0] * len(p.phi)
    for x, y in enumerate(p.phi):
        phi[ms[x]] = mt[y]
    q = GraphPair(gs2, gt2, tuple(phi))
    if exchange:
        a = LabelledGraph(gt2.template, gt2.weights, "S", gt2.phases, gt2.directions)
        b = LabelledGraph(gs2.template, gs2.weights, "T", gs2.phases, gs2.directions)
        q = GraphPair(a, b, q.phi_inv)
    return q.validate()


def oriented_form(p: GraphPair) -> tuple:
    """Canonical form under everything except the G_S/G_T exchange."""
    return structure_form(pair_structure(p), allow_exchange=False)


def labelled_pair_oriented_form(gs: LabelledGraph, gt: LabelledGraph) -> tuple:
    return (labelled_graph_form(gs), labelled_graph_form(gt))
