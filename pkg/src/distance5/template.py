"""Reduced-graph templates: fat graphs on the torus with weighted edge classes."""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from pathlib import Path


class MalformedTemplate(ValueError):
    pass


class EmbeddingError(ValueError):
    pass


@dataclass(frozen=True)
class EdgeClass:
    id: str
    end_a: int
    end_b: int
    tag: tuple[int, int]

    @property
    def is_loop(self) -> bool:
        return self.end_a == self.end_b


@dataclass(frozen=True)
class Corner:
    """One occurrence of a class in a vertex's corner word; end is 0 (endA) or 1 (endB)."""
    cls: str
    end: int


@dataclass(frozen=True)
class TorusTemplate:
    name: str
    n_vertices: int
    classes: tuple[EdgeClass, ...]
    corner_words: tuple[tuple[Corner, ...], ...]
    weight_slots: tuple[tuple[str, int], ...]  # class id -> index into a weight vector

    def cls(self, cid: str) -> EdgeClass:
        for c in self.classes:
            if c.id == cid:
                return c
        raise KeyError(cid)

    def weight_of(self, cid: str, x: tuple[int, ...]) -> int:
        return x[dict(self.weight_slots)[cid] - 1]

    def darts(self) -> list[tuple[int, int]]:
        """(vertex, position) for every corner occurrence."""
        return [(v, i) for v, w in enumerate(self.corner_words) for i in range(len(w))]

    def euler_characteristic(self) -> int:
        return self.n_vertices - len(self.classes) + len(rotation_faces(self))

    def genus(self) -> int:
        return (2 - self.euler_characteristic()) // 2


def _dart_partner(t: TorusTemplate) -> dict[tuple[int, int], tuple[int, int]]:
    where = {}
    for v, word in enumerate(t.corner_words):
        for i, c in enumerate(word):
            where[(c.cls, c.end)] = (v, i)
    return {where[(c.id, e)]: where[(c.id, 1 - e)] for c in t.classes for e in (0, 1)}


def rotation_faces(t: TorusTemplate) -> list[list[tuple[int, int]]]:
    """Faces of the rotation system as orbits of (next corner) o (edge partner)."""
    partner = _dart_partner(t)
    seen, faces = set(), []
    for d in t.darts():
        if d in seen:
            continue
        face, x = [], d
        while x not in seen:
            seen.add(x)
            face.append(x)
            w, i = partner[x]
            x = (w, (i + 1) % len(t.corner_words[w]))
        faces.append(face)
    return faces


def parse_template(doc: dict) -> TorusTemplate:
    try:
        nv = int(doc["vertices"])
        classes = tuple(EdgeClass(str(c["id"]), int(c["endA"]), int(c["endB"]),
                                  tuple(int(v) for v in c["isotopyTag"])) for c in doc["classes"])
        words = []
        for w in doc["cornerWords"]:
            word = []
            for tok in w:
                cid, _, end = str(tok).partition(":")
                word.append((cid, end))
            words.append(word)
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedTemplate(f"bad template field: {exc}") from exc
    if not classes:
        raise EmbeddingError("template has no edge classes, so its graph is disconnected")
    if len(words) != nv:
        raise MalformedTemplate(f"{len(words)} corner words for {nv} vertices")
    by_id = {c.id: c for c in classes}
    if len(by_id) != len(classes):
        raise MalformedTemplate("duplicate class ids")
    corner_words = []
    count = {(c.id, e): 0 for c in classes for e in (0, 1)}
    for v, word in enumerate(words):
        cw = []
        for cid, end in word:
            if cid not in by_id:
                raise MalformedTemplate(f"unknown class {cid!r} at vertex {v}")
            c = by_id[cid]
            if c.is_loop:
                if end not in ("A", "B") or c.end_a != v:
                    raise MalformedTemplate(f"loop {cid} needs an :A or :B marker at vertex {c.end_a}")
                e = 0 if end == "A" else 1
            else:
                if end in ("A", "B"):
                    e = 0 if end == "A" else 1
                elif v == c.end_a:
                    e = 0
                elif v == c.end_b:
                    e = 1
                else:
                    raise MalformedTemplate(f"class {cid} does not touch vertex {v}")
                if (c.end_a, c.end_b)[e] != v:
                    raise MalformedTemplate(f"class {cid} end {end} is not at vertex {v}")
            count[(cid, e)] += 1
            cw.append(Corner(cid, e))
        corner_words.append(tuple(cw))
    bad = [k for k, n in count.items() if n != 1]
    if bad:
        raise MalformedTemplate(f"class ends not listed exactly once: {sorted(bad)}")
    slots = doc.get("weightSlots") or {c.id: i + 1 for i, c in enumerate(classes)}
    t = TorusTemplate(str(doc.get("name", "template")), nv, classes, tuple(corner_words),
                      tuple(sorted((str(k), int(v)) for k, v in slots.items())))
    if not _connected(t):
        raise EmbeddingError("template graph is disconnected")
    if t.genus() != 1:
        raise EmbeddingError(f"rotation system has genus {t.genus()}, expected a torus")
    return t


def _connected(t: TorusTemplate) -> bool:
    reach, stack = {0}, [0]
    while stack:
        v = stack.pop()
        for c in t.classes:
            for a, b in ((c.end_a, c.end_b), (c.end_b, c.end_a)):
                if a == v and b not in reach:
                    reach.add(b)
                    stack.append(b)
    return len(reach) == t.n_vertices


def load_template(path) -> TorusTemplate:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise MalformedTemplate(f"{path}: {exc}") from exc
    return parse_template(doc)


def template_automorphisms(t: TorusTemplate, orientation_reversing: bool = True):
    """Dart permutations preserving edge pairing and rotation (or its reverse).

    Yields (vertex map, class map with end flip, orientation sign).
    """
    partner = _dart_partner(t)
    darts = t.darts()
    nxt = {(v, i): (v, (i + 1) % len(t.corner_words[v])) for v, i in darts}
    prv = {b: a for a, b in nxt.items()}
    found = []
    for sign in ((1, -1) if orientation_reversing else (1,)):
        rot = nxt if sign == 1 else prv
        for d0 in darts:
            # send dart (0, 0) to d0 and propagate
            f = {(0, 0): d0}
            stack, ok = [(0, 0)], True
            while stack and ok:
                x = stack.pop()
                for g_src, g_dst in ((nxt, rot), (partner, partner)):
                    y, fy = g_src[x], g_dst[f[x]]
                    if y in f:
                        ok = f[y] == fy
                        if not ok:
                            break
                    else:
                        f[y] = fy
                        stack.append(y)
            if ok and len(f) == len(darts) and len(set(f.values())) == len(darts):
                found.append((sign, f))
    out = []
    for sign, f in found:
        vmap = {v: f[(v, 0)][0] for v in range(t.n_vertices)}
        cmap = {}
        for v, i in darts:
            c = t.corner_words[v][i]
            w, j = f[(v, i)]
            c2 = t.corner_words[w][j]
            cmap[c.cls] = (c2.cls, c.end != c2.end)
        out.append((vmap, cmap, sign))
    return out


def weight_permutations(t: TorusTemplate) -> list[tuple[int, ...]]:
    """Induced action of the template automorphisms on weight-vector coordinates."""
    slots = dict(t.weight_slots)
    n = max(slots.values())
    perms = set()
    for _, cmap, _ in template_automorphisms(t):
        perm = list(range(n))
        for cid, (cid2, _) in cmap.items():
            perm[slots[cid] - 1] = slots[cid2] - 1
        perms.add(tuple(perm))
    return sorted(perms)


def default_template_path() -> Path:
    from .data import data_dir
    return data_dir() / "figure2.template"


_DEFAULT = None


def default_template() -> TorusTemplate:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = load_template(default_template_path())
    return _DEFAULT
