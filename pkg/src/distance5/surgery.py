"""Surgery descriptions, Rolfsen twists and the knot identification pipeline.

A description is a framed link whose components are unknots in S^3.  One
component (the carrier, K0) is left unfilled; slopes on it are tracked
instead.  The filling coefficient of K2' depends on an unknown slope p/q, so
coefficients are either concrete Slopes or ParamSlopes, i.e. an integer
Mobius map applied to the indeterminate p/q.  Twists act on both kinds by
the same matrices, which lets the whole twist script run symbolically.
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Union

from .data import data_dir
from .slopes import (INFINITY, FramingMap, Slope, distance, linked_twist, normalize,
                     self_twist, slope, solve_pm1)


class IllegalMove(ValueError):
    """Twist along a component that is not known to be unknotted."""


class InconsistencyError(ValueError):
    """A constraint system that should have a unique solution does not."""


class ExcludedSlope(ValueError):
    pass


class ExcludedFamily(ValueError):
    """n = 1 gives the trefoil, which is not hyperbolic."""


class IdentificationFailure(RuntimeError):
    def __init__(self, checkpoint: str, detail: str = ""):
        super().__init__(f"checkpoint {checkpoint!r} failed{': ' + detail if detail else ''}")
        self.checkpoint = checkpoint


# -- coefficients -----------------------------------------------------------

@dataclass(frozen=True)
class ParamSlope:
    """The slope (a p + b q)/(c p + d q) as a function of the free slope p/q."""
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c not in (1, -1):
            raise ValueError("parametric coefficient must be unimodular")

    @classmethod
    def make(cls, a, b, c, d) -> "ParamSlope":
        # M and -M give the same slope; keep (c, d) lexicographically positive
        if (c, d) < (0, 0):
            a, b, c, d = -a, -b, -c, -d
        return cls(a, b, c, d)

    @property
    def matrix(self) -> FramingMap:
        return FramingMap(self.a, self.b, self.c, self.d)

    def at(self, p: int, q: int) -> Slope:
        return normalize(self.a * p + self.b * q, self.c * p + self.d * q)

    def self_twist(self, t: int) -> "ParamSlope":
        return self._lmul(FramingMap(1, 0, t, 1))

    def add(self, m: int) -> "ParamSlope":
        return self._lmul(FramingMap(1, m, 0, 1))

    def _lmul(self, m: FramingMap) -> "ParamSlope":
        r = m @ self.matrix
        return ParamSlope.make(r.a, r.b, r.c, r.d)

    def __str__(self):
        return f"({_lin(self.a, self.b)})/({_lin(self.c, self.d)})"

    def to_json(self):
        return {"param": [self.a, self.b, self.c, self.d]}


Coefficient = Union[Slope, ParamSlope]


def _lin(a: int, b: int) -> str:
    parts = []
    for k, v in ((a, "p"), (b, "q")):
        if k == 0:
            continue
        mag = "" if abs(k) == 1 else str(abs(k))
        parts.append(("-" if k < 0 else "+") + mag + v)
    s = "".join(parts) or "0"
    return s[1:] if s.startswith("+") else s


def _coeff_twist(c: Coefficient, t: int) -> Coefficient:
    return c.self_twist(t) if isinstance(c, ParamSlope) else self_twist(c, t)


def _coeff_linked(c: Coefficient, t: int, l: int) -> Coefficient:
    if isinstance(c, ParamSlope):
        return c.add(t * l * l)
    return linked_twist(c, t, l)


def _read_coeff(x) -> Coefficient:
    if isinstance(x, dict):
        return ParamSlope.make(*x["param"])
    return slope(x)


def _write_coeff(c: Coefficient):
    return c.to_json()


# -- descriptions -----------------------------------------------------------

@dataclass(frozen=True)
class SurgeryDescription:
    components: tuple[str, ...]
    carrier: str
    coefficients: tuple[tuple[str, Coefficient], ...]
    linking: tuple[tuple[int, ...], ...]
    tracked: tuple[tuple[str, Slope], ...]
    unknotted: frozenset[str]
    name: str = ""

    def __post_init__(self):
        n = len(self.components)
        L = self.linking
        if len(L) != n or any(len(r) != n for r in L):
            raise ValueError("linking matrix has the wrong shape")
        for i in range(n):
            if L[i][i] != 0:
                raise ValueError("linking matrix must have zero diagonal")
            for j in range(i):
                if L[i][j] != L[j][i]:
                    raise ValueError("linking matrix must be symmetric")
        if self.carrier not in self.components:
            raise ValueError("carrier is not a component")
        for k, _ in self.coefficients:
            if k not in self.components or k == self.carrier:
                raise ValueError(f"coefficient on unknown or carrier component {k}")

    def index(self, k: str) -> int:
        try:
            return self.components.index(k)
        except ValueError:
            raise KeyError(f"no component {k!r}") from None

    def lk(self, a: str, b: str) -> int:
        return self.linking[self.index(a)][self.index(b)]

    def coefficient(self, k: str) -> Coefficient:
        return dict(self.coefficients)[k]

    def slope_of(self, name: str) -> Slope:
        return dict(self.tracked)[name]

    def fillings(self) -> dict[str, Coefficient]:
        """Components that are still filled, i.e. whose coefficient is not 1/0."""
        return {k: c for k, c in self.coefficients if c != INFINITY}

    def with_tracked(self, **slopes) -> "SurgeryDescription":
        tr = dict(self.tracked)
        tr.update({k: slope(v) for k, v in slopes.items()})
        return _replace(self, tracked=tuple(sorted(tr.items())))

    def instantiate(self, p: int, q: int) -> "SurgeryDescription":
        co = tuple((k, c.at(p, q) if isinstance(c, ParamSlope) else c) for k, c in self.coefficients)
        return _replace(self, coefficients=co)

    def restrict(self, keep) -> "SurgeryDescription":
        keep = [k for k in self.components if k in set(keep) | {self.carrier}]
        idx = [self.index(k) for k in keep]
        return SurgeryDescription(
            tuple(keep), self.carrier,
            tuple((k, c) for k, c in self.coefficients if k in keep),
            tuple(tuple(self.linking[i][j] for j in idx) for i in idx),
            self.tracked, frozenset(self.unknotted) & set(keep), self.name)

    def to_json(self) -> dict:
        n = len(self.components)
        return {
            "name": self.name, "components": list(self.components), "carrier": self.carrier,
            "coefficients": {k: _write_coeff(c) for k, c in self.coefficients},
            "tracked": {k: v.to_json() for k, v in self.tracked},
            "unknotted": sorted(self.unknotted),
            "linking": [[self.components[i], self.components[j], self.linking[i][j]]
                        for i in range(n) for j in range(i + 1, n)],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "SurgeryDescription":
        comps = tuple(doc["components"])
        n = len(comps)
        L = [[0] * n for _ in range(n)]
        for a, b, v in doc.get("linking", []):
            i, j = comps.index(a), comps.index(b)
            if i == j:
                raise ValueError("self-linking entry")
            L[i][j] = L[j][i] = int(v)
        coeffs = tuple((k, _read_coeff(v)) for k, v in doc["coefficients"].items())
        tracked = tuple(sorted((k, slope(v)) for k, v in doc.get("tracked", {}).items()))
        return cls(comps, doc.get("carrier", comps[0]), coeffs, tuple(map(tuple, L)), tracked,
                   frozenset(doc.get("unknotted", [])), doc.get("name", ""))


def _replace(d: SurgeryDescription, **kw) -> SurgeryDescription:
    fields = dict(components=d.components, carrier=d.carrier, coefficients=d.coefficients,
                  linking=d.linking, tracked=d.tracked, unknotted=d.unknotted, name=d.name)
    fields.update(kw)
    return SurgeryDescription(**fields)


def load_description(name: str) -> SurgeryDescription:
    path = Path(data_dir()) / name
    return SurgeryDescription.from_json(json.loads(path.read_text()))


def initial_description(p: int | None = None, q: int | None = None) -> SurgeryDescription:
    """The starting description; symbolic in p/q unless both are given."""
    d = load_description("figure10.surgery")
    if p is None and q is None:
        return d
    if p is None or q is None:
        raise TypeError("give both p and q, or neither")
    if normalize(p, q) == Slope(0, 1):
        raise ExcludedSlope("the filling slope p/q = 0/1 is excluded")
    return d.instantiate(p, q)


# -- twist scripts ----------------------------------------------------------

_TURN = re.compile(r"^n([+-]\d+)?$")


@dataclass(frozen=True)
class TwistScript:
    """Ordered (component, turns) steps; turns may be 'n', 'n-1', ... until bound."""
    steps: tuple[tuple[str, Union[int, str]], ...]
    name: str = ""
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    @classmethod
    def load(cls, name: str) -> "TwistScript":
        doc = json.loads((Path(data_dir()) / name).read_text())
        steps = tuple((c, t if isinstance(t, str) else int(t)) for c, t in doc["steps"])
        meta = {k: v for k, v in doc.items() if k not in ("steps", "name")}
        return cls(steps, doc.get("name", name), meta)

    def bind(self, n: int) -> "TwistScript":
        return TwistScript(tuple((c, symbolic_turn(t)(n) if isinstance(t, str) else t)
                                 for c, t in self.steps), self.name, self.meta)

    def concrete_prefix(self) -> "TwistScript":
        """Steps before the first symbolic turn."""
        out = []
        for c, t in self.steps:
            if isinstance(t, str):
                break
            out.append((c, t))
        return TwistScript(tuple(out), self.name + ":prefix", self.meta)

    def inverse(self) -> "TwistScript":
        return TwistScript(tuple((c, -t) for c, t in reversed(self.steps)), self.name + ":inverse")

    def __len__(self):
        return len(self.steps)


def symbolic_turn(t: str):
    m = _TURN.match(t.replace(" ", ""))
    if not m:
        raise ValueError(f"unreadable symbolic turn {t!r}")
    off = int(m.group(1) or 0)
    return lambda n: n + off


def twist(d: SurgeryDescription, comp: str, t: int) -> SurgeryDescription:
    """One Rolfsen twist of t full turns along comp."""
    if comp not in d.unknotted:
        raise IllegalMove(f"{comp} is not flagged unknotted")
    if not isinstance(t, int):
        raise TypeError("bind symbolic turns before running a script")
    c = d.index(comp)
    n = len(d.components)
    L = d.linking
    coeffs = []
    for k, v in d.coefficients:
        if k == comp:
            coeffs.append((k, _coeff_twist(v, t)))
        else:
            coeffs.append((k, _coeff_linked(v, t, L[d.index(k)][c])))
    if comp == d.carrier:
        tracked = tuple((k, self_twist(s, t)) for k, s in d.tracked)
    else:
        l0 = L[d.index(d.carrier)][c]
        tracked = tuple((k, linked_twist(s, t, l0)) for k, s in d.tracked)
    newL = [list(r) for r in L]
    for i in range(n):
        for j in range(n):
            if i != j and c not in (i, j):
                newL[i][j] = L[i][j] + t * L[i][c] * L[j][c]
    return _replace(d, coefficients=tuple(coeffs), tracked=tracked,
                    linking=tuple(map(tuple, newL)))


def run_twist_script(d: SurgeryDescription, script: TwistScript) -> SurgeryDescription:
    for comp, t in script.steps:
        d = twist(d, comp, t)
    return d


# -- closed-form pieces -----------------------------------------------------

CASES = ("A", "B")


def _case(tag: str) -> str:
    if tag not in CASES:
        raise ValueError(f"case must be A or B, got {tag!r}")
    return tag


def meridian_solve(alpha, beta, case: str, bound: int = 100) -> Slope:
    """The unique m/n with the case's distances to alpha and beta.

    Case A has alpha non-integral: distances (2, 1).  Case B swaps them.
    """
    alpha, beta = slope(alpha), slope(beta)
    da, db = (2, 1) if _case(case) == "A" else (1, 2)
    sols = meridian_candidates(alpha, beta, da, db, bound)
    if len(sols) != 1:
        raise InconsistencyError(f"case {case}: {len(sols)} meridian candidates within bound {bound}")
    return sols[0]


def meridian_candidates(alpha: Slope, beta: Slope, da: int, db: int, bound: int) -> list[Slope]:
    out = []
    for m in range(-bound, bound + 1):
        for n in range(0, bound + 1):
            if math.gcd(m, n) != 1 or (n == 0 and m != 1):
                continue
            s = Slope(m, n)
            if distance(s, alpha) == da and distance(s, beta) == db:
                out.append(s)
    return out


def framing_constraint(case: str, p: int, q: int) -> tuple[bool, int]:
    if _case(case) == "A":
        e = 4 * p + 3 * q
        return abs(e) == 1, e * (3 * p + 2 * q)
    e = 4 * q - 3 * p
    return abs(e) == 1, -e * (q - p) + 1


@dataclass(frozen=True)
class AffineSlope:
    """The slope k*n + c for an integer parameter n."""
    k: int
    c: Fraction

    def at(self, n: int) -> Slope:
        return slope(Fraction(self.k * n) + self.c)

    def __str__(self):
        if self.c == 0:
            return f"{self.k}n"
        sign = "-" if self.c < 0 else "+"
        return f"{self.k}n{sign}{abs(self.c)}"


FINAL = {"A": (AffineSlope(25, Fraction(-37, 2)), AffineSlope(25, Fraction(-16))),
         "B": (AffineSlope(25, Fraction(-16)), AffineSlope(25, Fraction(-37, 2)))}


def final_slopes(n: int, case: str) -> tuple[Slope, Slope]:
    if n == 1:
        raise ExcludedFamily("n = 1 gives k(2,-1,1,0), the trefoil, which is not hyperbolic")
    a, b = FINAL[_case(case)]
    return a.at(n), b.at(n)


def toroidal_slope_set(n: int) -> tuple[tuple[Slope, ...], dict[tuple[Slope, Slope], int]]:
    """The three slopes 25n-20, 25n-37/2, 25n-16 and their pairwise distances."""
    s = Fraction(25 * n - 18)
    pts = (slope(s - 2), slope(s - Fraction(1, 2)), slope(s + 2))
    dist = {(a, b): distance(a, b) for i, a in enumerate(pts) for b in pts[i + 1:]}
    return pts, dist


# -- identification ---------------------------------------------------------

@dataclass(frozen=True)
class Checkpoint:
    name: str
    expected: str
    observed: str

    @property
    def ok(self) -> bool:
        return self.expected == self.observed


@dataclass
class IdentificationReport:
    case: str
    meridian: Slope
    equation: tuple[int, int]
    n_formula: str
    final_alpha: AffineSlope
    final_beta: AffineSlope
    family: str
    exclusions: list[dict]
    checkpoints: list[Checkpoint]
    sweep: dict

    @property
    def equation_text(self) -> str:
        return f"{_lin(*self.equation)}=±1"

    def to_json(self) -> dict:
        return {
            "case": self.case, "meridian": self.meridian.to_json(), "equation": self.equation_text,
            "n": self.n_formula, "alpha": str(self.final_alpha), "beta": str(self.final_beta),
            "family": self.family, "exclusions": self.exclusions,
            "checkpoints": [{"name": c.name, "expected": c.expected, "observed": c.observed,
                             "ok": c.ok} for c in self.checkpoints],
            "sweep": self.sweep,
        }


N_FORMULA = {"A": "(4p+3q)(3p+2q)", "B": "-(4q-3p)(q-p)+1"}
EXPECTED_EQUATION = {"A": (4, 3), "B": (-3, 4)}
FIGURE12_SLOPES = (Slope(1, 2), Slope(3, 1))


class _Checks:
    def __init__(self):
        self.items: list[Checkpoint] = []

    def __call__(self, name, expected, observed):
        cp = Checkpoint(name, str(expected), str(observed))
        self.items.append(cp)
        if not cp.ok:
            raise IdentificationFailure(name, f"expected {cp.expected}, got {cp.observed}")


def _same_description(a: SurgeryDescription, b: SurgeryDescription) -> bool:
    if set(a.components) != set(b.components):
        return False
    if dict(a.coefficients) != dict(b.coefficients) or dict(a.tracked) != dict(b.tracked):
        return False
    return all(a.lk(x, y) == b.lk(x, y) for x in a.components for y in a.components)


def figure12_description() -> SurgeryDescription:
    d = run_twist_script(initial_description(), TwistScript.load("twistscript.figure12"))
    return d.restrict(d.fillings())


def identify(survivor=None, case: str = "A", sweep_bound: int = 200,
             n_window: int = 50) -> IdentificationReport:
    """Run the surgery pipeline for one case, checking every intermediate value.

    survivor, when given, must be canonically equal to the transcribed
    s = 2 survivor pair (a GraphPair, a survivor record or a class id).
    """
    case = _case(case)
    check = _Checks()
    if survivor is not None:
        from .figures import figure8_class_id, class_id_of
        check("survivor is the transcribed pair", figure8_class_id(), class_id_of(survivor))

    d0 = initial_description()
    check("initial fillings", "K1=-2 K1'=3 K2=-2 K2'=(p)/(q)",
          " ".join(f"{k}={c}" for k, c in d0.coefficients))
    check("initial tracked slopes", "alpha=-3/5 beta=1/0",
          f"alpha={d0.slope_of('alpha')} beta={d0.slope_of('beta')}")

    d1 = run_twist_script(d0, TwistScript.load("twistscript.figure12"))
    check("three twists remove K1 and K2", "K1=1/0 K2=1/0",
          f"K1={d1.coefficient('K1')} K2={d1.coefficient('K2')}")
    check("slopes after three twists", "alpha=1/2 beta=3",
          f"alpha={d1.slope_of('alpha')} beta={d1.slope_of('beta')}")
    check("fillings after three twists", "K1'=4 K2'=(p+q)/(q)",
          " ".join(f"{k}={c}" for k, c in sorted(d1.fillings().items())))
    fig12 = load_description("figure12.surgery")
    check("agrees with transcribed three-component frame", True,
          _same_description(d1.restrict(d1.fillings()), fig12))

    mu = meridian_solve(d1.slope_of("alpha"), d1.slope_of("beta"), case)
    check("meridian", "1/0" if case == "A" else "1/1", mu.to_json())
    script = TwistScript.load(f"twistscript.final.{case}")
    check("script expects this meridian", script.meta.get("meridian"), mu.to_json())

    d2 = run_twist_script(d1.with_tracked(mu=mu), script.concrete_prefix())
    check("meridian in final frame", "1/0", d2.slope_of("mu").to_json())
    check("K1' removed", INFINITY, d2.coefficient("K1'"))
    lk5 = d2.lk("K0", "K2'")
    check("|lk(K0, K2')|", 5, abs(lk5))
    k2 = d2.coefficient("K2'")
    if not isinstance(k2, ParamSlope):
        raise IdentificationFailure("K2' stays parametric")
    # K2' alone must give S^3, so its numerator is a unit: a p + b q = +-1
    eq = (k2.a, k2.b)
    check("framing equation", _lin(*EXPECTED_EQUATION[case]) + "=±1",
          _lin(*_orient(eq, EXPECTED_EQUATION[case])) + "=±1")

    # symbolic last step: the n-dependent twist along K2' adds turns * lk^2 to both slopes
    last_comp, last_turn = script.steps[len(script.concrete_prefix()):][0]
    check("last twist is along K2'", "K2'", last_comp)
    off = symbolic_turn(last_turn)(0)
    fin = tuple(AffineSlope(lk5 * lk5, d2.slope_of(k).fraction() + lk5 * lk5 * off)
                for k in ("alpha", "beta"))
    check("final alpha", FINAL[case][0], fin[0])
    check("final beta", FINAL[case][1], fin[1])

    sweep, excl = _sweep(d2, script, case, eq, sweep_bound, n_window, check)
    return IdentificationReport(case, mu, _orient(eq, EXPECTED_EQUATION[case]), N_FORMULA[case],
                                fin[0], fin[1], "k(2,-1,n,0)", excl, check.items, sweep)


def _orient(eq, ref):
    return eq if eq == ref else (-eq[0], -eq[1])


def _sweep(d2, script, case, eq, bound, n_window, check):
    """Run the last twist concretely for every framing solution with |p|,|q| <= bound."""
    sols = sorted({(s.p, s.q) for s in (normalize(p, q) for p, q in solve_pm1(*eq, bound))})
    seen_n = set()
    n_one = []
    zero = []
    off = symbolic_turn(script.steps[-1][1])(0)
    for p, q in sols:
        if (p, q) == (0, 1):
            zero.append((p, q))
            continue
        ok, n = framing_constraint(case, p, q)
        d = d2.instantiate(p, q)
        c = d.coefficient("K2'")
        # the twist that sends P/Q to 1/0 has Q + tP = 0
        t = -c.q * c.p
        if not ok or t - off != n:
            check(f"framing n at p/q={p}/{q}", n, t - off)
        d = twist(d, "K2'", t)
        if d.fillings():
            check(f"all fillings removed at p/q={p}/{q}", "{}", d.fillings())
        got = (d.slope_of("alpha"), d.slope_of("beta"))
        if n == 1:
            n_one.append([p, q])
            continue
        if got != final_slopes(n, case) or distance(*got) != 5:
            check(f"final slopes at n={n}", final_slopes(n, case), got)
        seen_n.add(n)
    window = [n for n in range(-n_window, n_window + 1) if n != 1]
    missing = [n for n in window if n not in seen_n]
    excl = [
        {"n": 1, "reason": "k(2,-1,1,0) is the trefoil, which is not hyperbolic",
         "witnesses": n_one[:8], "count": len(n_one)},
        {"slope": "0/1", "reason": "p/q = 0/1 is excluded for the filling of K2'",
         "witnesses": zero, "count": len(zero)},
    ]
    sweep = {"bound": bound, "solutions": len(sols), "distinct_n": len(seen_n),
             "n_window": n_window, "missing_n": missing}
    return sweep, excl
