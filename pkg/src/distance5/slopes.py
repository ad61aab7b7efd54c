"""Exact slope arithmetic for Dehn surgery.

Slopes are unoriented, so p/q and -p/-q are identified and the
infinity slope is always stored as 1/0.  Everything is integer
arithmetic; no floats are involved anywhere.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence


class MalformedSlope(ValueError):
    pass


class CollapseDegenerate(ZeroDivisionError):
    """A chain collapse hit 1/0 before the last step."""


class NoSolutionsPossible(ValueError):
    """a*p + b*q = +-1 has no integer solutions because gcd(a, b) != 1."""


@dataclass(frozen=True, order=True)
class Slope:
    p: int
    q: int

    def __post_init__(self):
        if self.q < 0 or math.gcd(self.p, self.q) != 1 or (self.q == 0 and self.p != 1):
            raise MalformedSlope(f"unnormalized slope {self.p}/{self.q}; use normalize()")

    @property
    def is_infinite(self) -> bool:
        return self.q == 0

    @property
    def is_integral(self) -> bool:
        return self.q == 1

    @property
    def is_half_integral(self) -> bool:
        return self.q == 2

    def fraction(self) -> Fraction:
        if self.q == 0:
            raise ZeroDivisionError("the slope 1/0 has no rational value")
        return Fraction(self.p, self.q)

    def __add__(self, m: int) -> "Slope":
        # p/q + m, with 1/0 absorbing.
        return normalize(self.p + m * self.q, self.q)

    def __str__(self) -> str:
        return str(self.p) if self.q == 1 else f"{self.p}/{self.q}"

    def to_json(self) -> str:
        return f"{self.p}/{self.q}"


INFINITY = Slope(1, 0)


def normalize(num: int, den: int) -> Slope:
    if num == 0 and den == 0:
        raise MalformedSlope("0/0 is not a slope")
    g = math.gcd(num, den)
    num, den = num // g, den // g
    if den < 0 or (den == 0 and num < 0):
        num, den = -num, -den
    return Slope(num, den)


def slope(x) -> Slope:
    """Coerce an int, Fraction, Slope or a 'p/q' string into a Slope."""
    if isinstance(x, Slope):
        return x
    if isinstance(x, int):
        return Slope(x, 1)
    if isinstance(x, Fraction):
        return Slope(x.numerator, x.denominator)
    if isinstance(x, str):
        if "/" in x:
            a, b = x.split("/")
            return normalize(int(a), int(b))
        return Slope(int(x), 1)
    if isinstance(x, (tuple, list)) and len(x) == 2:
        return normalize(int(x[0]), int(x[1]))
    raise TypeError(f"cannot read a slope from {x!r}")


def distance(a: Slope, b: Slope) -> int:
    return abs(a.p * b.q - b.p * a.q)


@dataclass(frozen=True)
class FramingMap:
    """Integer matrix (a b; c d) of determinant +-1 acting on slopes."""
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c not in (1, -1):
            raise ValueError(f"framing map {self} does not have determinant +-1")

    def __matmul__(self, other: "FramingMap") -> "FramingMap":
        return FramingMap(self.a * other.a + self.b * other.c, self.a * other.b + self.b * other.d,
                          self.c * other.a + self.d * other.c, self.c * other.b + self.d * other.d)

    def inverse(self) -> "FramingMap":
        det = self.a * self.d - self.b * self.c
        return FramingMap(self.d * det, -self.b * det, -self.c * det, self.a * det)


IDENTITY_FRAMING = FramingMap(1, 0, 0, 1)


def apply_framing(m: FramingMap, s: Slope) -> Slope:
    return normalize(m.a * s.p + m.b * s.q, m.c * s.p + m.d * s.q)


def self_twist(s: Slope, t: int) -> Slope:
    """Coefficient of the component being twisted: p/q -> p/(q + t p)."""
    return normalize(s.p, s.q + t * s.p)


def linked_twist(s: Slope, t: int, l: int) -> Slope:
    """Slope on a component linking the twisted one l times: adds t*l^2."""
    return s + t * l * l


def chain_collapse(coeffs: Sequence) -> Slope:
    """Evaluate a_1 - 1/(a_2 - 1/(... - 1/a_n)) exactly."""
    if not coeffs:
        raise ValueError("empty chain")
    items = [slope(c) for c in coeffs]
    acc = items[-1]
    for k in range(len(items) - 2, -1, -1):
        if acc.p == 0:
            raise CollapseDegenerate(f"chain value vanishes below position {k + 1}")
        if acc.is_infinite:
            raise CollapseDegenerate(f"infinite coefficient at position {k + 1}")
        a = items[k]
        if a.is_infinite:
            raise CollapseDegenerate(f"infinite coefficient at position {k}")
        # a - q/p with a = ap/aq
        acc = normalize(a.p * acc.p - a.q * acc.q, a.q * acc.p)
    return acc


def mobius_chain(coeffs: Iterable[int]) -> tuple[int, int]:
    """Product of (a -1; 1 0) applied to (1, 0), as an unnormalized vector."""
    x, y = 1, 0
    for a in reversed(list(coeffs)):
        x, y = a * x - y, x
    return x, y


def solve_pm1(a: int, b: int, bound: int) -> list[tuple[int, int]]:
    """All (p, q) with |p|, |q| <= bound and a p + b q = +-1, sorted."""
    g = math.gcd(a, b)
    if g != 1:
        raise NoSolutionsPossible(f"gcd({a}, {b}) = {g}")
    out = set()
    if b == 0 or a == 0:
        # a = +-1 and b = 0 (or the mirror case): one coordinate is pinned
        for free in range(-bound, bound + 1):
            for eps in (1, -1):
                if b == 0 and abs(eps * a) <= bound:
                    out.add((eps * a, free))
                elif a == 0 and abs(eps * b) <= bound:
                    out.add((free, eps * b))
        return sorted(out)
    p0, q0 = _bezout(a, b)
    for eps in (1, -1):
        # general solution: (eps p0 + k b, eps q0 - k a)
        lo, hi = _k_range(eps * p0, b, bound)
        lo2, hi2 = _k_range(eps * q0, -a, bound)
        for k in range(max(lo, lo2), min(hi, hi2) + 1):
            out.add((eps * p0 + k * b, eps * q0 - k * a))
    return sorted(out)


def _bezout(a: int, b: int) -> tuple[int, int]:
    old_r, r, old_s, s, old_t, t = a, b, 1, 0, 0, 1
    while r:
        k = old_r // r
        old_r, r = r, old_r - k * r
        old_s, s = s, old_s - k * s
        old_t, t = t, old_t - k * t
    if old_r < 0:
        old_s, old_t = -old_s, -old_t
    return old_s, old_t


def _k_range(c: int, step: int, bound: int) -> tuple[int, int]:
    # integers k with |c + k*step| <= bound, step != 0
    if step < 0:
        c, step = -c, -step
    lo = -((bound + c) // step)
    hi = (bound - c) // step
    return lo, hi
