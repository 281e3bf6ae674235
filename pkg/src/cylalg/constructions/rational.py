"""Pointwise checks for the sensitive-cut generator over the rationals.

U is Q together with disjoint two-element blocks V_i = {(i,0), (i,1)} for
i >= 3; V_0 = V_1 = V_2 = Q.  Points differ from the reference sequence p in
finitely many places; here only coordinates below a truncation dimension may
differ.  T is the set of points with s_0 < s_1 < s_2 and g is the part of T
where "s_1 is the midpoint of s_0, s_2" agrees with "an even number of blocks
are flipped away from p".
"""
from __future__ import annotations

import bisect
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

REFERENCE = (Fraction(0), Fraction(0), Fraction(0))


@dataclass(frozen=True)
class RationalPoint:
    rat: tuple            # s_0, s_1, s_2 as Fractions
    flipped: frozenset    # indices i >= 3 with s_i != p_i
    trunc_dim: int

    def __post_init__(self):
        if self.trunc_dim < 4:
            raise ValueError("truncation dimension must be at least 4")
        if len(self.rat) != 3 or not all(isinstance(v, Fraction) for v in self.rat):
            raise ValueError("coordinates 0, 1, 2 must be exact rationals")
        bad = [i for i in self.flipped if not 3 <= i < self.trunc_dim]
        if bad:
            raise ValueError(f"coordinate {bad[0]} cannot leave p (outside 3..{self.trunc_dim - 1})")

    @classmethod
    def make(cls, s0, s1, s2, flipped=(), trunc_dim: int = 8):
        return cls((Fraction(s0), Fraction(s1), Fraction(s2)), frozenset(flipped), trunc_dim)

    def coord(self, i: int):
        if i < 3:
            return self.rat[i]
        if i >= self.trunc_dim:
            raise IndexError(i)
        return (i, 1 if i in self.flipped else 0)

    def replace(self, i: int, value) -> "RationalPoint":
        """s(i/value); value must lie in V_i."""
        if i < 3:
            if not isinstance(value, (Fraction, int)):
                raise ValueError(f"coordinate {i} takes rationals")
            rat = list(self.rat)
            rat[i] = Fraction(value)
            return RationalPoint(tuple(rat), self.flipped, self.trunc_dim)
        if not (isinstance(value, tuple) and len(value) == 2 and value[0] == i and value[1] in (0, 1)):
            raise ValueError(f"{value!r} is not in V_{i}")
        fl = set(self.flipped)
        fl.discard(i)
        if value[1]:
            fl.add(i)
        return RationalPoint(self.rat, frozenset(fl), self.trunc_dim)


def in_T(s: RationalPoint) -> bool:
    return s.rat[0] < s.rat[1] < s.rat[2]


def in_g(s: RationalPoint) -> bool:
    if not in_T(s):
        return False
    midpoint = s.rat[1] == (s.rat[0] + s.rat[2]) / 2
    return midpoint == (len(s.flipped) % 2 == 0)


class CutWitnessError(AssertionError):
    pass


def cut_witnesses(s: RationalPoint, i: int):
    """u, v with exactly one of s(i/u), s(i/v) in g and both in T."""
    if not in_T(s):
        raise ValueError("point is not in T")
    s0, s1, s2 = s.rat
    if i == 1:
        u = (s0 + s2) / 2
        v = (s0 + u) / 2
    elif i == 0:
        u = 2 * s1 - s2
        v = u - 1
    elif i == 2:
        u = 2 * s1 - s0
        v = u + 1
    elif 3 <= i < s.trunc_dim:
        u = s.coord(i)
        v = (i, 1 - u[1])
    else:
        raise IndexError(f"index {i} outside the truncation")
    a, b = s.replace(i, u), s.replace(i, v)
    if not (in_T(a) and in_T(b) and in_g(a) != in_g(b)):
        raise CutWitnessError(f"cut witnesses fail at coordinate {i} for {s}")
    return u, v


def random_point(rng: random.Random, trunc_dim: int = 8, spread: int = 50) -> RationalPoint:
    """A random point of T."""
    vals = set()
    while len(vals) < 3:
        vals.add(Fraction(rng.randint(-spread * 8, spread * 8), rng.randint(1, 8)))
    s0, s1, s2 = sorted(vals)
    if rng.random() < 0.3:
        s1 = (s0 + s2) / 2
    flipped = {i for i in range(3, trunc_dim) if rng.random() < 0.5}
    return RationalPoint((s0, s1, s2), frozenset(flipped), trunc_dim)


@dataclass(frozen=True)
class PLMap:
    """Piecewise-linear order automorphism of Q; identity outside [lo, hi]."""
    xs: tuple
    ys: tuple

    def __call__(self, x) -> Fraction:
        x = Fraction(x)
        xs, ys = self.xs, self.ys
        if x <= xs[0] or x >= xs[-1]:
            return x
        k = bisect.bisect_right(xs, x) - 1
        return (x - xs[k]) * (ys[k + 1] - ys[k]) / (xs[k + 1] - xs[k]) + ys[k]

    def inverse(self) -> "PLMap":
        return PLMap(self.ys, self.xs)


def pl_automorphism(a: Sequence, b: Sequence, lo=None, hi=None) -> PLMap:
    """The piecewise-linear map sending a_k to b_k, fixing everything below lo
    and above hi (defaults: one below / above both lists)."""
    a = [Fraction(v) for v in a]
    b = [Fraction(v) for v in b]
    if len(a) != len(b) or not a:
        raise ValueError("need two nonempty lists of equal length")
    if any(x >= y for x, y in zip(a, a[1:])) or any(x >= y for x, y in zip(b, b[1:])):
        raise ValueError("breakpoints must be strictly increasing")
    lo = Fraction(lo) if lo is not None else min(a[0], b[0]) - 1
    hi = Fraction(hi) if hi is not None else max(a[-1], b[-1]) + 1
    if not (lo < min(a[0], b[0]) and hi > max(a[-1], b[-1])):
        raise ValueError("padding must lie strictly outside both lists")
    return PLMap(tuple([lo] + a + [hi]), tuple([lo] + b + [hi]))


def random_increasing(rng: random.Random, n: int, spread: int = 100) -> list[Fraction]:
    vals = set()
    while len(vals) < n:
        vals.add(Fraction(rng.randint(-spread * 10, spread * 10), rng.randint(1, 10)))
    return sorted(vals)


@dataclass(frozen=True)
class GoodPermutation:
    """An order automorphism on the rational coordinates together with a set of
    blocks V_i whose two elements are swapped; identity on every other block."""
    order: PLMap
    swapped: frozenset = field(default_factory=frozenset)

    def apply(self, s: RationalPoint) -> RationalPoint:
        rat = tuple(self.order(v) for v in s.rat)
        fl = frozenset(i for i in s.flipped ^ self.swapped if i < s.trunc_dim)
        return RationalPoint(rat, fl, s.trunc_dim)


def check_pl(f: PLMap, a, b, pairs: int, rng: random.Random) -> bool:
    """Breakpoints map exactly and sampled pairs keep their order."""
    if any(f(x) != y for x, y in zip(a, b)):
        return False
    lo, hi = f.xs[0] - 5, f.xs[-1] + 5
    span = hi - lo
    for _ in range(pairs):
        x = lo + span * Fraction(rng.randint(0, 10 ** 6), 10 ** 6)
        y = lo + span * Fraction(rng.randint(0, 10 ** 6), 10 ** 6)
        if x == y:
            continue
        if (x < y) != (f(x) < f(y)):
            return False
    return True
