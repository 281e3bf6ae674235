"""Direct semantics of the meta-level predicates, computed on tuples.

Nothing here calls the bitset evaluator: sets of points are plain Python sets
of tuples and cylindrification is recomputed by enumeration.  These functions
are the reference that term evaluation is tested against.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable

from .space import CylSpace, PointSet
from .terms import Complement, Cyl, Diag, One, Product, Sum, SymDiff, Term, Var, Zero


@dataclass(frozen=True)
class Relation:
    arity: int
    tuples: frozenset
    base_size: int

    def __post_init__(self):
        for t in self.tuples:
            if len(t) != self.arity or any(not 0 <= v < self.base_size for v in t):
                raise ValueError(f"tuple {t} does not fit arity {self.arity} over the base")

    def __contains__(self, t):
        return tuple(t) in self.tuples

    def __len__(self):
        return len(self.tuples)

    def __sub__(self, other):
        return Relation(self.arity, self.tuples - other.tuples, self.base_size)


def relation(tuples: Iterable, arity: int, base_size: int) -> Relation:
    return Relation(arity, frozenset(tuple(t) for t in tuples), base_size)


def _points(x) -> set:
    return set(x) if isinstance(x, PointSet) else set(x)


def naive_cyl(i: int, pts: set, base_size: int) -> set:
    return {s[:i] + (u,) + s[i + 1:] for s in pts for u in range(base_size)}


def section(x, s, coords) -> Relation:
    """x[s,H] = {q : s(H/q) in x}."""
    coords = tuple(coords)
    if len(set(coords)) != len(coords):
        raise ValueError("repeated index in section coordinates")
    if isinstance(x, PointSet):
        base, pts = x.space.base_size, set(x)
    else:
        pts, base = x
    s = tuple(s)
    out = set()
    for q in product(range(base), repeat=len(coords)):
        t = list(s)
        for k, v in zip(coords, q):
            t[k] = v
        if tuple(t) in pts:
            out.add(q)
    return Relation(len(coords), frozenset(out), base)


def is_sensitive_cut(x: Relation, r: Relation) -> bool:
    """c_i X = c_i(R - X) for every i < arity, in the full set algebra on U^n."""
    if x.arity != r.arity:
        raise ValueError("arity mismatch")
    if not x.tuples <= r.tuples:
        raise ValueError("X is not a subset of R")
    rest = r.tuples - x.tuples
    return all(naive_cyl(i, set(x.tuples), r.base_size) == naive_cyl(i, set(rest), r.base_size)
               for i in range(x.arity))


def is_strict_linear_order(rel: Relation, w: Iterable[int]) -> bool:
    if rel.arity != 2:
        raise ValueError("order must be binary")
    w = set(w)
    pairs = rel.tuples
    dom = {u for u, _ in pairs}
    rng = {v for _, v in pairs}
    if dom != w or rng != w:
        return False
    if any(u == v for u, v in pairs):
        return False
    if any((v, u) in pairs for u, v in pairs):
        return False
    for u, v in pairs:
        for v2, t in pairs:
            if v2 == v and (u, t) not in pairs:
                return False
    return all(u == v or (u, v) in pairs or (v, u) in pairs for u in w for v in w)


def is_uniform_equivalence(rel: Relation, universe: Iterable[int], n: int) -> bool:
    """Equivalence relation on the universe with every class of size exactly n."""
    if rel.arity != 2:
        raise ValueError("relation must be binary")
    u = set(universe)
    pairs = rel.tuples
    if any(a not in u or b not in u for a, b in pairs):
        return False
    if any((a, a) not in pairs for a in u):
        return False
    if any((b, a) not in pairs for a, b in pairs):
        return False
    for a, b in pairs:
        for b2, c in pairs:
            if b2 == b and (a, c) not in pairs:
                return False
    return all(sum(1 for b in u if (a, b) in pairs) == n for a in u)


def express_oracle(space: CylSpace, x: PointSet) -> bool:
    """Right-hand side of the characterisation of where the master equation holds.

    For every s in x: x[s,012] is not a sensitive cut of Z = (c_0x.c_2x)[s,012],
    or <_x = c_2x[s,01] is not a strict linear order on W = c_1c_2x[s,0], or
    Z differs from the set of <_x-increasing triples over W.  The disjuncts are
    tried in that order and the last is only consulted when the first two fail.
    """
    if space.dim < 3:
        raise ValueError("needs dimension at least 3")
    m = space.base_size
    pts = _points(x)
    c0x, c2x = naive_cyl(0, pts, m), naive_cyl(2, pts, m)
    z = c0x & c2x
    c1c2x = naive_cyl(1, c2x, m)
    for s in sorted(pts):
        sec = section((pts, m), s, (0, 1, 2))
        zs = section((z, m), s, (0, 1, 2))
        if not is_sensitive_cut(sec, zs):
            continue
        lt = section((c2x, m), s, (0, 1))
        w = {q[0] for q in section((c1c2x, m), s, (0,)).tuples}
        if not is_strict_linear_order(lt, w):
            continue
        triples = {(a, b, c) for a in w for b in w for c in w if (a, b) in lt.tuples and (b, c) in lt.tuples}
        if zs.tuples != triples:
            continue
        return False
    return True


def is_closed(space: CylSpace, x: PointSet, coords: Iterable[int]) -> bool:
    pts = _points(x)
    return all(naive_cyl(k, pts, space.base_size) == pts for k in coords)


def equiv_oracle(space: CylSpace, x: PointSet, n: int) -> bool:
    """True iff no s in x has x[s,01] an equivalence on U with all classes of size n.

    x must be closed under c_2 ... c_n.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if space.dim < n + 1:
        raise ValueError(f"needs dimension at least {n + 1}")
    if not is_closed(space, x, range(2, n + 1)):
        raise ValueError(f"element is not closed under c_2..c_{n}")
    pts = _points(x)
    universe = range(space.base_size)
    seen = set()
    for s in sorted(pts):
        rel = section((pts, space.base_size), s, (0, 1))
        if rel.tuples in seen:
            continue
        seen.add(rel.tuples)
        if is_uniform_equivalence(rel, universe, n):
            return False
    return True


def dimension_set(x: PointSet) -> frozenset[int]:
    pts = _points(x)
    m = x.space.base_size
    return frozenset(i for i in range(x.space.dim) if naive_cyl(i, pts, m) != pts)


def is_regular(x: PointSet) -> bool:
    """Membership depends only on the coordinates in the dimension set."""
    delta = sorted(dimension_set(x))
    pts = _points(x)
    verdict: dict[tuple, bool] = {}
    for s in x.space.cells():
        key = tuple(s[i] for i in delta)
        inside = s in pts
        if verdict.setdefault(key, inside) != inside:
            return False
    return True


# reference evaluator -------------------------------------------------------------

def reference_eval(space: CylSpace, t: Term, assignment: dict) -> set:
    """Evaluate a term point by point, straight from the semantic clauses."""
    m = space.base_size
    env = {k: _points(v) for k, v in assignment.items()}
    memo: dict = {}

    def member(u: Term, s: tuple) -> bool:
        key = (id(u), s)
        if key in memo:
            return memo[key]
        if isinstance(u, Var):
            r = s in env[u.name]
        elif isinstance(u, Zero):
            r = False
        elif isinstance(u, One):
            r = True
        elif isinstance(u, Diag):
            r = s[u.i] == s[u.j]
        elif isinstance(u, Complement):
            r = not member(u.arg, s)
        elif isinstance(u, Cyl):
            i = u.index
            r = any(member(u.arg, s[:i] + (v,) + s[i + 1:]) for v in range(m))
        elif isinstance(u, Sum):
            r = member(u.left, s) or member(u.right, s)
        elif isinstance(u, Product):
            r = member(u.left, s) and member(u.right, s)
        elif isinstance(u, SymDiff):
            r = member(u.left, s) != member(u.right, s)
        else:
            raise TypeError(u)
        memo[key] = r
        return r

    return {s for s in space.cells() if member(t, s)}
