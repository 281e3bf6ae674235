"""Term language for cylindric algebras: syntax trees and structural operations."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Mapping


class Term:
    __slots__ = ()

    def children(self) -> tuple["Term", ...]:
        return ()

    # operator sugar for building terms in code
    def __add__(self, other):
        return Sum(self, other)

    def __and__(self, other):
        return Product(self, other)

    def __mul__(self, other):
        return Product(self, other)

    def __xor__(self, other):
        return SymDiff(self, other)

    def __invert__(self):
        return Complement(self)

    def __sub__(self, other):
        return Product(self, Complement(other))

    def __str__(self):
        from .parser import format_term
        return format_term(self)


@dataclass(frozen=True, slots=True)
class Var(Term):
    name: str


@dataclass(frozen=True, slots=True)
class Zero(Term):
    pass


@dataclass(frozen=True, slots=True)
class One(Term):
    pass


@dataclass(frozen=True, slots=True)
class Diag(Term):
    i: int
    j: int


@dataclass(frozen=True, slots=True)
class Complement(Term):
    arg: Term

    def children(self):
        return (self.arg,)


@dataclass(frozen=True, slots=True)
class Cyl(Term):
    index: int
    arg: Term

    def children(self):
        return (self.arg,)


@dataclass(frozen=True, slots=True)
class Sum(Term):
    left: Term
    right: Term

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True, slots=True)
class Product(Term):
    left: Term
    right: Term

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True, slots=True)
class SymDiff(Term):
    left: Term
    right: Term

    def children(self):
        return (self.left, self.right)


BINARY = (Sum, Product, SymDiff)
ZERO = Zero()
ONE = One()


@dataclass(frozen=True, slots=True)
class Equation:
    lhs: Term
    rhs: Term

    def __str__(self):
        from .parser import format_equation
        return format_equation(self)


class IndexError_(ValueError):
    """Raised when a term uses an index outside the allowed range."""


def leq(a: Term, b: Term) -> Equation:
    """a <= b, written as the equation a + b = b."""
    return Equation(Sum(a, b), b)


def var(name: str) -> Var:
    return Var(name)


def cyl(indices, t: Term) -> Term:
    """Apply c_i for each i in indices, innermost last: cyl([0,1], x) = c0(c1(x))."""
    if isinstance(indices, int):
        return Cyl(indices, t)
    for i in reversed(list(indices)):
        t = Cyl(i, t)
    return t


def sum_of(terms) -> Term:
    terms = list(terms)
    if not terms:
        return ZERO
    out = terms[0]
    for t in terms[1:]:
        out = Sum(out, t)
    return out


def product_of(terms) -> Term:
    terms = list(terms)
    if not terms:
        return ONE
    out = terms[0]
    for t in terms[1:]:
        out = Product(out, t)
    return out


def subterms(t: Term) -> Iterator[Term]:
    stack = [t]
    while stack:
        u = stack.pop()
        yield u
        stack.extend(reversed(u.children()))


def variables(t) -> list[str]:
    """Variables in order of first occurrence (left to right)."""
    seen: dict[str, None] = {}
    for side in _sides(t):
        for u in subterms(side):
            if isinstance(u, Var):
                seen.setdefault(u.name, None)
    return list(seen)


def indices(t) -> frozenset[int]:
    out = set()
    for side in _sides(t):
        for u in subterms(side):
            if isinstance(u, Cyl):
                out.add(u.index)
            elif isinstance(u, Diag):
                out.add(u.i)
                out.add(u.j)
    return frozenset(out)


def max_index(t) -> int:
    ind = indices(t)
    return max(ind) if ind else -1


def depth(t: Term) -> int:
    ch = t.children()
    return 1 + max((depth(c) for c in ch), default=0)


def size(t: Term) -> int:
    return sum(1 for _ in subterms(t))


def _sides(t):
    if isinstance(t, Equation):
        return (t.lhs, t.rhs)
    return (t,)


def map_term(t: Term, leaf: Callable[[Term], Term | None]) -> Term:
    """Rebuild t bottom-up; leaf(u) may return a replacement for any node."""
    r = leaf(t)
    if r is not None:
        return r
    if isinstance(t, Complement):
        return Complement(map_term(t.arg, leaf))
    if isinstance(t, Cyl):
        return Cyl(t.index, map_term(t.arg, leaf))
    if isinstance(t, BINARY):
        return type(t)(map_term(t.left, leaf), map_term(t.right, leaf))
    return t


def rename(t, rho: Mapping[int, int] | Callable[[int], int]):
    """Apply an index renaming to every c_i and d_ij (identity off the domain of rho)."""
    if isinstance(t, Equation):
        return Equation(rename(t.lhs, rho), rename(t.rhs, rho))
    f = rho if callable(rho) else (lambda k: rho.get(k, k))

    def _go(u: Term) -> Term:
        if isinstance(u, Diag):
            return Diag(f(u.i), f(u.j))
        if isinstance(u, Cyl):
            return Cyl(f(u.index), _go(u.arg))
        if isinstance(u, Complement):
            return Complement(_go(u.arg))
        if isinstance(u, BINARY):
            return type(u)(_go(u.left), _go(u.right))
        return u

    return _go(t)


def transposition(i: int, j: int) -> dict[int, int]:
    return {i: j, j: i}


def substitute(t, sigma: Mapping[str, Term]):
    """Simultaneous substitution of terms for variables."""
    if isinstance(t, Equation):
        return Equation(substitute(t.lhs, sigma), substitute(t.rhs, sigma))
    return map_term(t, lambda u: sigma.get(u.name) if isinstance(u, Var) else None)


def check_indices(t, dim: int) -> None:
    bad = sorted(k for k in indices(t) if k >= dim or k < 0)
    if bad:
        raise IndexError_(f"index {bad[0]} out of range for dimension {dim}")


# substitutions -------------------------------------------------------------

def subst_term(i: int, j: int, t: Term) -> Term:
    """s^i_j t = c_i(d_ij . t) for i != j."""
    if i == j:
        raise ValueError("substitution needs distinct indices")
    return Cyl(i, Product(Diag(i, j), t))


def pair_subst_term(i: int, j: int, t: Term, dim: int | None = None, spare: int = 2) -> Term:
    """Term whose value at s is membership of s(01/s_i s_j) in t.

    The swap case (1, 0) goes through a spare coordinate and is only exact when
    t does not depend on that coordinate (c_spare-closed t).
    """
    if i == j:
        raise ValueError("pair substitution needs distinct indices")
    if i < 0 or j < 0:
        raise ValueError("negative index")
    if (i, j) == (0, 1):
        return t
    if (i, j) == (1, 0):
        k = spare
        if k in (0, 1):
            raise ValueError("spare index must differ from 0 and 1")
        if dim is not None and k >= dim:
            raise ValueError(f"no spare index available in dimension {dim}")
        return subst_term(k, 0, subst_term(0, 1, subst_term(1, k, Cyl(k, t))))
    if i == 0:
        return subst_term(1, j, t)
    if i == 1:
        if j == 0:
            raise AssertionError
        return subst_term(0, 1, subst_term(1, j, t))
    if j == 1:
        return subst_term(0, i, t)
    if j == 0:
        return subst_term(1, 0, subst_term(0, i, t))
    return subst_term(0, i, subst_term(1, j, t))


def shift_12_01(t: Term) -> Term:
    """s^{12}_{01} t = s^2_1 s^1_0 t: membership of s(12/s_0 s_1) in t."""
    return subst_term(2, 1, subst_term(1, 0, t))


# inductive rule ------------------------------------------------------------

def wrap_variables(t, i: int):
    """Replace every variable x by c_i x."""
    if isinstance(t, Equation):
        return Equation(wrap_variables(t.lhs, i), wrap_variables(t.rhs, i))
    return map_term(t, lambda u: Cyl(i, u) if isinstance(u, Var) else None)


def _strip(t: Term, i: int) -> Term | None:
    if isinstance(t, Cyl):
        if isinstance(t.arg, Var):
            return t.arg if t.index == i else None
        inner = _strip(t.arg, i)
        return None if inner is None else Cyl(t.index, inner)
    if isinstance(t, Var):
        return None
    if isinstance(t, Complement):
        inner = _strip(t.arg, i)
        return None if inner is None else Complement(inner)
    if isinstance(t, BINARY):
        a = _strip(t.left, i)
        if a is None:
            return None
        b = _strip(t.right, i)
        return None if b is None else type(t)(a, b)
    return t


def inductive_premise_match(eq: Equation) -> list[tuple[Equation, int]]:
    """All (e, i) with e[x := c_i x] == eq and i not an index of e.

    Only equations with at least one variable are matched; a closed equation
    would match itself for every fresh index.
    """
    cands = []
    for side in (eq.lhs, eq.rhs):
        for u in subterms(side):
            if isinstance(u, Cyl) and isinstance(u.arg, Var):
                cands.append(u.index)
    out = []
    for i in sorted(set(cands)):
        lhs, rhs = _strip(eq.lhs, i), _strip(eq.rhs, i)
        if lhs is None or rhs is None:
            continue
        e = Equation(lhs, rhs)
        if not variables(e) or i in indices(e):
            continue
        out.append((e, i))
    return out
