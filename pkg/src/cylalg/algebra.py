"""Algebras that terms can be evaluated in, and validity checking.

Every algebra exposes the same raw operations (join, meet, complement, cyl,
diag, ...) over some element representation.  Set algebras use int bitsets
over the cells of a CylSpace.
"""
from __future__ import annotations

import os
import random
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Any, Iterable, Mapping, Sequence

from .space import BudgetError, CylSpace, PointSet
from .terms import (Complement, Cyl, Diag, Equation, One, Product, Sum, SymDiff, Term, Var,
                    Zero, check_indices, indices, variables)

DEFAULT_CARRIER_CAP = 20_000
DEFAULT_ASSIGNMENT_BUDGET = 2_000_000


def carrier_cap() -> int:
    env = os.environ.get("CYLALG_CARRIER_CAP")
    return int(env) if env else DEFAULT_CARRIER_CAP


class UnboundVariable(KeyError):
    pass


def evaluate_raw(ops, t: Term, env: Mapping[str, Any], memo: dict | None = None):
    """Evaluate t with raw operations of `ops`.  Shared subterms are evaluated once."""
    if memo is None:
        memo = {}
    key = id(t)
    hit = memo.get(key)
    if hit is not None:
        return hit[1]
    if isinstance(t, Var):
        try:
            r = env[t.name]
        except KeyError:
            raise UnboundVariable(t.name) from None
    elif isinstance(t, Zero):
        r = ops.zero()
    elif isinstance(t, One):
        r = ops.one()
    elif isinstance(t, Diag):
        r = ops.diag(t.i, t.j)
    elif isinstance(t, Complement):
        r = ops.complement(evaluate_raw(ops, t.arg, env, memo))
    elif isinstance(t, Cyl):
        r = ops.cyl(t.index, evaluate_raw(ops, t.arg, env, memo))
    elif isinstance(t, Sum):
        r = ops.join(evaluate_raw(ops, t.left, env, memo), evaluate_raw(ops, t.right, env, memo))
    elif isinstance(t, Product):
        r = ops.meet(evaluate_raw(ops, t.left, env, memo), evaluate_raw(ops, t.right, env, memo))
    elif isinstance(t, SymDiff):
        r = ops.symdiff(evaluate_raw(ops, t.left, env, memo), evaluate_raw(ops, t.right, env, memo))
    else:
        raise TypeError(f"not a term: {t!r}")
    memo[key] = (t, r)
    return r


def equation_holds_at(ops, e: Equation, env) -> bool:
    memo: dict = {}
    return evaluate_raw(ops, e.lhs, env, memo) == evaluate_raw(ops, e.rhs, env, memo)


def eval_term(space: CylSpace, t: Term, assignment: Mapping[str, PointSet] | None = None) -> PointSet:
    """Value of t in the full set algebra on `space`."""
    check_indices(t, space.dim)
    env = {}
    for k, v in (assignment or {}).items():
        if v.space != space:
            raise ValueError(f"value for {k} lives in another space")
        env[k] = v.bits
    return PointSet(space, evaluate_raw(space, t, env))


@dataclass
class Verdict:
    status: str                      # 'valid', 'fails', 'unknown'
    mode: str
    checked: int = 0
    witness: dict | None = None
    truncated: bool = False
    detail: dict = field(default_factory=dict)

    @property
    def valid(self) -> bool:
        return self.status == "valid"

    @property
    def fails(self) -> bool:
        return self.status == "fails"


class Algebra:
    """Base class.  Subclasses provide the raw operations and element access."""

    dim: int

    # raw operations
    def join(self, x, y): return x | y
    def meet(self, x, y): return x & y
    def symdiff(self, x, y): return x ^ y
    def zero(self): return 0

    def evaluate(self, t: Term, env: Mapping[str, Any]):
        return evaluate_raw(self, t, env)

    def enumerable(self) -> bool:
        return False

    def elements(self) -> Sequence:
        raise BudgetError("carrier is not enumerable")

    def carrier_size(self) -> int | None:
        return None

    def random_element(self, rng: random.Random):
        raise NotImplementedError

    def wrap(self, raw):
        return raw

    def holds(self, e: Equation, mode: str = "exhaustive", samples: int = 200, seed: int = 0,
              budget: int = DEFAULT_ASSIGNMENT_BUDGET) -> Verdict:
        check_indices(e, self.dim)
        vs = variables(e)
        if mode == "exhaustive":
            if not self.enumerable():
                return Verdict("unknown", mode, truncated=True,
                               detail={"reason": "carrier not enumerable"})
            elems = self.elements()
            if len(elems) ** len(vs) > budget:
                return Verdict("unknown", mode, truncated=True,
                               detail={"reason": "assignment budget exceeded"})
            envs = (dict(zip(vs, combo)) for combo in product(elems, repeat=len(vs)))
        elif mode == "sampled":
            rng = random.Random(seed)
            n = samples if vs else 1
            envs = ({v: self.random_element(rng) for v in vs} for _ in range(n))
        else:
            raise ValueError(f"unknown mode {mode!r}")
        checked = 0
        for env in envs:
            checked += 1
            if not equation_holds_at(self, e, env):
                return Verdict("fails", mode, checked, {k: self.wrap(v) for k, v in env.items()})
        return Verdict("valid", mode, checked)


class SetAlgebra(Algebra):
    """The full set algebra on a space, or a generated subalgebra of it.

    A generated algebra is described exactly by its atoms; `carrier` is the
    enumerated element list, possibly truncated at the cap.
    """

    def __init__(self, space: CylSpace, atoms: Sequence[int] | None = None,
                 carrier: Sequence[int] | None = None, truncated: bool = False,
                 generators: Sequence[int] = ()):
        self.space = space
        self.dim = space.dim
        self.atoms = None if atoms is None else list(atoms)
        self.carrier = None if carrier is None else list(carrier)
        self.truncated = truncated
        self.generators = list(generators)

    @classmethod
    def full(cls, space: CylSpace) -> "SetAlgebra":
        return cls(space)

    @property
    def is_full(self) -> bool:
        return self.atoms is None

    def __repr__(self):
        kind = "full" if self.is_full else f"{len(self.atoms)} atoms"
        return f"SetAlgebra({self.space.dim}x{self.space.base_size}, {kind})"

    # raw operations
    def complement(self, x): return self.space.full ^ x
    def one(self): return self.space.full
    def cyl(self, i, x): return self.space.cyl(i, x)
    def diag(self, i, j): return self.space.diag(i, j)

    def wrap(self, raw):
        return PointSet(self.space, raw)

    def enumerable(self):
        if self.is_full:
            return self.space.ncells <= 20 and (1 << self.space.ncells) <= carrier_cap()
        return not self.truncated

    def elements(self):
        if self.is_full:
            if not self.enumerable():
                raise BudgetError("the full set algebra is too large to enumerate")
            return list(range(1 << self.space.ncells))
        return self.carrier

    def carrier_size(self):
        n = self.space.ncells if self.is_full else len(self.atoms)
        return 1 << n

    def random_element(self, rng):
        if self.is_full:
            return self.space.random_element(rng)
        x = 0
        for a in self.atoms:
            if rng.getrandbits(1):
                x |= a
        return x

    def contains(self, x) -> bool:
        bits = x.bits if isinstance(x, PointSet) else x
        if self.is_full:
            return 0 <= bits <= self.space.full
        return all((bits & a) in (0, a) for a in self.atoms)

    def point_sets(self) -> list[PointSet]:
        return [PointSet(self.space, x) for x in self.elements()]

    def to_finite(self):
        from .finite import FiniteCA
        if self.is_full:
            atoms = [1 << k for k in range(self.space.ncells)]
        else:
            atoms = self.atoms
        return FiniteCA.from_partition(self.space, atoms)


# generated subalgebras ----------------------------------------------------------------

def _refine(blocks: list[int], s: int) -> tuple[list[int], bool]:
    out = []
    changed = False
    for b in blocks:
        a = b & s
        if a and a != b:
            out.append(a)
            out.append(b ^ a)
            changed = True
        else:
            out.append(b)
    return out, changed


def generated_atoms(space: CylSpace, gens: Iterable[int]) -> list[int]:
    """Atoms of the subalgebra generated by gens (with all diagonals).

    The coarsest partition of the cells refined by the generators and the
    diagonals, and closed under refinement by c_i of its own blocks.  Every
    element of the generated algebra is a union of these blocks and every union
    belongs to it.
    """
    blocks = [space.full]
    for s in list(gens) + [space.diag(i, j) for i in range(space.dim) for j in range(i + 1, space.dim)]:
        blocks, _ = _refine(blocks, s)
    stable = False
    while not stable:
        stable = True
        for b in list(blocks):
            for i in range(space.dim):
                blocks, changed = _refine(blocks, space.cyl(i, b))
                if changed:
                    stable = False
    return sorted(blocks, key=lambda b: (b & -b))


def unions(atoms: Sequence[int], cap: int) -> tuple[list[int], bool]:
    """All unions of atoms when there are at most cap of them; otherwise the
    first cap unions taken by increasing number of atoms (with complements)."""
    k = len(atoms)
    if (1 << k) <= cap:
        out = []
        for mask in range(1 << k):
            x = 0
            m, i = mask, 0
            while m:
                if m & 1:
                    x |= atoms[i]
                m >>= 1
                i += 1
            out.append(x)
        return out, False
    full = 0
    for a in atoms:
        full |= a
    out, seen = [], set()
    for r in range(k + 1):
        for combo in combinations(range(k), r):
            x = 0
            for i in combo:
                x |= atoms[i]
            for y in (x, full ^ x):
                if y not in seen and len(out) < cap:
                    seen.add(y)
                    out.append(y)
            if len(out) >= cap:
                return out, True
    return out, True


def generate(space: CylSpace, gens: Iterable = (), cap: int | None = None) -> SetAlgebra:
    """Subalgebra of the full set algebra generated by gens (PointSets or raw ints)."""
    cap = carrier_cap() if cap is None else cap
    raw = []
    for g in gens:
        if isinstance(g, PointSet):
            if g.space != space:
                raise ValueError("generator lives in another space")
            raw.append(g.bits)
        else:
            if not 0 <= g <= space.full:
                raise ValueError("generator outside the space")
            raw.append(g)
    atoms = generated_atoms(space, raw)
    carrier, truncated = unions(atoms, cap)
    return SetAlgebra(space, atoms, carrier, truncated, raw)


def closure_worklist(space: CylSpace, gens: Iterable[int], cap: int = 5000) -> tuple[set[int], bool]:
    """Naive closure of gens under all operations.  Reference for small cases."""
    start = {0, space.full, *gens}
    start |= {space.diag(i, j) for i in range(space.dim) for j in range(space.dim)}
    seen = set()
    work = sorted(start)
    while work:
        x = work.pop()
        if x in seen:
            continue
        seen.add(x)
        if len(seen) > cap:
            return seen, True
        new = [space.full ^ x] + [space.cyl(i, x) for i in range(space.dim)]
        new += [x | y for y in seen] + [x & y for y in seen]
        work.extend(y for y in new if y not in seen)
    return seen, False


# closed elements -------------------------------------------------------------------------

def closed_atoms(space: CylSpace, atoms: Sequence[int], closed_under: Iterable[int]) -> list[int]:
    """Atoms of the subalgebra of elements x with c_k x = x for all k in closed_under.

    Those elements are exactly the unions of the sets c_K(a), a an atom.
    """
    ks = list(closed_under)
    images = []
    for a in atoms:
        x = a
        for k in ks:
            x = space.cyl(k, x)
        images.append(x)
    blocks = [space.full] if atoms else []
    for s in images:
        blocks, _ = _refine(blocks, s)
    return sorted(set(blocks), key=lambda b: (b & -b))


def closed_elements(alg: SetAlgebra, closed_under: Iterable[int], cap: int | None = None) -> tuple[list[int], bool]:
    atoms = alg.atoms if alg.atoms is not None else [1 << k for k in range(alg.space.ncells)]
    cat = closed_atoms(alg.space, atoms, closed_under)
    return unions(cat, carrier_cap() if cap is None else cap)


# reducts ----------------------------------------------------------------------------------

class ReductView(Algebra):
    """Rd^rho A: the same elements, with c_i read as c_rho(i) and d_ij as d_rho(i)rho(j)."""

    def __init__(self, base: Algebra, rho: Mapping[int, int] | Sequence[int]):
        self.base = base
        self.dim = base.dim
        if isinstance(rho, Mapping):
            rho = [rho.get(i, i) for i in range(base.dim)]
        rho = list(rho)
        if sorted(rho) != list(range(base.dim)):
            raise ValueError("rho must be a permutation of the indices of the algebra")
        self.rho = tuple(rho)

    def join(self, x, y): return self.base.join(x, y)
    def meet(self, x, y): return self.base.meet(x, y)
    def symdiff(self, x, y): return self.base.symdiff(x, y)
    def complement(self, x): return self.base.complement(x)
    def zero(self): return self.base.zero()
    def one(self): return self.base.one()
    def cyl(self, i, x): return self.base.cyl(self.rho[i], x)
    def diag(self, i, j): return self.base.diag(self.rho[i], self.rho[j])

    def enumerable(self): return self.base.enumerable()
    def elements(self): return self.base.elements()
    def carrier_size(self): return self.base.carrier_size()
    def random_element(self, rng): return self.base.random_element(rng)
    def wrap(self, raw): return self.base.wrap(raw)


def rd_reduct(alg: Algebra, rho) -> ReductView:
    return ReductView(alg, rho)


def holds(alg: Algebra, e: Equation, mode: str = "exhaustive", **kw) -> Verdict:
    return alg.holds(e, mode, **kw)
