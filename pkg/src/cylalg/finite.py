"""Finite algebras given by their atoms.

An element is a bitmask over atoms.  c_i is determined by its value on each
atom and extended additively; diagonals are stored as masks.  Every finite
cylindric algebra is of this form, and products are disjoint unions of atoms.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product as iproduct
from typing import Sequence

from .algebra import Algebra, Verdict, carrier_cap, equation_holds_at
from .families import axiom_instances, henkin_equation
from .space import CylSpace, PointSet
from .terms import Equation, check_indices, variables


def _bits(x: int):
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


class FiniteCA(Algebra):
    def __init__(self, dim: int, natoms: int, cyl_table: Sequence[Sequence[int]],
                 diag_table: dict[tuple[int, int], int], labels: Sequence | None = None):
        self.dim = dim
        self.natoms = natoms
        self.full = (1 << natoms) - 1
        self.cyl_table = [list(row) for row in cyl_table]
        self.diag_table = dict(diag_table)
        self.labels = list(labels) if labels is not None else list(range(natoms))
        if len(self.cyl_table) != dim or any(len(r) != natoms for r in self.cyl_table):
            raise ValueError("cylindrification table has the wrong shape")
        for i in range(dim):
            for j in range(dim):
                if (i, j) not in self.diag_table:
                    raise ValueError(f"missing diagonal d{i},{j}")

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim}, atoms={self.natoms})"

    @classmethod
    def from_partition(cls, space: CylSpace, atoms: Sequence[int]) -> "FiniteCA":
        """The set algebra whose atoms are the given blocks of cells.

        Raises if the blocks do not carry a subalgebra (some c_i image or
        diagonal is not a union of blocks).
        """
        where = {}
        for n, a in enumerate(atoms):
            for b in _bits(a):
                where[b] = n

        def as_mask(s: int) -> int:
            m = 0
            for b in _bits(s):
                m |= 1 << where[b]
            back = 0
            for n in _bits(m):
                back |= atoms[n]
            if back != s:
                raise ValueError("blocks do not form a subalgebra")
            return m

        cyl_table = [[as_mask(space.cyl(i, a)) for a in atoms] for i in range(space.dim)]
        diag = {(i, j): as_mask(space.diag(i, j)) for i in range(space.dim) for j in range(space.dim)}
        alg = SetBackedCA(space.dim, len(atoms), cyl_table, diag, labels=list(atoms))
        alg.space = space
        alg.blocks = list(atoms)
        return alg

    # raw operations
    def complement(self, x): return self.full ^ x
    def one(self): return self.full
    def diag(self, i, j): return self.diag_table[(i, j)]

    def cyl(self, i, x):
        row = self.cyl_table[i]
        out = 0
        while x:
            low = x & -x
            out |= row[low.bit_length() - 1]
            x ^= low
        return out

    def atom(self, n: int) -> int:
        return 1 << n

    def atoms(self) -> list[int]:
        return [1 << n for n in range(self.natoms)]

    def enumerable(self):
        return (1 << self.natoms) <= carrier_cap()

    def elements(self):
        return range(1 << self.natoms)

    def carrier_size(self):
        return 1 << self.natoms

    def random_element(self, rng):
        return rng.getrandbits(self.natoms) if self.natoms else 0

    def reduct(self, rho: Sequence[int]) -> "FiniteCA":
        """Rd^rho as a FiniteCA: c_i becomes the old c_rho(i)."""
        rho = list(rho)
        cyl_table = [self.cyl_table[rho[i]] for i in range(self.dim)]
        diag = {(i, j): self.diag_table[(rho[i], rho[j])] for i in range(self.dim) for j in range(self.dim)}
        return FiniteCA(self.dim, self.natoms, cyl_table, diag, self.labels)


class SetBackedCA(FiniteCA):
    """A FiniteCA whose atoms are blocks of cells of a space."""

    space: CylSpace
    blocks: list[int]

    def to_points(self, x: int) -> PointSet:
        bits = 0
        for n in _bits(x):
            bits |= self.blocks[n]
        return PointSet(self.space, bits)

    def from_points(self, p: PointSet | int) -> int:
        bits = p.bits if isinstance(p, PointSet) else p
        m = 0
        for n, a in enumerate(self.blocks):
            if bits & a == a:
                m |= 1 << n
            elif bits & a:
                raise ValueError("not an element of this algebra")
        return m


class ProductCA(FiniteCA):
    """Direct product; atoms of factor k occupy a contiguous range."""

    def __init__(self, factors: Sequence[FiniteCA]):
        if not factors:
            raise ValueError("empty product")
        dim = factors[0].dim
        if any(f.dim != dim for f in factors):
            raise ValueError("factors have different dimensions")
        self.factors = list(factors)
        self.offsets = []
        off = 0
        for f in factors:
            self.offsets.append(off)
            off += f.natoms
        cyl_table = [[m << o for f, o in zip(factors, self.offsets) for m in f.cyl_table[i]]
                     for i in range(dim)]
        diag = {}
        for i in range(dim):
            for j in range(dim):
                m = 0
                for f, o in zip(factors, self.offsets):
                    m |= f.diag_table[(i, j)] << o
                diag[(i, j)] = m
        labels = [(k, lab) for k, f in enumerate(factors) for lab in f.labels]
        super().__init__(dim, off, cyl_table, diag, labels)

    def project(self, x: int, k: int) -> int:
        f = self.factors[k]
        return (x >> self.offsets[k]) & f.full

    def inject(self, parts: Sequence[int]) -> int:
        return sum(p << o for p, o in zip(parts, self.offsets))

    def random_element(self, rng):
        return self.inject([f.random_element(rng) for f in self.factors])

    def holds(self, e: Equation, mode: str = "exhaustive", **kw) -> Verdict:
        """Exhaustive validity is decided factor by factor (an equation holds in a
        product iff it holds in every factor); sampled checks run on the product."""
        if mode != "exhaustive":
            return super().holds(e, mode, **kw)
        check_indices(e, self.dim)
        checked = 0
        for k, f in enumerate(self.factors):
            v = f.holds(e, "exhaustive", **kw)
            checked += v.checked
            if v.status != "valid":
                if v.fails:
                    # lift the factor witness, other components 0
                    wit = {n: self.inject([val if m == k else 0 for m in range(len(self.factors))])
                           for n, val in v.witness.items()}
                    return Verdict("fails", mode, checked, wit, detail={"factor": k})
                return Verdict(v.status, mode, checked, truncated=v.truncated, detail=v.detail)
        return Verdict("valid", mode, checked)


def product(algs: Sequence) -> ProductCA:
    out = []
    for a in algs:
        out.append(a if isinstance(a, FiniteCA) else a.to_finite())
    return ProductCA(out)


# axiom checks -------------------------------------------------------------------------

@dataclass
class AxiomReport:
    mode: str
    results: list = field(default_factory=list)   # (name, indices, ok, witness)

    @property
    def ok(self) -> bool:
        return all(r[2] for r in self.results)

    def failures(self):
        return [r for r in self.results if not r[2]]

    def count(self) -> int:
        return len(self.results)


def _atom_check(alg: FiniteCA, name: str, idx: tuple):
    """Decide one axiom instance on atoms.  Returns a failing atom index or None.

    Every axiom except compl has both sides additive in x (or no variable), so
    it holds for all x iff it holds at every atom.  For compl the atom
    condition is symmetry of the c_i relation; together with ext and idem it
    is equivalent to the axiom.
    """
    cyl, diag, full = alg.cyl, alg.diag, alg.full
    atoms = range(alg.natoms)
    if name == "comm":
        i, j = idx
        return next((a for a in atoms if cyl(i, cyl(j, 1 << a)) != cyl(j, cyl(i, 1 << a))), None)
    if name == "ext":
        (i,) = idx
        return next((a for a in atoms if not (cyl(i, 1 << a) >> a) & 1), None)
    if name == "idem":
        (i,) = idx
        return next((a for a in atoms if cyl(i, cyl(i, 1 << a)) != cyl(i, 1 << a)), None)
    if name == "add":
        return None  # additive by construction
    if name == "compl":
        (i,) = idx
        row = alg.cyl_table[i]
        for a in atoms:
            for b in _bits(row[a]):
                if not (row[b] >> a) & 1:
                    return a
        return None
    if name == "diag_refl":
        (i,) = idx
        return None if diag(i, i) == full else -1
    if name == "diag_sym":
        i, j = idx
        return None if diag(i, j) == diag(j, i) else -1
    if name == "diag_trans":
        i, j, k = idx
        return None if cyl(j, diag(i, j) & diag(j, k)) == diag(i, k) else -1
    if name == "cyl_diag":
        i, j = idx
        return None if cyl(i, diag(i, j)) == full else -1
    if name == "diag_subst":
        i, j = idx
        d = diag(i, j)
        return next((a for a in atoms if d & cyl(i, d & (1 << a)) != d & (1 << a)), None)
    raise ValueError(f"unknown axiom {name}")


def check_ca_axioms(alg: Algebra, mode: str = "atoms", samples: int = 50, seed: int = 0,
                    index_bound: int | None = None) -> AxiomReport:
    """Check every cylindric axiom instance with indices < dim.

    mode 'atoms' decides the instances exactly through the atom structure
    (set algebras are converted to their atom structure first); 'exhaustive'
    quantifies over the whole carrier; 'sampled' over random elements.
    """
    bound = alg.dim if index_bound is None else index_bound
    report = AxiomReport(mode)
    if mode == "atoms":
        fa = alg if isinstance(alg, FiniteCA) else alg.to_finite()
        for name, idx, _ in axiom_instances(bound):
            bad = _atom_check(fa, name, idx)
            wit = None if bad is None else ({"atom": bad} if bad >= 0 else {})
            report.results.append((name, idx, bad is None, wit))
        return report
    for name, idx, e in axiom_instances(bound):
        v = alg.holds(e, mode, samples=samples, seed=seed)
        report.results.append((name, idx, v.valid, v.witness if v.fails else None))
    return report


# Henkin's equation --------------------------------------------------------------------

def henkin_counterexample(alg: FiniteCA, i: int, j: int):
    """Decide e_ij exactly on atoms.

    Writing p = x.y and q = x - y, the left side is additive in p and q and the
    right side is monotone in p + q, so e_ij fails iff some pair of distinct
    atoms a <= c_i b has c_j a not below c_i(c_j(a + b) - d_ij).  Returns the
    witness assignment {x: a + b, y: a} or None.
    """
    dij = alg.diag(i, j)
    ci_b = [alg.cyl(i, 1 << b) for b in range(alg.natoms)]
    cj = [alg.cyl(j, 1 << a) for a in range(alg.natoms)]
    for b in range(alg.natoms):
        for a in _bits(ci_b[b]):
            if a == b:
                continue
            rhs = alg.cyl(i, (cj[a] | cj[b]) & ~dij & alg.full)
            if cj[a] & ~rhs:
                return {"x": (1 << a) | (1 << b), "y": 1 << a}
    return None


def henkin_holds(alg: FiniteCA, i: int, j: int) -> Verdict:
    wit = henkin_counterexample(alg, i, j)
    if wit is None:
        return Verdict("valid", "atoms", alg.natoms ** 2)
    e = henkin_equation(i, j)
    assert not equation_holds_at(alg, e, wit)
    return Verdict("fails", "atoms", witness=wit)
