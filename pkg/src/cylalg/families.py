"""Equation families: the cylindric axioms, the master equation e, the
partition equations e_n, Henkin's equation and the a_m terms."""
from __future__ import annotations

from itertools import combinations

from .terms import (ONE, Complement, Cyl, Diag, Equation, Product, Sum, SymDiff, Term, Var,
                    cyl, leq, pair_subst_term, product_of, shift_12_01, subst_term, sum_of)

X, Y = Var("x"), Var("y")


def minus(a: Term, b: Term) -> Term:
    return Product(a, Complement(b))


# cylindric axioms ------------------------------------------------------------

def axiom_instances(index_bound: int, x: Term = X, y: Term = Y) -> list[tuple[str, tuple, Equation]]:
    """Every instance of the cylindric axioms with indices < index_bound.

    Entries are (name, indices, equation).  Axioms carrying a side condition on
    indices are instantiated only where it holds.
    """
    r = range(index_bound)
    out = []
    for i in r:
        for j in r:
            if i < j:
                out.append(("comm", (i, j), Equation(Cyl(i, Cyl(j, x)), Cyl(j, Cyl(i, x)))))
    for i in r:
        out.append(("ext", (i,), leq(x, Cyl(i, x))))
        out.append(("idem", (i,), Equation(Cyl(i, Cyl(i, x)), Cyl(i, x))))
        out.append(("add", (i,), Equation(Cyl(i, Sum(x, y)), Sum(Cyl(i, x), Cyl(i, y)))))
        out.append(("compl", (i,), Equation(Cyl(i, Complement(Cyl(i, x))), Complement(Cyl(i, x)))))
        out.append(("diag_refl", (i,), Equation(Diag(i, i), ONE)))
    for i in r:
        for j in r:
            if i < j:
                out.append(("diag_sym", (i, j), Equation(Diag(i, j), Diag(j, i))))
    for i in r:
        for j in r:
            for k in r:
                if j != i and j != k:
                    out.append(("diag_trans", (i, j, k),
                                Equation(Cyl(j, Product(Diag(i, j), Diag(j, k))), Diag(i, k))))
    for i in r:
        for j in r:
            out.append(("cyl_diag", (i, j), Equation(Cyl(i, Diag(i, j)), ONE)))
    for i in r:
        for j in r:
            if i != j:
                d = Diag(i, j)
                out.append(("diag_subst", (i, j),
                            Equation(Product(d, Cyl(i, Product(d, x))), Product(d, x))))
    return out


AXIOM_NAMES = ("comm", "ext", "idem", "add", "compl", "diag_refl", "diag_sym", "diag_trans",
               "cyl_diag", "diag_subst")


# master equation ----------------------------------------------------------------

def master_parts(x: Term = X) -> dict[str, Term]:
    """The named pieces of the master equation, as functions of x."""
    c0x, c1x, c2x = Cyl(0, x), Cyl(1, x), Cyl(2, x)
    z = Product(c0x, c2x)
    zx = minus(z, x)
    beta = sum_of([SymDiff(Cyl(i, x), Cyl(i, zx)) for i in range(3)])
    gamma = SymDiff(c2x, shift_12_01(c0x))
    swap = pair_subst_term(1, 0, c2x)
    iota = Product(c2x, Diag(0, 1))
    sigma = Product(c2x, swap)
    tau = minus(Product(c2x, pair_subst_term(1, 2, c2x)), subst_term(1, 2, c2x))
    lam = product_of([Cyl(1, c2x), Cyl(0, c2x), Complement(c2x), Complement(swap)])
    omega = sum_of([iota, sigma, tau, lam])
    return {"z": z, "beta": beta, "gamma": gamma, "iota": iota, "sigma": sigma,
            "tau": tau, "lambda": lam, "omega": omega}


def master_equation(x: Term = X) -> Equation:
    p = master_parts(x)
    return leq(x, cyl([0, 1, 2], sum_of([p["beta"], p["gamma"], p["omega"]])))


# partition equations ----------------------------------------------------------------

def _distinct(idx) -> Term:
    return product_of([Complement(Diag(i, j)) for i, j in combinations(idx, 2)])


def _related(idx, x: Term) -> Term:
    return product_of([pair_subst_term(i, j, x) for i, j in combinations(idx, 2)])


def partition_parts(n: int, x: Term = X) -> dict[str, Term]:
    """Pieces of eta_n; each is nonzero at a witness that x (read as a binary
    relation on coordinates 0, 1) is not an equivalence with all blocks of size n."""
    if n < 2:
        raise ValueError("n must be at least 2")
    delta = Cyl(0, Complement(Cyl(1, x)))
    sigma = cyl([0, 1], SymDiff(pair_subst_term(1, 0, x), x))
    tau = cyl([0, 1, 2], minus(Product(x, pair_subst_term(1, 2, x)), pair_subst_term(0, 2, x)))
    rho = cyl([0, 1], minus(Diag(0, 1), x))
    small = range(n)
    mu_lt = Cyl(0, Complement(cyl(range(1, n), Product(_distinct(small), _related(small, x)))))
    big = range(n + 1)
    mu_gt = cyl(big, Product(_distinct(big), _related(big, x)))
    return {"delta": delta, "sigma": sigma, "tau": tau, "rho": rho, "mu_lt": mu_lt, "mu_gt": mu_gt}


def eta(n: int, x: Term = X) -> Term:
    return sum_of(partition_parts(n, x).values())


def partition_equation(n: int, dim: int | None = None, x: Term = X) -> Equation:
    """e_n: eta_n(c_2...c_n x) = 1.  Uses indices 0..n."""
    if n < 2:
        raise ValueError("n must be at least 2")
    if dim is not None and dim < n + 1:
        raise ValueError(f"e_{n} needs dimension at least {n + 1}, got {dim}")
    return Equation(eta(n, cyl(range(2, n + 1), x)), ONE)


# Henkin's equation, a_m ----------------------------------------------------------------

def henkin_equation(i: int, j: int, x: Term = X, y: Term = Y) -> Equation:
    """c_j(x.y.c_i(x - y)) <= c_i(c_j x - d_ij)."""
    if i == j:
        raise ValueError("Henkin's equation needs distinct indices")
    lhs = Cyl(j, product_of([x, y, Cyl(i, minus(x, y))]))
    rhs = Cyl(i, minus(Cyl(j, x), Diag(i, j)))
    return leq(lhs, rhs)


def henkin_sides(i: int, j: int, x: Term = X, y: Term = Y) -> tuple[Term, Term]:
    e = henkin_equation(i, j, x, y)
    return e.lhs.left, e.rhs


def a_term(m: int) -> Term:
    """a_m = c_0...c_{m-1} of the product of -d_ij over i < j < m."""
    if m < 1:
        raise ValueError("m must be at least 1")
    return cyl(range(m), _distinct(range(m)))
