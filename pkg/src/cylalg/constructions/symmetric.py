"""Symmetrized products: the product of Rd^rho A over all permutations rho."""
from __future__ import annotations

from itertools import permutations

from ..finite import FiniteCA, ProductCA

DEFAULT_ATOM_BUDGET = 20_000


def build_symmetrized(alg, budget: int = DEFAULT_ATOM_BUDGET) -> ProductCA:
    fa = alg if isinstance(alg, FiniteCA) else alg.to_finite()
    perms = list(permutations(range(fa.dim)))
    if len(perms) * fa.natoms > budget:
        raise ValueError(f"{len(perms)} factors of {fa.natoms} atoms exceed the budget {budget}")
    out = ProductCA([fa.reduct(p) for p in perms])
    out.permutations = perms
    return out
