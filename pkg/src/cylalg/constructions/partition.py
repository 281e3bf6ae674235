"""Partition witnesses: the set algebra generated by g = {s : (s_0, s_1) in R}
where R is an equivalence on U with k blocks of size n."""
from __future__ import annotations

import random
from dataclasses import dataclass

from ..algebra import SetAlgebra, closed_atoms, equation_holds_at, generate, unions
from ..families import partition_equation
from ..oracle import dimension_set, equiv_oracle, is_regular
from ..space import CylSpace, PointSet


@dataclass
class PartitionWitness:
    space: CylSpace
    algebra: SetAlgebra
    g: PointSet
    n: int
    blocks: int


def build_partition_witness(dim: int, n: int, blocks: int) -> PartitionWitness:
    if n < 2 or blocks < 1:
        raise ValueError("need n >= 2 and at least one block")
    if dim < n + 1:
        raise ValueError(f"dimension must be at least {n + 1}")
    space = CylSpace(dim, n * blocks)
    g = space.from_predicate(lambda c: c[0] // n == c[1] // n)
    return PartitionWitness(space, generate(space, [g]), PointSet(space, g), n, blocks)


def ek_status(w: PartitionWitness, k: int, cap: int = 1 << 16) -> dict:
    """Decide e_k in the witness algebra (rebuilt at dimension k+1 if needed).

    e_k(x) only depends on c_2...c_k x, so it suffices to check every element
    closed under c_2...c_k; those are all unions of the closed atoms.  Each is
    checked by term evaluation and by the oracle, and the two must agree.
    """
    if w.space.dim < k + 1:
        w = build_partition_witness(k + 1, w.n, w.blocks)
    sp, alg = w.space, w.algebra
    e = partition_equation(k, sp.dim)
    cat = closed_atoms(sp, alg.atoms, range(2, k + 1))
    elems, truncated = unions(cat, cap)
    by_term = by_oracle = True
    witness = None
    disagreements = 0
    for a in elems:
        t = equation_holds_at(sp, e, {"x": a})
        o = equiv_oracle(sp, PointSet(sp, a), k)
        if t != o:
            disagreements += 1
        if not t and witness is None:
            witness = PointSet(sp, a)
        by_term &= t
        by_oracle &= o
    status = "unknown" if truncated and by_term else ("valid" if by_term else "fails")
    return {"k": k, "dim": sp.dim, "status": status, "by_term": by_term, "by_oracle": by_oracle,
            "closed_atoms": len(cat), "checked": len(elems), "disagreements": disagreements,
            "truncated": truncated, "witness": witness}


def regularity_report(w: PartitionWitness, samples: int = 200, seed: int = 0) -> dict:
    """Regularity on every atom, on the enumerated carrier when it is complete,
    and on seeded random elements otherwise."""
    alg = w.algebra
    checked = bad = 0
    pool = list(alg.atoms)
    if not alg.truncated:
        pool += alg.carrier
    else:
        rng = random.Random(seed)
        pool += [alg.random_element(rng) for _ in range(samples)]
    for x in pool:
        checked += 1
        if not is_regular(PointSet(w.space, x)):
            bad += 1
    return {"checked": checked, "irregular": bad, "exhaustive": not alg.truncated}


def verify_partition(w: PartitionWitness, ks=(2, 3, 4), samples: int = 200, seed: int = 0) -> dict:
    sp, e = w.space, partition_equation(w.n, w.space.dim)
    return {
        "atoms": len(w.algebra.atoms),
        "carrier_truncated": w.algebra.truncated,
        "e_n_at_g_term": equation_holds_at(sp, e, {"x": w.g.bits}),
        "e_n_at_g_oracle": equiv_oracle(sp, w.g, w.n),
        "delta_g": sorted(dimension_set(w.g)),
        "g_regular": is_regular(w.g),
        "regularity": regularity_report(w, samples, seed),
        "matrix": {k: ek_status(w, k) for k in ks},
    }
