"""The split-atom algebra: take the set algebra B generated by a product atom
g = V_0 x V_1 x ... (V_0 a singleton) and split g into two new atoms g', g''
that each behave like g under every c_i.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..algebra import SetAlgebra, equation_holds_at, evaluate_raw, generate
from ..families import henkin_equation, henkin_sides
from ..finite import FiniteCA, _bits, check_ca_axioms, henkin_holds
from ..space import CylSpace, PointSet

PARTS = ("none", "g'", "g''", "g")


class SplitAlgebra(FiniteCA):
    """Atoms are those of B with g replaced by g' (same position) and g'' (last).

    Elements are masks over atoms; `canonical` and `element` convert to and
    from the pair (b, h) with b an element of B disjoint from g and h one of
    none, g', g'', g.
    """

    def __init__(self, base: SetAlgebra, g: int, blocks: list[int]):
        self.base = base
        self.space = base.space
        self.g = g
        self.blocks = list(blocks)
        self.gi = self.blocks.index(g)
        self.gii = len(self.blocks)
        src = FiniteCA.from_partition(base.space, self.blocks)

        def expand(mask: int) -> int:
            return mask | (1 << self.gii) if (mask >> self.gi) & 1 else mask

        cyl_table = []
        for i in range(src.dim):
            row = [expand(m) for m in src.cyl_table[i]]
            row.append(row[self.gi])
            cyl_table.append(row)
        diag = {k: expand(m) for k, m in src.diag_table.items()}
        labels = list(range(len(self.blocks))) + ["g''"]
        labels[self.gi] = "g'"
        super().__init__(src.dim, len(self.blocks) + 1, cyl_table, diag, labels)
        self.g1 = 1 << self.gi
        self.g2 = 1 << self.gii
        self.gg = self.g1 | self.g2

    def element(self, b: PointSet | int, h: str = "none") -> int:
        bits = b.bits if isinstance(b, PointSet) else b
        if bits & self.g:
            raise ValueError("b must be disjoint from g")
        m = 0
        for n, a in enumerate(self.blocks):
            if bits & a == a:
                m |= 1 << n
            elif bits & a:
                raise ValueError("b is not an element of B")
        return m | {"none": 0, "g'": self.g1, "g''": self.g2, "g": self.gg}[h]

    def canonical(self, x: int) -> tuple[PointSet, str]:
        h = PARTS[((x >> self.gi) & 1) | (((x >> self.gii) & 1) << 1)]
        bits = 0
        for n in _bits(x & ~self.gg):
            bits |= self.blocks[n]
        return PointSet(self.space, bits), h

    def from_base(self, x: PointSet | int) -> int:
        """Embed an element of B (g counted as g' + g'')."""
        bits = x.bits if isinstance(x, PointSet) else x
        if bits & self.g == self.g:
            return self.element(bits & ~self.g, "g")
        return self.element(bits, "none")

    def to_base(self, x: int) -> PointSet | None:
        """The B element equal to x, or None when x contains only one of g', g''."""
        b, h = self.canonical(x)
        if h in ("g'", "g''"):
            return None
        return PointSet(self.space, b.bits | (self.g if h == "g" else 0))


@dataclass
class SplitBuild:
    algebra: SplitAlgebra
    space: CylSpace
    sizes: tuple
    blocks_of_u: list[list[int]]   # V_i as lists of base elements
    g: PointSet


def build_split(dim: int, sizes) -> SplitBuild:
    sizes = tuple(int(s) for s in sizes)
    if dim < 3:
        raise ValueError("dimension must be at least 3")
    if len(sizes) != dim:
        raise ValueError("need one block size per coordinate")
    if sizes[0] != 1 or any(s < 2 for s in sizes[1:]):
        raise ValueError("V_0 must be a singleton and every other V_i needs at least 2 elements")
    vs, start = [], 0
    for s in sizes:
        vs.append(list(range(start, start + s)))
        start += s
    space = CylSpace(dim, start)
    g = space.from_predicate(lambda c: all(c[i] in vs[i] for i in range(dim)))
    base = generate(space, [g])
    if g not in base.atoms:
        raise ValueError("g is not an atom of the algebra it generates")
    return SplitBuild(SplitAlgebra(base, g, base.atoms), space, sizes, vs, PointSet(space, g))


def henkin_matrix(alg: FiniteCA) -> dict[tuple[int, int], object]:
    out = {}
    for i in range(alg.dim):
        for j in range(alg.dim):
            if i != j:
                out[(i, j)] = henkin_holds(alg, i, j)
    return out


def e01_at_g(build: SplitBuild) -> dict:
    """Evaluate both sides of e_01 at x = g, y = g'."""
    A = build.algebra
    env = {"x": A.gg, "y": A.g1}
    lhs_t, rhs_t = henkin_sides(0, 1)
    memo: dict = {}
    lhs = evaluate_raw(A, lhs_t, env, memo)
    rhs = evaluate_raw(A, rhs_t, env, memo)
    sp, vs = build.space, build.blocks_of_u
    c1g = sp.cyl(1, build.g.bits)
    v0 = set(vs[0])
    expected_rhs = sp.cyl(0, sp.from_predicate(
        lambda c: c[0] in v0 and c[1] not in v0 and all(c[k] in vs[k] for k in range(2, sp.dim))))
    lhs_b, rhs_b = A.to_base(lhs), A.to_base(rhs)
    return {
        "holds": equation_holds_at(A, henkin_equation(0, 1), env),
        "lhs_is_c1g": lhs_b is not None and lhs_b.bits == c1g,
        "rhs_matches": rhs_b is not None and rhs_b.bits == expected_rhs,
        "lhs_below_rhs": (lhs & ~rhs) == 0,
        "lhs": lhs_b,
        "rhs": rhs_b,
    }


def verify_split(build: SplitBuild, samples: int = 0, seed: int = 0) -> dict:
    A = build.algebra
    axioms = check_ca_axioms(A, "atoms")
    matrix = henkin_matrix(A)
    report = {
        "atoms": A.natoms,
        "g_is_atom": build.g.bits in build.algebra.base.atoms,
        "axioms_ok": axioms.ok,
        "axiom_failures": axioms.failures(),
        "henkin": {f"e_{i}{j}": v.status for (i, j), v in sorted(matrix.items())},
        "e01_at_g": e01_at_g(build),
    }
    if samples:
        sampled = check_ca_axioms(A, "sampled", samples=samples, seed=seed)
        report["sampled_axioms_ok"] = sampled.ok
    return report
