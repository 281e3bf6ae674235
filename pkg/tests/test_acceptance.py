"""The ten acceptance criteria, each printing one PASS/FAIL line."""
import itertools
import json
import random
import time

import pytest

from cylalg import families
from cylalg.algebra import SetAlgebra, closed_atoms, closed_elements, equation_holds_at, eval_term, generate, rd_reduct
from cylalg.constructions.partition import build_partition_witness, verify_partition
from cylalg.constructions.rational import check_pl, cut_witnesses, in_T, pl_automorphism, random_increasing, random_point
from cylalg.constructions.split import build_split, e01_at_g, henkin_matrix
from cylalg.constructions.symmetric import build_symmetrized
from cylalg.finite import check_ca_axioms
from cylalg.oracle import equiv_oracle, express_oracle, is_closed
from cylalg.parser import parse_equation
from cylalg.proof import Bounds, audit_equation, audit_soundness, derivation_json, enumerate_theorems
from cylalg.space import CylSpace, PointSet
from cylalg.terms import ONE, ZERO, Complement, Cyl, Diag, Equation, Product, Sum, SymDiff, Var, rename, transposition


@pytest.fixture
def criterion(capsys):
    """Run a criterion body under a time limit and print its verdict line."""
    def run(n, limit, body):
        t0 = time.perf_counter()
        detail, err = "", None
        try:
            detail = body() or ""
        except AssertionError as exc:
            err = exc
        elapsed = time.perf_counter() - t0
        ok = err is None and elapsed < limit
        note = detail if err is None else f"assertion failed: {err}"
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {n}: {note} ({elapsed:.1f}s, limit {limit}s)")
        if err is not None:
            raise err
        assert elapsed < limit, f"criterion {n} took {elapsed:.1f}s"
    return run


def random_term(rng, dim, names, depth):
    if depth == 0 or rng.random() < 0.25:
        k = rng.randrange(4)
        if k == 0:
            return Diag(rng.randrange(dim), rng.randrange(dim))
        if k == 1:
            return rng.choice([ZERO, ONE])
        return Var(rng.choice(names))
    op = rng.randrange(5)
    if op == 0:
        return Complement(random_term(rng, dim, names, depth - 1))
    if op == 1:
        return Cyl(rng.randrange(dim), random_term(rng, dim, names, depth - 1))
    cls = (Sum, Product, SymDiff)[op - 2]
    return cls(random_term(rng, dim, names, depth - 1), random_term(rng, dim, names, depth - 1))


def random_equation(rng, dim, names, depth):
    return Equation(random_term(rng, dim, names, depth), random_term(rng, dim, names, depth))


# 1 ------------------------------------------------------------------------------------------

def test_criterion_1_axioms(criterion):
    def body():
        instances = by_elements = by_atoms = 0
        for dim, base in itertools.product((3, 4), (2, 3)):
            sp = CylSpace(dim, base)
            algs = [generate(sp)]
            for seed in range(20):
                algs.append(generate(sp, [sp.random_element(random.Random(seed))]))
            for alg in algs:
                small = alg.carrier is not None and not alg.truncated and len(alg.carrier) <= 64
                rep = check_ca_axioms(alg, "exhaustive" if small else "atoms")
                assert rep.ok, (dim, base, rep.failures()[:1])
                instances += rep.count()
                by_elements += small
                by_atoms += not small
        return f"{instances} axiom instances hold ({by_elements} carriers by elements, {by_atoms} by atoms)"
    criterion(1, 30, body)


# 2 ------------------------------------------------------------------------------------------

def test_criterion_2_express(criterion):
    def body():
        e = families.master_equation()
        sp2 = CylSpace(3, 2)
        for b in range(1 << 8):
            assert express_oracle(sp2, PointSet(sp2, b)) == equation_holds_at(sp2, e, {"x": b}), b
        sp3 = CylSpace(3, 3)
        rng = random.Random(2)
        for _ in range(500):
            b = sp3.random_element(rng)
            assert express_oracle(sp3, PointSet(sp3, b)) == equation_holds_at(sp3, e, {"x": b})
        return "256 exhaustive + 500 seeded subsets agree"
    criterion(2, 60, body)


# 3 ------------------------------------------------------------------------------------------

def test_criterion_3_equiv(criterion):
    def body():
        e = families.partition_equation(2, 4)
        small = CylSpace(4, 2)
        atoms = closed_atoms(small, [1 << k for k in range(small.ncells)], [2])
        count = 0
        for mask in range(1 << len(atoms)):
            x = 0
            for k, a in enumerate(atoms):
                if mask >> k & 1:
                    x |= a
            assert equiv_oracle(small, PointSet(small, x), 2) == equation_holds_at(small, e, {"x": x})
            count += 1
        brute = sum(is_closed(small, PointSet(small, b), [2]) for b in range(1 << small.ncells))
        assert brute == count
        big = CylSpace(4, 4)
        atoms = closed_atoms(big, [1 << k for k in range(big.ncells)], [2])
        rng = random.Random(3)
        # half the samples carry a planted uniform section on the slab s3 = 0
        blocks = big.from_predicate(lambda c: c[0] // 2 == c[1] // 2)
        slab = big.from_predicate(lambda c: c[3] == 0)
        falses = 0
        for n in range(300):
            x = 0
            for a in atoms:
                if rng.getrandbits(1):
                    x |= a
            if n % 2:
                x = (x & ~slab) | (blocks & slab)
            o = equiv_oracle(big, PointSet(big, x), 2)
            assert o == equation_holds_at(big, e, {"x": x})
            falses += not o
        return f"{count} closed subsets of ^4{{0,1}} + 300 of ^4{{0..3}} agree ({falses} false)"
    criterion(3, 60, body)


# 4 ------------------------------------------------------------------------------------------

def test_criterion_4_split(criterion):
    def body():
        build = build_split(3, (1, 2, 2))
        A = build.algebra
        rep = check_ca_axioms(A, "atoms")
        assert rep.ok
        r = e01_at_g(build)
        assert not r["holds"] and r["lhs_is_c1g"] and r["rhs_matches"] and not r["lhs_below_rhs"]
        matrix = henkin_matrix(A)
        for i in range(2, 3):
            assert matrix[(i, 1)].valid
        assert matrix[(0, 1)].fails
        full = SetAlgebra.full(CylSpace(3, 5))
        v = full.holds(families.henkin_equation(0, 1), "sampled", samples=1000, seed=4)
        assert v.valid and v.checked == 1000
        return (f"{rep.count()} axiom instances on {A.natoms} atoms; e_01 fails at (g,g'); "
                f"e_21 valid; e_01 valid on 1000 samples of ^3{{0..4}}")
    criterion(4, 120, body)


# 5 ------------------------------------------------------------------------------------------

FROZEN_EK = {2: "fails", 3: "valid", 4: "fails"}


def test_criterion_5_partition(criterion):
    def body():
        w = build_partition_witness(4, 2, 2)
        rep = verify_partition(w, (2, 3, 4), samples=200, seed=5)
        assert not rep["e_n_at_g_term"] and not rep["e_n_at_g_oracle"]
        assert rep["delta_g"] == [0, 1] and rep["g_regular"]
        assert rep["regularity"]["irregular"] == 0
        got = {k: m["status"] for k, m in rep["matrix"].items()}
        assert got == FROZEN_EK
        assert all(m["disagreements"] == 0 for m in rep["matrix"].values())
        return f"e_2 fails at g both ways; matrix {got}; {rep['regularity']['checked']} elements regular"
    criterion(5, 120, body)


# 6 ------------------------------------------------------------------------------------------

def test_criterion_6_rational(criterion):
    def body():
        rng = random.Random(6)
        for _ in range(200):
            s = random_point(rng, 8)
            assert in_T(s)
            for i in range(8):
                cut_witnesses(s, i)
        for _ in range(100):
            n = rng.randint(1, 5)
            a, b = random_increasing(rng, n), random_increasing(rng, n)
            assert check_pl(pl_automorphism(a, b), a, b, 1000, rng)
        return "200 points x 8 cut witnesses; 100 PL maps x 1000 pairs"
    criterion(6, 30, body)


# 7 ------------------------------------------------------------------------------------------

def test_criterion_7_substitution_iso(criterion):
    def body():
        algs = [generate(CylSpace(3, 2)),
                generate(CylSpace(3, 2), [CylSpace(3, 2).random_element(random.Random(7))]),
                generate(CylSpace(3, 3), [CylSpace(3, 3).random_element(random.Random(8), 0.2)])]
        pairs = 0
        for alg in algs:
            sp = alg.space
            d01 = sp.diag(0, 1)
            s = lambda x: sp.cyl(0, d01 & x)        # s^0_1
            inv = lambda y: sp.cyl(1, d01 & y)      # s^1_0
            dom, t1 = closed_elements(alg, [1])
            cod, t2 = closed_elements(alg, [0])
            assert not t1 and not t2
            image = [s(x) for x in dom]
            assert sorted(image) == sorted(cod) and len(set(image)) == len(dom)
            assert all(inv(s(x)) == x for x in dom) and all(s(inv(y)) == y for y in cod)
            assert s(0) == 0 and s(sp.full) == sp.full
            assert s(sp.diag(0, 2)) == sp.diag(1, 2)
            assert s(sp.diag(2, 2)) == sp.diag(2, 2)
            for x in dom:
                assert s(sp.full ^ x) == sp.full ^ s(x)
                assert s(sp.cyl(2, x)) == sp.cyl(2, s(x))
                assert s(sp.cyl(0, x)) == sp.cyl(1, s(x))
            for x, y in itertools.product(dom, repeat=2):
                assert s(x | y) == s(x) | s(y) and s(x & y) == s(x) & s(y)
                pairs += 1
        return f"bijection and homomorphism on 3 algebras ({pairs} pairs)"
    criterion(7, 30, body)


# 8 ------------------------------------------------------------------------------------------

def test_criterion_8_transpositions(criterion):
    def body():
        sp = CylSpace(4, 3)
        rng = random.Random(8)
        draw = lambda: PointSet(sp, sp.random_element(rng))
        pairs = [(i, j) for i in range(4) for j in range(4) if i != j]
        for _ in range(500):
            i, j = rng.choice(pairs)
            r = transposition(i, j)
            x, y = draw(), draw()
            assert x.transpose(i, j).transpose(i, j) == x
            assert (x | y).transpose(i, j) == x.transpose(i, j) | y.transpose(i, j)
            assert (~x).transpose(i, j) == ~x.transpose(i, j)
            k = rng.randrange(4)
            assert x.cyl(k).transpose(i, j) == x.transpose(i, j).cyl(r.get(k, k))
            k, l = rng.choice(pairs)
            assert x.transpose(k, l).transpose(i, j) == x.transpose(i, j).transpose(r.get(k, k), r.get(l, l))
            k, l = rng.randrange(4), rng.randrange(4)
            d = PointSet(sp, sp.diag(k, l))
            assert d.transpose(i, j) == PointSet(sp, sp.diag(r.get(k, k), r.get(l, l)))
        corpus = [random_term(rng, 4, ("x", "y"), 4) for _ in range(100)]
        for n in range(500):
            t = corpus[n % len(corpus)]
            i, j = rng.choice(pairs)
            env = {"x": draw(), "y": draw()}
            swapped = {v: p.transpose(i, j) for v, p in env.items()}
            lhs = eval_term(sp, t, env).transpose(i, j)
            rhs = eval_term(sp, rename(t, transposition(i, j)), swapped)
            assert lhs == rhs
        return "6 identities on 500 subsets each; rename law on 500 (term, assignment) samples"
    criterion(8, 60, body)


# 9 ------------------------------------------------------------------------------------------

def test_criterion_9_proof_engine(criterion):
    def body():
        b = Bounds(index_bound=4, term_depth=5, variable_count=3, step_budget=10_000)
        run = enumerate_theorems(b)
        assert len(run.theorems) == 10_000
        bad = []
        for t in run.theorems:
            a = audit_soundness(t, trials=25, seed=9)
            if not a.ok:
                bad.append((t.text, a.failure))
        assert not bad, bad[:1]
        firings = len(run.inductive_log)
        novel = sum(1 for x in run.inductive_log if x[4])
        assert firings >= 50
        for pid, i, text, mi, _ in run.inductive_log:
            assert audit_equation(parse_equation(text), mi, trials=5, seed=9, label=text).ok
        again = enumerate_theorems(b)
        first = "\n".join(json.dumps(derivation_json(t), sort_keys=True) for t in run.theorems)
        second = "\n".join(json.dumps(derivation_json(t), sort_keys=True) for t in again.theorems)
        assert first == second and run.inductive_log == again.inductive_log
        return (f"10000 theorems audited x 25 algebras; inductive rule fired {firings} times "
                f"({novel} new); two runs identical")
    criterion(9, 300, body)


# 10 -----------------------------------------------------------------------------------------

def _small_algebra(rng, dim):
    base = rng.choice((2, 3)) if dim == 3 else 2
    sp = CylSpace(dim, base)
    gens = [] if rng.random() < 0.3 else [sp.random_element(rng, rng.choice((0.05, 0.1)))]
    return generate(sp, gens)


def test_criterion_10_reducts(criterion):
    def body():
        rng = random.Random(10)
        decided = valid = 0
        for _ in range(100):
            dim = rng.choice((2, 3, 4))
            alg = _small_algebra(rng, dim)
            rho = list(range(dim))
            rng.shuffle(rho)
            if rng.random() < 0.5:
                e = random_equation(rng, dim, ("x",), 3)
            else:
                e = rng.choice(families.axiom_instances(dim))[2]
                e = rename(e, dict(enumerate(rng.sample(range(dim), dim))))
            mode = "exhaustive" if len(alg.atoms) <= 12 else "sampled"
            lhs = rd_reduct(alg, rho).holds(e, mode, samples=100, seed=1)
            rhs = alg.holds(rename(e, dict(enumerate(rho))), mode, samples=100, seed=1)
            assert lhs.status == rhs.status, (e, rho)
            decided += lhs.status != "unknown"
            valid += lhs.valid
        assert decided == 100
        sp = CylSpace(3, 2)
        sym = build_symmetrized(generate(sp, [sp.from_cells([(0, 1, 1), (1, 0, 1)])]))
        sym_valid = 0
        for _ in range(50):
            e = random_equation(rng, 3, ("x",), 3)
            base = sym.holds(e).status
            assert base != "unknown"
            for p in itertools.permutations(range(3)):
                assert sym.holds(rename(e, dict(enumerate(p)))).status == base
            sym_valid += base == "valid"
        return (f"reduct law on 100 triples ({valid} valid); symmetry on 50 equations "
                f"({sym_valid} valid) over {len(sym.factors)} factors")
    criterion(10, 60, body)
