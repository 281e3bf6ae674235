import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import subsets, terms
from cylalg import families
from cylalg.algebra import (SetAlgebra, closed_elements, closure_worklist, eval_term, generate,
                            generated_atoms, rd_reduct)
from cylalg.finite import product
from cylalg.oracle import reference_eval
from cylalg.parser import parse, parse_equation
from cylalg.space import BudgetError, CylSpace, PointSet, cylindrify, diagonal, transpose
from cylalg.terms import Var, depth, rename, transposition

x = Var("x")


# space -----------------------------------------------------------------------

def test_cyl_examples(s32):
    p = PointSet.of_cells(s32, [(0, 1, 0)])
    assert set(cylindrify(0, p)) == {(0, 1, 0), (1, 1, 0)}
    assert not cylindrify(1, PointSet.empty(s32))
    assert cylindrify(2, PointSet.full(s32)) == PointSet.full(s32)


def test_diag_examples(s32):
    assert set(diagonal(s32, 0, 1)) == {(0, 0, 0), (0, 0, 1), (1, 1, 0), (1, 1, 1)}
    assert diagonal(s32, 0, 0) == PointSet.full(s32)


@pytest.mark.parametrize("dim,base", [(d, u) for d in (2, 3, 4) for u in (1, 2, 3, 4)])
def test_diag_size(dim, base):
    sp = CylSpace(dim, base)
    brute = sum(1 for s in itertools.product(range(base), repeat=dim) if s[0] == s[1])
    assert len(diagonal(sp, 0, 1)) == brute == base ** (dim - 1)


def test_cell_order_is_lexicographic(s32):
    assert list(s32.cells()) == list(itertools.product(range(2), repeat=3))
    assert all(s32.index(c) == k for k, c in enumerate(s32.cells()))


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_cyl_properties(data):
    sp = data.draw(st.sampled_from([CylSpace(3, 2), CylSpace(2, 3), CylSpace(4, 2)]))
    a, b = data.draw(subsets(sp)), data.draw(subsets(sp))
    i = data.draw(st.integers(0, sp.dim - 1))
    assert a <= a.cyl(i)
    assert a.cyl(i).cyl(i) == a.cyl(i)
    assert (a | b).cyl(i) == a.cyl(i) | b.cyl(i)
    naive = {s for s in sp.cells() if any(s[:i] + (u,) + s[i + 1:] in a for u in range(sp.base_size))}
    assert set(a.cyl(i)) == naive


def test_index_errors(s32):
    with pytest.raises(IndexError):
        s32.cyl(3, 0)
    with pytest.raises(IndexError):
        s32.diag(0, 5)


def test_budget():
    with pytest.raises(BudgetError):
        CylSpace(8, 10)
    with pytest.raises(BudgetError):
        CylSpace(4, 4, budget=100)
    with pytest.raises(ValueError):
        CylSpace(3, 0)


def test_mixed_spaces_rejected(s32, s33):
    with pytest.raises(ValueError):
        PointSet.full(s32) | PointSet.full(s33)


# evaluation ------------------------------------------------------------------

def test_eval_examples(s32):
    got = eval_term(s32, parse("c0(d0,1 & x)"), {"x": PointSet.of_cells(s32, [(1, 1, 0)])})
    assert set(got) == {(0, 1, 0), (1, 1, 0)}
    a2 = families.a_term(2)
    assert not eval_term(CylSpace(3, 1), a2)
    assert eval_term(s32, a2) == PointSet.full(s32)
    assert not eval_term(s32, parse("x ^ x"), {"x": PointSet.full(s32)})


def test_unbound_variable(s32):
    with pytest.raises(KeyError):
        eval_term(s32, parse("x + y"), {"x": PointSet.full(s32)})


SPACES = [CylSpace(3, 2), CylSpace(2, 3), CylSpace(4, 2), CylSpace(3, 3), CylSpace(4, 3), CylSpace(2, 16)]


@settings(max_examples=300, deadline=None)
@given(st.data())
def test_eval_matches_reference(data):
    sp = data.draw(st.sampled_from(SPACES))
    t = data.draw(terms(dim=sp.dim).filter(lambda u: depth(u) <= 5))
    env = {"x": data.draw(subsets(sp)), "y": data.draw(subsets(sp))}
    assert set(eval_term(sp, t, env)) == reference_eval(sp, t, env)


# transpositions ------------------------------------------------------------------

def test_transpose_examples(s32):
    assert set(transpose(0, 1, PointSet.of_cells(s32, [(0, 1, 0)]))) == {(1, 0, 0)}


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_transpose_involution_and_diagonals(data):
    sp = CylSpace(4, 2)
    a = data.draw(subsets(sp))
    i, j, k, l = (data.draw(st.integers(0, 3)) for _ in range(4))
    assert a.transpose(i, j).transpose(i, j) == a
    r = transposition(i, j)
    assert diagonal(sp, k, l).transpose(i, j) == diagonal(sp, r.get(k, k), r.get(l, l))


# generated subalgebras ---------------------------------------------------------------

def _brute_closure(space, gens):
    """Closure by fixpoint over every operation on every pair."""
    cur = {0, space.full, *gens} | {space.diag(i, j) for i in range(space.dim) for j in range(space.dim)}
    while True:
        nxt = set(cur)
        for a in cur:
            nxt.add(space.full ^ a)
            nxt.update(space.cyl(i, a) for i in range(space.dim))
            nxt.update(a | b for b in cur)
        if nxt == cur:
            return cur
        cur = nxt


def test_generate_diagonal_d2():
    sp = CylSpace(2, 2)
    alg = generate(sp)
    assert set(alg.carrier) == _brute_closure(sp, [])
    d = sp.diag(0, 1)
    assert set(alg.carrier) == {0, d, sp.full ^ d, sp.full}


@pytest.mark.parametrize("dim,base", [(2, 2), (2, 3), (3, 2), (3, 3)])
def test_generate_matches_worklist(dim, base):
    sp = CylSpace(dim, base)
    rng = random.Random(dim * 10 + base)
    checked = 0
    for gens in ([], [sp.random_element(rng)], [sp.random_element(rng, 0.1)], [1], [1 << (sp.ncells - 1)]):
        alg = generate(sp, gens)
        if len(alg.atoms) > 11:
            continue
        ref, trunc = closure_worklist(sp, gens, cap=4096)
        assert not trunc
        assert set(alg.carrier) == ref
        assert len(ref) == 2 ** len(alg.atoms)
        checked += 1
    assert checked >= (1 if sp.ncells > 9 else 2)


def test_generate_matches_brute_small():
    sp = CylSpace(2, 2)
    for g in range(16):
        assert set(generate(sp, [g]).carrier) == _brute_closure(sp, [g])


def test_generate_truncation():
    sp = CylSpace(3, 2)
    alg = generate(sp, [1], cap=1)
    assert alg.truncated and len(alg.carrier) == 1
    assert alg.holds(parse_equation("x = x")).status == "unknown"


def test_atoms_partition_space(s33):
    atoms = generated_atoms(s33, [s33.random_element(random.Random(5))])
    total = 0
    for a in atoms:
        assert a and not (a & total)
        total |= a
    assert total == s33.full


def test_generated_contains_diagonals(s33):
    alg = generate(s33, [s33.random_element(random.Random(9))])
    for i in range(3):
        for j in range(3):
            assert alg.contains(s33.diag(i, j))


# validity ----------------------------------------------------------------------------

def test_holds_examples(s32):
    alg = generate(s32, [s32.random_element(random.Random(1))])
    assert alg.holds(parse_equation("c0(c1(x)) = c1(c0(x))")).valid
    v = alg.holds(parse_equation("x = 0"))
    assert v.fails and v.witness["x"]
    assert eval_term(s32, parse("x"), v.witness) != PointSet.empty(s32)


def test_henkin_sampled_on_full():
    sp = CylSpace(3, 3)
    v = SetAlgebra.full(sp).holds(families.henkin_equation(0, 1), "sampled", samples=200, seed=7)
    assert v.valid and v.checked == 200


def test_full_exhaustive_refused():
    v = SetAlgebra.full(CylSpace(3, 3)).holds(parse_equation("x = x"))
    assert v.status == "unknown" and v.truncated


def test_sampled_deterministic():
    alg = SetAlgebra.full(CylSpace(3, 3))
    e = parse_equation("c0(x) = x")
    a, b = alg.holds(e, "sampled", seed=3), alg.holds(e, "sampled", seed=3)
    assert a.witness == b.witness and a.fails


def test_closed_elements_brute(s32):
    alg = generate(s32)
    for i in range(3):
        got, trunc = closed_elements(alg, [i])
        assert not trunc
        assert set(got) == {a for a in alg.carrier if s32.cyl(i, a) == a}
        assert {0, s32.full} <= set(got)
        assert all(s32.cyl(i, a) in set(got) for a in alg.carrier)


# reducts and products -----------------------------------------------------------------

def test_reduct_rejects_non_permutation(s32):
    alg = generate(s32)
    with pytest.raises(ValueError):
        rd_reduct(alg, [0, 0, 1])
    with pytest.raises(ValueError):
        rd_reduct(alg, [0, 1])


def test_reduct_law_small():
    rng = random.Random(4)
    sp = CylSpace(3, 2)
    alg = generate(sp, [sp.random_element(rng)])
    eqs = [parse_equation(t) for t in ("c0(x) & d0,1 = c1(x) & d0,1", "c0(x & d1,2) = c0(x) & d1,2",
                                       "c0(c1(x)) = c1(c0(x))", "c2(x) = x")]
    for rho in itertools.permutations(range(3)):
        view = rd_reduct(alg, rho)
        back = rd_reduct(view, [rho.index(k) for k in range(3)])
        for e in eqs:
            assert view.holds(e).status == alg.holds(rename(e, dict(enumerate(rho)))).status
            assert back.holds(e).status == alg.holds(e).status
    ident = rd_reduct(alg, range(3))
    assert all(ident.holds(e).status == alg.holds(e).status for e in eqs)


def test_product_componentwise():
    sp = CylSpace(3, 2)
    a = generate(sp, [PointSet.of_cells(sp, [(0, 1, 1)])]).to_finite()
    b = generate(sp).to_finite()
    e = parse_equation("c0(c1(x)) = c0(c1(c2(x)))")
    assert b.holds(e).valid and a.holds(e).fails
    assert product([a, b]).holds(e).fails
    assert product([b, b]).holds(e).valid
    single = product([a])
    for q in ("c0(x) = x", "c1(x) & d0,1 = x & d0,1", "c2(c1(x)) = c1(c2(x))"):
        eq = parse_equation(q)
        assert single.holds(eq).status == a.holds(eq).status
