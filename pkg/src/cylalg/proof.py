"""Forward enumeration of cylindric equational theorems.

Start from the cylindric axiom instances and a Boolean basis, close under
reflexivity, symmetry, transitivity, one-hole congruence, substitution and the
inductive rule (from e(c_i x1, ..., c_i xn) infer e(x1, ..., xn) when i does
not occur in e), breadth first by derivation size.
"""
from __future__ import annotations

import heapq
import random
from dataclasses import dataclass, field
from typing import Iterator

from .algebra import equation_holds_at
from .families import axiom_instances
from .parser import format_equation, format_term
from .space import CylSpace
from .terms import (BINARY, ONE, ZERO, Complement, Cyl, Diag, Equation, Product, Sum, SymDiff,
                    Term, Var, depth, indices, inductive_premise_match, map_term, substitute,
                    variables)

RULES = ("axiom", "reflexivity", "symmetry", "transitivity", "congruence", "substitution", "inductive")

_x, _y, _z = Var("x"), Var("y"), Var("z")

BOOLEAN_BASIS = [
    ("sum_comm", Equation(Sum(_x, _y), Sum(_y, _x))),
    ("prod_comm", Equation(Product(_x, _y), Product(_y, _x))),
    ("sum_dist", Equation(Sum(_x, Product(_y, _z)), Product(Sum(_x, _y), Sum(_x, _z)))),
    ("prod_dist", Equation(Product(_x, Sum(_y, _z)), Sum(Product(_x, _y), Product(_x, _z)))),
    ("sum_zero", Equation(Sum(_x, ZERO), _x)),
    ("prod_one", Equation(Product(_x, ONE), _x)),
    ("sum_compl", Equation(Sum(_x, Complement(_x)), ONE)),
    ("prod_compl", Equation(Product(_x, Complement(_x)), ZERO)),
    ("symdiff_def", Equation(SymDiff(_x, _y), Sum(Product(_x, Complement(_y)),
                                                    Product(Complement(_x), _y)))),
]


@dataclass(frozen=True)
class Bounds:
    index_bound: int = 3
    term_depth: int = 4
    variable_count: int = 2
    step_budget: int = 1000
    max_size: int | None = None
    inductive: bool = True

    def __post_init__(self):
        if min(self.index_bound, self.term_depth, self.variable_count, self.step_budget) < 1:
            raise ValueError("bounds must be positive")


@dataclass
class Theorem:
    id: int
    equation: Equation
    rule: str
    premises: tuple
    data: tuple
    max_index_used: int
    size: int
    text: str = ""

    def line(self) -> str:
        return self.text


# canonical forms ------------------------------------------------------------------

_OPS = {Sum: "+", Product: "&", SymDiff: "^"}


def _canon(t: Term, names: dict | None):
    """Bottom-up: (sorted term, anonymous key, named key).  Keys are prefix
    strings, computed once per node."""
    if isinstance(t, Var):
        v = names.get(t.name, t) if names else t
        return v, "v", v.name
    if isinstance(t, BINARY):
        a, b = _canon(t.left, names), _canon(t.right, names)
        if (b[1], b[2]) < (a[1], a[2]):
            a, b = b, a
        op = _OPS[type(t)]
        return (type(t)(a[0], b[0]), f"{op}({a[1]},{b[1]})", f"{op}({a[2]},{b[2]})")
    if isinstance(t, Complement):
        a = _canon(t.arg, names)
        return Complement(a[0]), "~" + a[1], "~" + a[2]
    if isinstance(t, Cyl):
        a = _canon(t.arg, names)
        return Cyl(t.index, a[0]), f"c{t.index}({a[1]})", f"c{t.index}({a[2]})"
    k = format_term(t)
    return t, k, k


def _oriented(e: Equation, names):
    l, r = _canon(e.lhs, names), _canon(e.rhs, names)
    if (r[1], r[2]) < (l[1], l[2]):
        l, r = r, l
    return l[0], r[0]


def canonical(e: Equation) -> Equation:
    """Operands of +, & and ^ sorted, sides ordered, variables renamed x0, x1, ...
    in order of first occurrence.  Only valid transformations are used, so an
    equation and its canonical form are equivalent."""
    lhs, rhs = _oriented(e, None)
    names = {v: Var(f"x{k}") for k, v in enumerate(variables(Equation(lhs, rhs)))}
    return Equation(*_oriented(Equation(lhs, rhs), names))


def _shape(t: Term, acc: list) -> int:
    """Depth of t; collects variable names and indices into acc = [vars, max index]."""
    if isinstance(t, Var):
        acc[0].add(t.name)
        return 1
    if isinstance(t, Diag):
        acc[1] = max(acc[1], t.i, t.j)
        return 1
    if isinstance(t, Cyl):
        acc[1] = max(acc[1], t.index)
        return 1 + _shape(t.arg, acc)
    if isinstance(t, Complement):
        return 1 + _shape(t.arg, acc)
    if isinstance(t, BINARY):
        return 1 + max(_shape(t.left, acc), _shape(t.right, acc))
    return 1


# rules ------------------------------------------------------------------------------

def apply_context(ctx: tuple, t: Term) -> Term:
    kind = ctx[0]
    if kind == "cyl":
        return Cyl(ctx[1], t)
    if kind == "compl":
        return Complement(t)
    if kind == "sum":
        return Sum(t, ctx[1])
    if kind == "prod":
        return Product(t, ctx[1])
    if kind == "xor":
        return SymDiff(t, ctx[1])
    raise ValueError(f"unknown context {ctx!r}")


def _ctx_indices(ctx) -> set:
    if ctx[0] == "cyl":
        return {ctx[1]}
    if len(ctx) > 1:
        return set(indices(ctx[1]))
    return set()


class RuleError(ValueError):
    pass


def apply_rule(rule: str, premises: list[Equation], data: tuple = ()) -> Equation:
    """One step of equational logic (or the inductive rule)."""
    if rule == "reflexivity":
        (t,) = data
        return Equation(t, t)
    if rule == "symmetry":
        (p,) = premises
        return Equation(p.rhs, p.lhs)
    if rule == "transitivity":
        p, q = premises
        fp, fq = data if data else (0, 0)
        if fp:
            p = Equation(p.rhs, p.lhs)
        if fq:
            q = Equation(q.rhs, q.lhs)
        if p.rhs != q.lhs:
            raise RuleError("transitivity: middle terms differ")
        return Equation(p.lhs, q.rhs)
    if rule == "congruence":
        (p,) = premises
        (ctx,) = data
        return Equation(apply_context(ctx, p.lhs), apply_context(ctx, p.rhs))
    if rule == "substitution":
        (p,) = premises
        return substitute(p, dict(data))
    if rule == "inductive":
        (p,) = premises
        (i,) = data
        for e, k in inductive_premise_match(p):
            if k == i:
                return e
        raise RuleError(f"inductive rule does not apply with index {i}")
    raise RuleError(f"unknown rule {rule}")


def apply_inductive(t: Theorem) -> list[tuple[Equation, int]]:
    return inductive_premise_match(t.equation)


# enumeration ---------------------------------------------------------------------------

def axiom_seeds(index_bound: int) -> list[tuple[str, Equation]]:
    out = [(name, e) for name, e in BOOLEAN_BASIS]
    out += [(f"{name}{''.join(map(str, idx))}", e) for name, idx, e in axiom_instances(index_bound)]
    return out


@dataclass
class Enumeration:
    bounds: Bounds
    theorems: list = field(default_factory=list)
    truncated: bool = False
    rediscovered: dict = field(default_factory=dict)
    fired: dict = field(default_factory=dict)
    # every application of the inductive rule: (premise id, index, conclusion, max_index_used, novel)
    inductive_log: list = field(default_factory=list)

    def lines(self) -> list[str]:
        return [t.text for t in self.theorems]

    def by_rule(self) -> dict:
        out: dict = {}
        for t in self.theorems:
            out[t.rule] = out.get(t.rule, 0) + 1
        return out


class Enumerator:
    def __init__(self, bounds: Bounds):
        self.b = bounds
        self.heap: list = []
        self.seen: set[str] = set()
        self.by_side: dict[str, list] = {}
        self.seq = 0
        self.out = Enumeration(bounds)

    def _ok(self, e: Equation) -> bool:
        b = self.b
        acc = [set(), -1]
        if _shape(e.lhs, acc) > b.term_depth or _shape(e.rhs, acc) > b.term_depth:
            return False
        return len(acc[0]) <= b.variable_count and acc[1] < b.index_bound

    def push(self, e: Equation, rule: str, premises: tuple, data: tuple, mi: int, size: int):
        """Queue a derived equation.  Returns its canonical text, or None when
        it is out of bounds or trivial."""
        if not self._ok(e):
            return None
        c = canonical(e)
        if c.lhs == c.rhs and rule != "reflexivity":
            return None
        text = format_equation(c)
        if text in self.seen:
            self.out.rediscovered[rule] = self.out.rediscovered.get(rule, 0) + 1
            return text
        self.out.fired[rule] = self.out.fired.get(rule, 0) + 1
        mi = max([mi] + list(indices(c)))
        self.seq += 1
        heapq.heappush(self.heap, (size, text, self.seq, c, rule, premises, data, mi))
        return text

    def seed(self):
        for name, e in axiom_seeds(self.b.index_bound):
            self.push(e, "axiom", (), (name,), -1, 1)
        self.push(Equation(_x, _x), "reflexivity", (), (_x,), -1, 1)

    def pool(self, vs: list[str]) -> list[Term]:
        b = self.b
        names = [Var(v) for v in vs]
        if len(vs) < b.variable_count:
            names.append(Var(_fresh(vs)))
        out: list[Term] = [ZERO, ONE]
        out += [Diag(i, j) for i in range(b.index_bound) for j in range(i + 1, b.index_bound)]
        for w in names:
            out += [Cyl(i, w) for i in range(b.index_bound)]
            out.append(Complement(w))
        for a in range(len(names)):
            for c in range(a + 1, len(names)):
                out += [Sum(names[a], names[c]), Product(names[a], names[c])]
        return out

    def expand(self, t: Theorem):
        e, b = t.equation, self.b
        vs = variables(e)
        prem = (t.id,)
        # congruence
        ctxs: list[tuple] = [("cyl", i) for i in range(b.index_bound)] + [("compl",)]
        names = list(vs) + ([_fresh(vs)] if len(vs) < b.variable_count else [])
        for v in names:
            ctxs += [("sum", Var(v)), ("prod", Var(v))]
        for ctx in ctxs:
            mi = max([t.max_index_used] + list(_ctx_indices(ctx)))
            self.push(apply_rule("congruence", [e], (ctx,)), "congruence", prem, (ctx,), mi, t.size + 1)
        # substitution
        for v in vs:
            for term in self.pool(vs):
                if term == Var(v):
                    continue
                data = ((v, term),)
                mi = max([t.max_index_used] + list(indices(term)))
                self.push(apply_rule("substitution", [e], data), "substitution", prem, data, mi, t.size + 1)
            for u in vs:
                if u != v:
                    data = ((v, Var(u)),)
                    self.push(apply_rule("substitution", [e], data), "substitution", prem, data,
                              t.max_index_used, t.size + 1)
        # transitivity with everything emitted so far (including t itself)
        sides = [(0, e.lhs, e.rhs), (1, e.rhs, e.lhs)]
        for fg, a, mid in sides:
            for (pid, fp, q) in self.by_side.get(format_term(mid), ()):
                p = self.out.theorems[pid]
                concl = Equation(a, q)
                mi = max(t.max_index_used, p.max_index_used)
                self.push(concl, "transitivity", (t.id, pid), (fg, fp), mi, t.size + p.size + 1)
        # inductive
        if b.inductive:
            for conc, i in apply_inductive(t):
                mi = max(t.max_index_used, i)
                known = self._known(conc)
                text = self.push(conc, "inductive", prem, (i,), mi, t.size + 1)
                if text is not None:
                    self.out.inductive_log.append((t.id, i, text, mi, not known))

    def _known(self, e: Equation) -> bool:
        if not self._ok(e):
            return False
        return format_equation(canonical(e)) in self.seen

    def _index(self, t: Theorem):
        e = t.equation
        self.by_side.setdefault(format_term(e.lhs), []).append((t.id, 0, e.rhs))
        self.by_side.setdefault(format_term(e.rhs), []).append((t.id, 1, e.lhs))

    def run(self) -> Iterator[Theorem]:
        self.seed()
        b = self.b
        while self.heap:
            size, text, _, eq, rule, premises, data, mi = heapq.heappop(self.heap)
            if text in self.seen:
                self.out.rediscovered[rule] = self.out.rediscovered.get(rule, 0) + 1
                continue
            if b.max_size is not None and size > b.max_size:
                return
            if len(self.out.theorems) >= b.step_budget:
                self.out.truncated = True
                return
            self.seen.add(text)
            t = Theorem(len(self.out.theorems), eq, rule, premises, data, mi, size, text)
            self.out.theorems.append(t)
            self._index(t)
            yield t
            self.expand(t)


def _fresh(vs) -> str:
    k = 0
    while f"x{k}" in vs:
        k += 1
    return f"x{k}"


def enumerate_theorems(bounds: Bounds) -> Enumeration:
    en = Enumerator(bounds)
    for _ in en.run():
        pass
    return en.out


def premise_equations(run: Enumeration, t: Theorem) -> list[Equation]:
    return [run.theorems[p].equation for p in t.premises]


def replay(run: Enumeration, t: Theorem) -> Equation:
    """Re-derive t from its premises' equations and compare."""
    if t.rule == "axiom":
        (name,) = t.data
        table = dict(axiom_seeds(run.bounds.index_bound))
        return canonical(table[name])
    return canonical(apply_rule(t.rule, premise_equations(run, t), t.data))


def derivation_json(t: Theorem) -> dict:
    def enc(d):
        if isinstance(d, Term):
            return format_term(d)
        if isinstance(d, tuple):
            return [enc(x) for x in d]
        return d
    return {"id": t.id, "equation": t.text, "rule": t.rule, "premises": list(t.premises),
            "data": enc(t.data), "max_index_used": t.max_index_used, "size": t.size}


# soundness audit ---------------------------------------------------------------------------

@dataclass
class Audit:
    ok: bool
    trials: int
    failure: dict | None = None


_SPACES: dict = {}


def _space(dim: int, base: int) -> CylSpace:
    key = (dim, base)
    if key not in _SPACES:
        _SPACES[key] = CylSpace(dim, base)
    return _SPACES[key]


def audit_equation(e: Equation, max_index_used: int, trials: int = 25, seed: int = 0,
                   assignments: int = 3, label: str = "") -> Audit:
    """Check e in seeded random finite set algebras whose dimension exceeds
    every index used in its derivation (not just those left in e)."""
    need = max(max_index_used, max(indices(e), default=-1)) + 1
    vs = variables(e)
    for k in range(trials):
        rng = random.Random(f"{seed}:{label}:{k}")
        dim = max(need, 1) + rng.randint(0, 1)
        base = rng.choice((1, 2, 2, 3)) if dim <= 4 else rng.choice((1, 2))
        sp = _space(dim, base)
        for _ in range(assignments if vs else 1):
            env = {v: sp.random_element(rng) for v in vs}
            if not equation_holds_at(sp, e, env):
                return Audit(False, k + 1, {"dim": dim, "base_size": base,
                                            "assignment": {v: [list(c) for c in sp.members(x)]
                                                           for v, x in env.items()}})
    return Audit(True, trials)


def audit_soundness(t: Theorem, trials: int = 25, seed: int = 0) -> Audit:
    if t.max_index_used < max(indices(t.equation), default=-1):
        raise AssertionError("max_index_used below the indices of the equation")
    return audit_equation(t.equation, t.max_index_used, trials, seed, label=t.text)
