"""Command line interface.

Exit codes: 0 all checks pass, 1 a mathematical check failed, 2 usage or
configuration error, 3 a budget truncation prevented a verdict.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
import time
from itertools import permutations
from pathlib import Path

from . import families
from .algebra import SetAlgebra, closed_atoms, equation_holds_at, eval_term, generate
from .constructions.partition import build_partition_witness, verify_partition
from .constructions.rational import (check_pl, cut_witnesses, pl_automorphism, random_increasing,
                                     random_point)
from .constructions.split import build_split, verify_split
from .constructions.symmetric import build_symmetrized
from .oracle import equiv_oracle, express_oracle
from .parser import ParseError, format_equation, format_term, parse, parse_equation, parse_equations
from .proof import Bounds, Enumerator, audit_soundness, derivation_json
from .report import (EXIT_FAIL, EXIT_PASS, EXIT_TRUNCATED, EXIT_USAGE, dumps, make_report)
from .space import BudgetError, CylSpace, PointSet
from .terms import IndexError_, rename


class UsageError(Exception):
    pass


# generator specs ----------------------------------------------------------------

def element_from_spec(space: CylSpace, spec) -> int:
    """A subset of the space from a descriptor.

    Lists are cell lists.  Strings: empty, full, diag:I,J, random:SEED,
    equiv:N (pairs (s0,s1) in the same block of size N), box:S0,S1,...
    (product of consecutive blocks of those sizes), chain (s0 < s1 < s2).
    """
    if isinstance(spec, list):
        return space.from_cells(tuple(c) for c in spec)
    if not isinstance(spec, str):
        raise UsageError(f"bad generator {spec!r}")
    name, _, arg = spec.partition(":")
    try:
        if name == "empty":
            return 0
        if name == "full":
            return space.full
        if name == "diag":
            i, j = (int(v) for v in arg.split(","))
            return space.diag(i, j)
        if name == "random":
            return space.random_element(random.Random(int(arg)))
        if name == "equiv":
            n = int(arg)
            return space.from_predicate(lambda c: c[0] // n == c[1] // n)
        if name == "box":
            sizes = [int(v) for v in arg.split(",")]
            if len(sizes) != space.dim:
                raise UsageError("box needs one size per coordinate")
            starts = [sum(sizes[:k]) for k in range(len(sizes))]
            return space.from_predicate(
                lambda c: all(starts[k] <= c[k] < starts[k] + sizes[k] for k in range(space.dim)))
        if name == "chain":
            return space.from_predicate(lambda c: c[0] < c[1] < c[2])
        if name == "cells":
            return space.from_cells(tuple(c) for c in json.loads(arg))
    except (ValueError, IndexError) as exc:
        raise UsageError(f"bad generator {spec!r}: {exc}") from None
    raise UsageError(f"unknown generator {spec!r}")


def parse_gens(text) -> list:
    if text is None or text == "diagonals" or text == []:
        return []
    if isinstance(text, list):
        return text
    return [g for g in text.split(";") if g]


def space_from(args) -> tuple[CylSpace, list]:
    if getattr(args, "space", None):
        desc = json.loads(Path(args.space).read_text())
        try:
            dim, base = int(desc["dim"]), int(desc["base_size"])
        except (KeyError, TypeError, ValueError):
            raise UsageError("space descriptor needs dim and base_size") from None
        gens = desc.get("generators", [])
    else:
        if args.dim is None or args.base is None:
            raise UsageError("give --dim and --base, or --space")
        dim, base, gens = args.dim, args.base, parse_gens(getattr(args, "gens", None))
    try:
        space = CylSpace(dim, base, budget=getattr(args, "cell_budget", None))
    except BudgetError as exc:
        raise UsageError(str(exc)) from None
    return space, [element_from_spec(space, g) for g in gens]


def need_seed(args):
    if args.seed is None:
        raise UsageError("a --seed is required for sampled modes")
    return args.seed


# commands -------------------------------------------------------------------------------

def cmd_parse(args):
    texts = []
    if args.file:
        eqs = parse_equations(Path(args.file).read_text(), args.dim)
        texts = [format_equation(e) for e in eqs]
    elif args.text is not None:
        out = parse(args.text, args.dim)
        texts = [str(out)]
    else:
        raise UsageError("give a term or --file")
    return EXIT_PASS, {"canonical": texts}, "\n".join(texts)


def cmd_eval(args):
    space, _ = space_from(args)
    t = parse(args.term, space.dim)
    if not hasattr(t, "children"):
        raise UsageError("eval takes a term, not an equation")
    assign = {}
    for a in args.assign or []:
        name, _, spec = a.partition("=")
        value = json.loads(spec) if spec.startswith("[") else spec
        assign[name] = PointSet(space, element_from_spec(space, value))
    value = eval_term(space, t, assign)
    return EXIT_PASS, {"term": format_term(t), "value": value, "size": len(value)}, None


def _algebra(args):
    space, gens = space_from(args)
    alg = generate(space, gens, cap=args.carrier_cap) if not args.full else SetAlgebra.full(space)
    return space, alg


def cmd_check(args):
    space, alg = _algebra(args)
    e = parse_equation(args.eq, space.dim)
    kw = {}
    if args.mode == "sampled":
        kw = {"samples": args.samples, "seed": need_seed(args)}
    t0 = time.perf_counter()
    v = alg.holds(e, args.mode, **kw)
    elapsed = int((time.perf_counter() - t0) * 1000) if args.timings else None
    result = {"equation": format_equation(e), "mode": args.mode, "verdict": v.status,
              "elapsed_ms": elapsed, "carrier_size": alg.carrier_size(),
              "truncated": v.truncated, "checked": v.checked}
    if v.witness is not None:
        result["witness"] = v.witness
    code = {"valid": EXIT_PASS, "fails": EXIT_FAIL, "unknown": EXIT_TRUNCATED}[v.status]
    return code, result, f"{result['equation']}: {v.status.upper()}"


def cmd_closure(args):
    space, alg = _algebra(args)
    result = {"atoms": len(alg.atoms), "carrier_size": alg.carrier_size(),
              "enumerated": len(alg.carrier), "truncated": alg.truncated}
    return (EXIT_TRUNCATED if alg.truncated and args.strict else EXIT_PASS), result, None


def cmd_split(args):
    sizes = [int(v) for v in args.sizes.split(",")] if isinstance(args.sizes, str) else list(args.sizes)
    try:
        build = build_split(args.dim, sizes)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rep = verify_split(build, samples=args.samples, seed=args.seed or 0)
    e01 = rep["e01_at_g"]
    expected = (rep["axioms_ok"] and rep["g_is_atom"] and not e01["holds"] and e01["lhs_is_c1g"]
                and e01["rhs_matches"] and not e01["lhs_below_rhs"]
                and all(rep["henkin"][f"e_{i}1"] == "valid" for i in range(2, args.dim)))
    lines = [f"e_01 at (g, g'): {'HOLDS' if e01['holds'] else 'FAIL'}"]
    lines += [f"{k}: {'PASS' if v == 'valid' else 'FAIL'}" for k, v in rep["henkin"].items()]
    rep["axiom_failures"] = [list(f[:2]) for f in rep["axiom_failures"]]
    return (EXIT_PASS if expected else EXIT_FAIL), rep, "\n".join(lines)


def cmd_partition(args):
    try:
        w = build_partition_witness(args.dim, args.n, args.blocks)
    except (ValueError, BudgetError) as exc:
        raise UsageError(str(exc)) from None
    ks = [int(k) for k in args.ks.split(",")] if isinstance(args.ks, str) else list(args.ks)
    rep = verify_partition(w, ks, samples=args.samples, seed=args.seed or 0)
    ok = (not rep["e_n_at_g_term"] and not rep["e_n_at_g_oracle"] and rep["delta_g"] == [0, 1]
          and rep["g_regular"] and rep["regularity"]["irregular"] == 0
          and all(m["disagreements"] == 0 for m in rep["matrix"].values()))
    rep["matrix"] = {str(k): {a: b for a, b in m.items() if a != "witness"} for k, m in rep["matrix"].items()}
    lines = [f"e_{args.n} at g: term {'HOLDS' if rep['e_n_at_g_term'] else 'FAIL'}, "
             f"oracle {'HOLDS' if rep['e_n_at_g_oracle'] else 'FAIL'}"]
    lines += [f"e_{k}: {m['status']}" for k, m in rep["matrix"].items()]
    truncated = any(m["truncated"] for m in rep["matrix"].values())
    code = EXIT_FAIL if not ok else (EXIT_TRUNCATED if truncated else EXIT_PASS)
    return code, rep, "\n".join(lines)


def cmd_oracle_compare(args):
    seed = need_seed(args)
    space = CylSpace(args.dim, args.base)
    rng = random.Random(seed)
    if args.kind == "express":
        e = families.master_equation()
        elems = [space.random_element(rng) for _ in range(args.samples)]
        oracle = lambda x: express_oracle(space, PointSet(space, x))
    else:
        e = families.partition_equation(args.n, space.dim)
        atoms = closed_atoms(space, [1 << k for k in range(space.ncells)], range(2, args.n + 1))
        elems = []
        for _ in range(args.samples):
            x = 0
            for a in atoms:
                if rng.getrandbits(1):
                    x |= a
            elems.append(x)
        oracle = lambda x: equiv_oracle(space, PointSet(space, x), args.n)
    disagree = []
    for x in elems:
        t = equation_holds_at(space, e, {"x": x})
        if t != oracle(x):
            disagree.append(PointSet(space, x))
    result = {"kind": args.kind, "compared": len(elems), "disagreements": len(disagree),
              "first_disagreement": disagree[0] if disagree else None}
    return (EXIT_FAIL if disagree else EXIT_PASS), result, None


def cmd_rational(args):
    seed = need_seed(args)
    rng = random.Random(seed)
    failures = []
    for _ in range(args.points):
        s = random_point(rng, args.trunc_dim)
        for i in range(args.trunc_dim):
            try:
                cut_witnesses(s, i)
            except AssertionError:
                failures.append({"point": str(s), "i": i})
    pl_bad = 0
    for _ in range(args.pl):
        n = rng.randint(1, 5)
        a, b = random_increasing(rng, n), random_increasing(rng, n)
        if not check_pl(pl_automorphism(a, b), a, b, args.pairs, rng):
            pl_bad += 1
    result = {"points": args.points, "trunc_dim": args.trunc_dim, "cut_failures": failures,
              "pl_maps": args.pl, "pl_failures": pl_bad}
    return (EXIT_FAIL if failures or pl_bad else EXIT_PASS), result, None


def cmd_symmetrize(args):
    space, alg = _algebra(args)
    if args.equations:
        eqs = parse_equations(Path(args.equations).read_text(), space.dim)
    elif args.eq:
        eqs = [parse_equation(q, space.dim) for q in args.eq]
    else:
        raise UsageError("give --eq or --equations")
    try:
        sym = build_symmetrized(alg)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rows, asym, unknown = [], 0, 0
    for e in eqs:
        base = sym.holds(e, "exhaustive").status
        for rho in permutations(range(space.dim)):
            other = sym.holds(rename(e, dict(enumerate(rho))), "exhaustive").status
            if "unknown" in (base, other):
                unknown += 1
            elif other != base:
                asym += 1
        rows.append({"equation": format_equation(e), "verdict": base})
    result = {"factors": len(sym.factors), "atoms": sym.natoms, "equations": rows,
              "asymmetries": asym, "unknown": unknown}
    code = EXIT_FAIL if asym else (EXIT_TRUNCATED if unknown else EXIT_PASS)
    return code, result, None


def cmd_enumerate(args):
    b = Bounds(index_bound=args.index_bound, term_depth=args.depth, variable_count=args.vars,
               step_budget=args.budget, max_size=args.max_size, inductive=not args.no_inductive)
    en = Enumerator(b)
    lines, failures = [], []
    for t in en.run():
        lines.append(t.text)
        if args.audit:
            a = audit_soundness(t, args.audit, args.seed or 0)
            if not a.ok:
                failures.append({"theorem": t.text, "failure": a.failure})
    run = en.out
    if run.truncated:
        lines.append("# truncated: step budget exhausted")
    result = {"theorems": len(run.theorems), "truncated": run.truncated, "by_rule": run.by_rule(),
              "inductive_applications": len(run.inductive_log),
              "inductive_novel": sum(1 for x in run.inductive_log if x[4]),
              "audit_failures": failures}
    if args.dag:
        result["derivations"] = [derivation_json(t) for t in run.theorems]
    return (EXIT_FAIL if failures else EXIT_PASS), result, "\n".join(lines)


# argument parsing -------------------------------------------------------------------------

def _space_args(p, gens=True):
    p.add_argument("--dim", type=int)
    p.add_argument("--base", type=int)
    p.add_argument("--space", help="JSON space descriptor {dim, base_size, generators}")
    if gens:
        p.add_argument("--gens", default="diagonals",
                       help="';'-separated generators, or 'diagonals' for none")
        p.add_argument("--full", action="store_true", help="use the full set algebra")
        p.add_argument("--carrier-cap", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--output", default=None, help="write the JSON report here")
    common.add_argument("--format", choices=("text", "json"), default=None,
                        help="default json; text for enumerate")
    common.add_argument("--config", default=None, help="JSON file with flag values")
    common.add_argument("--timings", action="store_true", help="include elapsed times")
    common.add_argument("--cell-budget", type=int, default=None)

    ap = argparse.ArgumentParser(prog="cylalg", description="Finite cylindric algebra workbench")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", parents=[common], help="echo canonical form")
    p.add_argument("text", nargs="?")
    p.add_argument("--file")
    p.add_argument("--dim", type=int)
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("eval", parents=[common], help="evaluate a term in a full set algebra")
    p.add_argument("--term", required=True)
    p.add_argument("--assign", action="append", help="name=generator-spec or name=[[cell],...]")
    _space_args(p, gens=False)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("check", parents=[common], help="validity of an equation")
    p.add_argument("--eq", required=True)
    p.add_argument("--mode", choices=("exhaustive", "sampled"), default="exhaustive")
    p.add_argument("--samples", type=int, default=200)
    _space_args(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("closure", parents=[common], help="generated subalgebra size")
    p.add_argument("--strict", action="store_true", help="exit 3 when the carrier is truncated")
    _space_args(p)
    p.set_defaults(func=cmd_closure)

    p = sub.add_parser("split-demo", parents=[common], help="split-atom algebra and Henkin's equation")
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--sizes", default="1,2,2")
    p.add_argument("--samples", type=int, default=0, help="extra sampled axiom check")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("partition-demo", parents=[common], help="partition witness and e_k matrix")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--blocks", type=int, default=2)
    p.add_argument("--dim", type=int, default=4)
    p.add_argument("--ks", default="2,3,4")
    p.add_argument("--samples", type=int, default=200)
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("oracle-compare", parents=[common], help="oracle against term evaluation")
    p.add_argument("--kind", choices=("express", "equiv"), default="express")
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--base", type=int, default=2)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--samples", type=int, default=200)
    p.set_defaults(func=cmd_oracle_compare)

    p = sub.add_parser("rational-demo", parents=[common], help="cut witnesses and PL automorphisms")
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--trunc-dim", type=int, default=8)
    p.add_argument("--pl", type=int, default=100)
    p.add_argument("--pairs", type=int, default=1000)
    p.set_defaults(func=cmd_rational)

    p = sub.add_parser("symmetrize", parents=[common], help="symmetrized product")
    p.add_argument("--eq", action="append")
    p.add_argument("--equations", help="file with one equation per line")
    _space_args(p)
    p.set_defaults(func=cmd_symmetrize)

    p = sub.add_parser("enumerate", parents=[common], help="theorem stream")
    p.add_argument("--index-bound", type=int, default=3)
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--vars", type=int, default=2)
    p.add_argument("--budget", type=int, default=1000)
    p.add_argument("--max-size", type=int, default=None)
    p.add_argument("--no-inductive", action="store_true")
    p.add_argument("--audit", type=int, default=0, help="audit each theorem over this many algebras")
    p.add_argument("--dag", action="store_true", help="include derivations in the JSON report")
    p.set_defaults(func=cmd_enumerate)
    return ap


def _apply_config(ap, argv):
    """Config keys become defaults of the chosen subcommand; flags override."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    subs = ap._subparsers._group_actions[0].choices
    command = next((a for a in argv if a in subs), None)
    if known.config and command:
        try:
            cfg = json.loads(Path(known.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        if not isinstance(cfg, dict):
            raise UsageError("config must be a JSON object")
        cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
        sub = subs[command]
        dests = {a.dest: a for a in sub._actions}
        unknown = sorted(set(cfg) - set(dests) - {"command"})
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
        cfg.pop("command", None)
        for k in cfg:
            dests[k].required = False
        sub.set_defaults(**cfg)
    return ap.parse_args(argv)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    ap = build_parser()
    try:
        args = _apply_config(ap, argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    t0 = time.perf_counter()
    try:
        code, result, text = args.func(args)
    except (UsageError, ParseError, IndexError_, BudgetError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    config = {k: v for k, v in sorted(vars(args).items())
              if k not in ("func", "output", "format", "config", "timings")}
    elapsed = int((time.perf_counter() - t0) * 1000) if args.timings else None
    report = make_report(args.command, config, result, code, elapsed)
    body = dumps(report)
    if args.output:
        Path(args.output).write_text(body)
    fmt = args.format or ("text" if args.command == "enumerate" else "json")
    if fmt == "json":
        sys.stdout.write(body)
    else:
        if text:
            print(text)
        print(f"status: {report['status']}")
    return code


if __name__ == "__main__":
    sys.exit(main())
