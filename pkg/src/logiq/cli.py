"""Command-line entry point: ``logiq solve|compile|check|oracle ...``.

Results go to stdout as JSON with sorted keys; diagnostics go to stderr,
controlled by ``LOGIQ_LOG=debug|info``.  Exit codes: 0 success,
2 infeasible, 64 usage error, 65 data or format error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path

from . import bruteforce
from .augment import fraternal_augment
from .compiler import compile_predicate, list_predicates, parse_predicate, predicate_text
from .dnnf import dump_circuit, width
from .errors import CapExceededError, FormatError, InfeasibleError, LogiqError, ValidationError
from .graph import load_graph
from .logic import (
    dump_gaifman, dump_ks, load_gaifman, load_ks, parse_formula, to_text, validate_gaifman, validate_ks,
)
from .report import SolveReport, content_hash
from .solvers.bddexp import suspect_recurse_bddexp
from .solvers.lowdeg import solve_linear_exact, suspect_recurse_lowdeg
from .solvers.mso import recursive_greedy
from .submodular import ModularFunction, load_function, verify_properties
from .treedecomp import load_decomposition, make_nice, validate

log = logging.getLogger("logiq")

EXIT_OK = 0
EXIT_INFEASIBLE = 2
EXIT_USAGE = 64
EXIT_DATA = 65


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def _read(path):
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from None


def _emit(doc, compact):
    if isinstance(doc, SolveReport):
        text = doc.dumps(compact)
    elif compact:
        text = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    else:
        text = json.dumps(doc, sort_keys=True, indent=2)
    sys.stdout.write(text + "\n")


def _load_common(args):
    gtext = _read(args.graph)
    g = load_graph(gtext)
    ftext = _read(args.function)
    f = load_function(ftext, n=g.n)
    return g, f, {"graph": content_hash(gtext), "function": content_hash(ftext)}


def _ntd(args, g):
    if not getattr(args, "decomposition", None):
        return None
    td = load_decomposition(_read(args.decomposition))
    return make_nice(td, g)


# --- subcommands ---------------------------------------------------------------


def cmd_solve_mso(args):
    g, f, hashes = _load_common(args)
    expr = parse_predicate(args.predicate)
    hashes["constraint"] = content_hash(predicate_text(expr))
    start = time.perf_counter()
    comp = compile_predicate(g, expr, _ntd(args, g))
    if args.dump:
        Path(args.dump).write_text(dump_circuit(comp.circuit), encoding="utf-8")
    sol = recursive_greedy(comp.circuit, f, base_size=args.base_size)
    rep = SolveReport(
        kind="mso",
        solution=sorted(u + 1 for u in sol.U),
        value=sol.value,
        certificate=sol.B,
        oracle_calls=sol.calls,
        elapsed_ms=round((time.perf_counter() - start) * 1000.0, 3),
        hashes=hashes,
        details={
            "circuit_width": width(comp.circuit),
            "decomposition_width": comp.decomposition_width,
            "depth": sol.depth,
            "recursive_calls": sol.nodes,
        },
    )
    if args.verify:
        opt = bruteforce.brute_force_predicate(g, expr, f, cap=args.cap or bruteforce.MSO_CAP)
        rep.attach_opt(opt.value, sorted(u + 1 for u in opt.solution))
    return rep


def _fo_report(kind, sol, hashes, start):
    return SolveReport(
        kind=kind,
        solution=[u + 1 for u in sol.tuple],
        value=sol.value,
        certificate=sol.B,
        oracle_calls=sol.calls,
        elapsed_ms=round((time.perf_counter() - start) * 1000.0, 3),
        hashes=hashes,
        details={"depth": sol.depth, "recursive_calls": sol.nodes, "disjunct": sol.disjunct + 1},
    )


def cmd_solve_lowdeg(args):
    g, f, hashes = _load_common(args)
    if not args.gaifman:
        raise _UsageError("solve fo-lowdeg needs --gaifman FILE")
    text = _read(args.gaifman)
    gf = load_gaifman(text)
    problems = validate_gaifman(gf)
    if problems:
        raise ValidationError("invalid Gaifman form", problems)
    hashes["constraint"] = content_hash(text)
    start = time.perf_counter()
    if args.linear_exact:
        if not isinstance(f, ModularFunction):
            raise _UsageError("--linear-exact needs a modular function")
        sol = solve_linear_exact(g, gf, f)
    else:
        sol = suspect_recurse_lowdeg(g, gf, f)
    rep = _fo_report("fo-lowdeg", sol, hashes, start)
    rep.details["exact"] = bool(args.linear_exact)
    if args.verify:
        opt = bruteforce.brute_force_fo(g, gf, f, cap=args.cap or bruteforce.TUPLE_CAP)
        rep.attach_opt(opt.value, [u + 1 for u in opt.solution])
    return rep


def cmd_solve_bddexp(args):
    g, f, hashes = _load_common(args)
    if not args.ks:
        raise _UsageError("solve fo-bddexp needs --ks FILE")
    text = _read(args.ks)
    ks = load_ks(text)
    validate_ks(ks)
    hashes["constraint"] = content_hash(text)
    start = time.perf_counter()
    aug = fraternal_augment(g, args.aug_steps)
    if args.dump:
        Path(args.dump).write_text(aug.dump(), encoding="utf-8")
    sol = suspect_recurse_bddexp(aug, ks, f)
    rep = _fo_report("fo-bddexp", sol, hashes, start)
    rep.details["gamma"] = aug.gamma
    rep.details["aug_steps"] = args.aug_steps
    if args.verify:
        opt = bruteforce.brute_force_fo(g, ks, f, aug=aug, cap=args.cap or bruteforce.TUPLE_CAP)
        rep.attach_opt(opt.value, [u + 1 for u in opt.solution])
    return rep


def cmd_compile(args):
    g = load_graph(_read(args.graph))
    comp = compile_predicate(g, args.predicate, _ntd(args, g))
    text = dump_circuit(comp.circuit)
    if args.dump:
        Path(args.dump).write_text(text, encoding="utf-8")
    return {
        "predicate": predicate_text(parse_predicate(args.predicate)),
        "gates": len(comp.circuit.gates),
        "width": width(comp.circuit),
        "max_states": comp.max_states,
        "decomposition_width": comp.decomposition_width,
        "dump": args.dump,
    }


def cmd_check(args):
    what = args.what
    if what == "function":
        f = load_function(_read(args.file), n=args.n)
        rep = verify_properties(f, n=args.n)
        return rep.to_json(), (EXIT_OK if rep.ok else EXIT_DATA)
    if what == "decomposition":
        if not args.graph:
            raise _UsageError("check decomposition needs --graph FILE")
        g = load_graph(_read(args.graph))
        td = load_decomposition(_read(args.file))
        bad = validate(g, td)
        doc = {
            "valid": not bad,
            "width": td.width,
            "violations": [{"kind": v.kind, "message": v.message} for v in bad],
        }
        return doc, (EXIT_OK if not bad else EXIT_DATA)
    if what == "predicates":
        return {"predicates": list_predicates()}, EXIT_OK
    # formula-like inputs
    text = _read(args.file)
    if args.kind == "gaifman":
        gf = load_gaifman(text)
        problems = validate_gaifman(gf)
        return {"valid": not problems, "violations": problems, "canonical": json.loads(dump_gaifman(gf))}, (
            EXIT_OK if not problems else EXIT_DATA
        )
    if args.kind == "ks":
        ks = load_ks(text)
        forests = validate_ks(ks)
        trees = [[[v + 1 for v in t.vars] for t in fo.trees] for fo in forests]
        return {"valid": True, "forests": trees, "canonical": json.loads(dump_ks(ks))}, EXIT_OK
    phi = parse_formula(text)
    return {"canonical": to_text(phi), "free": list(phi.free), "set_var": phi.set_var, "k": phi.k}, EXIT_OK


def cmd_oracle(args):
    g, f, hashes = _load_common(args)
    start = time.perf_counter()
    if args.problem == "mso":
        if args.predicate:
            expr = parse_predicate(args.predicate)
            res = bruteforce.brute_force_predicate(g, expr, f, cap=args.cap or bruteforce.MSO_CAP)
        elif args.formula:
            phi = parse_formula(_read(args.formula))
            res = bruteforce.brute_force_mso(g, phi, f, cap=args.cap or bruteforce.MSO_CAP)
        else:
            raise _UsageError("oracle mso needs --predicate or --formula")
        sol = sorted(u + 1 for u in res.solution)
    else:
        cap = args.cap or bruteforce.TUPLE_CAP
        if args.formula:
            res = bruteforce.brute_force_fo(g, parse_formula(_read(args.formula)), f, cap=cap)
        elif args.gaifman:
            res = bruteforce.brute_force_fo(g, load_gaifman(_read(args.gaifman)), f, cap=cap)
        elif args.ks:
            aug = fraternal_augment(g, args.aug_steps)
            res = bruteforce.brute_force_fo(g, load_ks(_read(args.ks)), f, aug=aug, cap=cap)
        else:
            raise _UsageError("oracle fo needs --formula, --gaifman or --ks")
        sol = [u + 1 for u in res.solution]
    return {
        "kind": f"oracle-{args.problem}",
        "solution": sol,
        "value": res.value,
        "feasible": res.feasible,
        "hashes": hashes,
        "elapsed_ms": round((time.perf_counter() - start) * 1000.0, 3),
    }


# --- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="logiq", description="Submodular maximization under graph-logic constraints.")
    p.add_argument("--json", action="store_true", help="compact single-line JSON output")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp):
        sp.add_argument("--graph", required=True, help="graph file (p/e lines, 1-based)")
        sp.add_argument("--function", required=True, help="objective function JSON")
        sp.add_argument("--cap", type=int, default=None, help="size cap for brute-force checks")
        sp.add_argument("--json", action="store_true", dest="json_late", help=argparse.SUPPRESS)

    solve = sub.add_parser("solve", help="run an approximation algorithm")
    ssub = solve.add_subparsers(dest="problem", parser_class=_Parser)
    s = ssub.add_parser("mso", help="set constraint from the predicate catalog")
    common(s)
    s.add_argument("--predicate", required=True, help='e.g. "domset(X) & connected(X)"')
    s.add_argument("--decomposition", help="tree decomposition file (default: min-fill)")
    s.add_argument("--base-size", type=int, default=1)
    s.add_argument("--dump", help="write the compiled circuit here")
    s.add_argument("--verify", action="store_true", help="embed the brute-force optimum")
    s.set_defaults(run=cmd_solve_mso)
    s = ssub.add_parser("fo-lowdeg", help="tuple constraint in Gaifman form")
    common(s)
    s.add_argument("--gaifman", help="Gaifman form JSON")
    s.add_argument("--linear-exact", action="store_true", help="exact mode for modular objectives")
    s.add_argument("--verify", action="store_true")
    s.set_defaults(run=cmd_solve_lowdeg)
    s = ssub.add_parser("fo-bddexp", help="tuple constraint in KS normal form")
    common(s)
    s.add_argument("--ks", help="KS normal form JSON")
    s.add_argument("--aug-steps", type=int, default=1)
    s.add_argument("--dump", help="write the augmentation dump here")
    s.add_argument("--verify", action="store_true")
    s.set_defaults(run=cmd_solve_bddexp)

    c = sub.add_parser("compile", help="compile a predicate to a structured DNNF")
    c.add_argument("--graph", required=True)
    c.add_argument("--predicate", required=True)
    c.add_argument("--decomposition")
    c.add_argument("--dump", help="circuit output file")
    c.add_argument("--json", action="store_true", dest="json_late", help=argparse.SUPPRESS)
    c.set_defaults(run=cmd_compile)

    k = sub.add_parser("check", help="validate an input file")
    k.add_argument("what", choices=["function", "decomposition", "formula", "predicates"])
    k.add_argument("file", nargs="?")
    k.add_argument("--n", type=int, default=None, help="ground set size for function checks")
    k.add_argument("--graph", help="graph file (decomposition checks)")
    k.add_argument("--kind", choices=["dsl", "gaifman", "ks"], default="dsl", help="formula file kind")
    k.add_argument("--json", action="store_true", dest="json_late", help=argparse.SUPPRESS)
    k.set_defaults(run=cmd_check)

    o = sub.add_parser("oracle", help="exact brute-force optimum")
    osub = o.add_subparsers(dest="problem", parser_class=_Parser)
    for name in ("mso", "fo"):
        s = osub.add_parser(name)
        common(s)
        s.add_argument("--predicate")
        s.add_argument("--formula", help="formula DSL file")
        s.add_argument("--gaifman")
        s.add_argument("--ks")
        s.add_argument("--aug-steps", type=int, default=1)
        s.set_defaults(run=cmd_oracle)
    return p


def _setup_logging():
    level = os.environ.get("LOGIQ_LOG", "").lower()
    lvl = {"debug": logging.DEBUG, "info": logging.INFO}.get(level, logging.WARNING)
    logging.basicConfig(stream=sys.stderr, level=lvl, format="%(levelname)s %(name)s: %(message)s")


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    args = None
    try:
        args = parser.parse_args(argv)
        if not hasattr(args, "run"):
            raise _UsageError("logiq: missing subcommand (try --help)")
        if args.command == "check" and args.what != "predicates" and not args.file:
            raise _UsageError(f"check {args.what} needs a file argument")
        out = args.run(args)
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except InfeasibleError as exc:
        _emit({"status": "infeasible", "message": str(exc)}, _compact(args))
        return EXIT_INFEASIBLE
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        for v in exc.violations:
            print(f"  {v}", file=sys.stderr)
        return EXIT_DATA
    except (FormatError, CapExceededError, LogiqError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    code = EXIT_OK
    if isinstance(out, tuple):
        out, code = out
    _emit(out, _compact(args))
    return code


def _compact(args):
    return bool(getattr(args, "json", False) or getattr(args, "json_late", False))


def run():
    sys.exit(main())
