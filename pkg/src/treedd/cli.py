"""Command-line interface: ``treedd <verb> ...``."""

from __future__ import annotations

import argparse
import logging
import os
import sys

from . import bench
from .compile import compile_circuit_trace, compile_cnf_trace
from .convert import load_obdd, obdd_to_tdd, tdd_to_obdd
from .decomp import (
    load_pace_td,
    min_fill_td,
    vtree_from_circuit_td,
    vtree_from_incidence_td,
    vtree_from_primal_td,
)
from .formula import circuit_graph, incidence_graph, load_circuit, load_dimacs, primal_graph
from .learn import learn, tdd_teacher, truth_table_teacher
from .minimize import canonize, equivalent
from .oracle import load_table
from .tdd import (
    DeterminismViolation,
    Tdd,
    enumerate_models,
    load_tdd,
    model_count,
    to_ddnnf,
    validate_deterministic,
    write_tdd,
)
from .transform import apply, condition, determinize, forget, negate, OPS
from .vtree import balanced_vtree, linear_vtree, load_vtree, parse_var


class CliError(Exception):
    pass


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _order(arg: str | None, default):
    if arg is None:
        return list(default)
    if os.path.exists(arg):
        with open(arg) as fh:
            toks = fh.read().split()
    else:
        toks = arg.replace(",", " ").split()
    return [parse_var(t) for t in toks]


def _deterministic(path: str) -> Tdd:
    C = load_tdd(path)
    res = validate_deterministic(C)
    if isinstance(res, DeterminismViolation):
        raise CliError(f"{path}: not deterministic ({res})")
    return res


def _cnf_vtree(args, F):
    kind = args.vtree
    if kind in ("balanced", "linear"):
        order = _order(args.order, F.variables)
        return (balanced_vtree if kind == "balanced" else linear_vtree)(order)
    if kind in ("primal-td", "incidence-td"):
        graph = primal_graph(F) if kind == "primal-td" else incidence_graph(F)
        td = load_pace_td(args.td) if args.td else min_fill_td(graph)
        build = vtree_from_primal_td if kind == "primal-td" else vtree_from_incidence_td
        return build(td, F)
    return load_vtree(kind)


def cmd_compile(args) -> int:
    F = load_dimacs(args.cnf)
    T = _cnf_vtree(args, F)
    C, widths = compile_cnf_trace(F, T)
    if args.log_widths:
        for k, w in enumerate(widths, 1):
            print(f"clause {k}: width {w}", file=sys.stderr)
    _emit(write_tdd(C), args.output)
    return 0


def cmd_compile_circuit(args) -> int:
    circ = load_circuit(args.circuit)
    kind = args.vtree
    if kind in ("balanced", "linear"):
        order = _order(args.order, circ.variables)
        T = (balanced_vtree if kind == "balanced" else linear_vtree)(order)
    elif kind in ("primal-td", "circuit-td"):
        td = load_pace_td(args.td) if args.td else min_fill_td(circuit_graph(circ))
        T = vtree_from_circuit_td(td, circ)
    else:
        T = load_vtree(kind)
    C, widths = compile_circuit_trace(circ, T)
    if args.log_widths:
        for k, w in enumerate(widths, 1):
            print(f"step {k}: width {w}", file=sys.stderr)
    _emit(write_tdd(C), args.output)
    return 0


def cmd_count(args) -> int:
    print(model_count(_deterministic(args.tdd)))
    return 0


def cmd_enumerate(args) -> int:
    C = _deterministic(args.tdd)
    vs = C.variables
    for m in enumerate_models(C, args.limit):
        print(" ".join(str(v) if m[v] else f"-{v}" for v in vs))
    return 0


def cmd_canonize(args) -> int:
    _emit(write_tdd(canonize(_deterministic(args.tdd))), args.output)
    return 0


def cmd_negate(args) -> int:
    _emit(write_tdd(negate(_deterministic(args.tdd))), args.output)
    return 0


def cmd_condition(args) -> int:
    C = _deterministic(args.tdd)
    _emit(write_tdd(condition(C, parse_var(args.var), args.value)), args.output)
    return 0


def cmd_apply(args) -> int:
    C1, C2 = _deterministic(args.a), _deterministic(args.b)
    _emit(write_tdd(canonize(apply(args.op, C1, C2))), args.output)
    return 0


def cmd_forget(args) -> int:
    C = load_tdd(args.tdd)
    Y = [parse_var(v) for v in args.vars.replace(",", " ").split()]
    _emit(write_tdd(forget(C, Y)), args.output)
    return 0


def cmd_determinize(args) -> int:
    _emit(write_tdd(determinize(load_tdd(args.tdd))), args.output)
    return 0


def cmd_equiv(args) -> int:
    same = equivalent(_deterministic(args.a), _deterministic(args.b))
    print("equivalent" if same else "not equivalent")
    return 0 if same else 1


def cmd_convert(args) -> int:
    if args.source == "obdd":
        _emit(write_tdd(obdd_to_tdd(load_obdd(args.input))), args.output)
    else:
        _emit(tdd_to_obdd(_deterministic(args.input)).dumps(), args.output)
    return 0


def cmd_learn(args) -> int:
    if args.cnf:
        F = load_dimacs(args.cnf)
        T = _cnf_vtree(args, F)
        res = learn(T, truth_table_teacher(F.table()))
    elif args.table:
        f = load_table(args.table)
        kind = args.vtree if args.vtree not in ("primal-td", "incidence-td") else "balanced"
        if kind in ("balanced", "linear"):
            order = _order(args.order, f.variables)
            T = (balanced_vtree if kind == "balanced" else linear_vtree)(order)
        else:
            T = load_vtree(kind)
        res = learn(T, truth_table_teacher(f))
    else:
        C = _deterministic(args.tdd)
        res = learn(C.vtree, tdd_teacher(C))
    print(
        f"membership queries {res.membership_queries}, equivalence queries {res.equivalence_queries}",
        file=sys.stderr,
    )
    _emit(write_tdd(res.tdd), args.output)
    return 0


def cmd_bench(args) -> int:
    if args.function == "mux":
        f = bench.mux(args.n)
        order = bench.mux_order(args.n)
    else:
        f = bench.hwb(args.n) if args.function == "hwb" else bench.parity(args.n)
        order = list(f.variables)
    kinds = list(bench.VTREE_KINDS) if args.vtree == "all" else [args.vtree]
    vtrees = {k: bench.VTREE_KINDS[k](order) for k in kinds}
    _emit(bench.rows_to_csv(bench.fw_report(f, f"{args.function}{args.n}", vtrees)), args.output)
    return 0


def cmd_to_nnf(args) -> int:
    _emit(to_ddnnf(load_tdd(args.tdd)), args.output)
    return 0


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="treedd", description="Tree decision diagrams.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="verb", required=True)

    def out(sp):
        sp.add_argument("-o", "--output")

    def vtree_opts(sp, default="primal-td"):
        sp.add_argument("--vtree", default=default, help="balanced, linear, primal-td, incidence-td, or a vtree file")
        sp.add_argument("--td", help="PACE .td file for the td-based vtrees (rooted at bag 1)")
        sp.add_argument("--order", help="variable order for balanced/linear (list or file)")

    sp = sub.add_parser("compile", help="compile a DIMACS CNF")
    sp.add_argument("cnf")
    vtree_opts(sp)
    sp.add_argument("--log-widths", action="store_true")
    out(sp)
    sp.set_defaults(fn=cmd_compile)

    sp = sub.add_parser("compile-circuit", help="compile a Boolean circuit")
    sp.add_argument("circuit")
    vtree_opts(sp, default="circuit-td")
    sp.add_argument("--log-widths", action="store_true")
    out(sp)
    sp.set_defaults(fn=cmd_compile_circuit)

    for verb, fn, hlp in (
        ("count", cmd_count, "exact model count"),
        ("canonize", cmd_canonize, "canonical form"),
        ("negate", cmd_negate, "complement"),
        ("determinize", cmd_determinize, "make a circuit deterministic"),
        ("to-nnf", cmd_to_nnf, "export as d-DNNF"),
    ):
        sp = sub.add_parser(verb, help=hlp)
        sp.add_argument("tdd")
        out(sp)
        sp.set_defaults(fn=fn)

    sp = sub.add_parser("enumerate", help="list models")
    sp.add_argument("tdd")
    sp.add_argument("--limit", type=int, default=10**6)
    sp.set_defaults(fn=cmd_enumerate)

    sp = sub.add_parser("condition", help="fix one variable")
    sp.add_argument("tdd")
    sp.add_argument("-x", "--var", required=True)
    sp.add_argument("-b", "--value", type=int, choices=(0, 1), required=True)
    out(sp)
    sp.set_defaults(fn=cmd_condition)

    sp = sub.add_parser("apply", help="binary operation on two circuits")
    sp.add_argument("--op", required=True, choices=sorted(OPS))
    sp.add_argument("a")
    sp.add_argument("b")
    out(sp)
    sp.set_defaults(fn=cmd_apply)

    sp = sub.add_parser("forget", help="existentially quantify variables")
    sp.add_argument("tdd")
    sp.add_argument("--vars", required=True)
    out(sp)
    sp.set_defaults(fn=cmd_forget)

    sp = sub.add_parser("equiv", help="decide equivalence (exit 0 if equivalent, 1 if not)")
    sp.add_argument("a")
    sp.add_argument("b")
    sp.set_defaults(fn=cmd_equiv)

    sp = sub.add_parser("convert", help="OBDD <-> circuit on a linear vtree")
    sp.add_argument("--from", dest="source", required=True, choices=("obdd", "tdd"))
    sp.add_argument("input")
    out(sp)
    sp.set_defaults(fn=cmd_convert)

    sp = sub.add_parser("learn", help="learn a circuit from queries")
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--tdd", help="target circuit (teacher answers from it)")
    src.add_argument("--cnf", help="target CNF (teacher answers from its truth table)")
    src.add_argument("--table", help="target truth table file ('vars ...' and 'bits ...' lines)")
    vtree_opts(sp)
    out(sp)
    sp.set_defaults(fn=cmd_learn)

    sp = sub.add_parser("bench", help="factor-width report as CSV")
    sp.add_argument("function", choices=("hwb", "mux", "parity"))
    sp.add_argument("-n", type=int, required=True, help="n for hwb/parity, k for mux")
    sp.add_argument("--vtree", default="all", choices=["all"] + list(bench.VTREE_KINDS))
    out(sp)
    sp.set_defaults(fn=cmd_bench)
    return p


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.fn(args)
    except (CliError, ValueError, OSError, RuntimeError) as e:
        print(f"treedd: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
