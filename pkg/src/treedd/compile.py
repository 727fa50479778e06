"""Bottom-up compilation of CNFs and circuits."""

from __future__ import annotations

import logging
from typing import Iterable, Sequence

from .decomp import default_circuit_vtree, default_cnf_vtree
from .formula import Circuit, CnfFormula
from .minimize import canonize
from .tdd import Tdd, TddError, clause_tdd, constant_tdd, literal_tdd
from .transform import apply, conjoin, negate
from .vtree import Vtree

log = logging.getLogger(__name__)


def _check_cover(variables: Iterable, T: Vtree) -> None:
    missing = set(variables) - set(T.variables)
    if missing:
        raise TddError(f"variables {sorted(missing, key=str)} are not leaves of the vtree")


def compile_cnf_trace(
    F: CnfFormula, T: Vtree | None = None, clause_order: Sequence[int] | None = None
) -> tuple[Tdd, list[int]]:
    """Compile ``F`` clause by clause; also return the canonical width after each step.

    Starting from the constant 1, each clause circuit is conjoined in and the
    result canonized, so every intermediate is canonical for the conjunction
    of the clauses seen so far.
    """
    if T is None:
        T = default_cnf_vtree(F)
    _check_cover(F.variables, T)
    order = range(len(F.clauses)) if clause_order is None else clause_order
    if sorted(order) != list(range(len(F.clauses))):
        raise TddError("clause order must be a permutation of the clause indices")
    C = canonize(constant_tdd(True, T))
    widths = []
    for k, j in enumerate(order):
        C = canonize(conjoin(C, clause_tdd(F.clauses[j], T)))
        widths.append(C.width)
        log.debug("clause %d/%d: width %d size %d", k + 1, len(F.clauses), C.width, C.size)
    return C, widths


def compile_cnf(F: CnfFormula, T: Vtree | None = None, clause_order: Sequence[int] | None = None) -> Tdd:
    return compile_cnf_trace(F, T, clause_order)[0]


def compile_circuit_trace(C: Circuit, T: Vtree | None = None) -> tuple[Tdd, list[int]]:
    """Compile gate by gate in topological order, canonizing every intermediate."""
    if T is None:
        T = default_circuit_vtree(C)
    _check_cover(C.variables, T)
    val: dict[str, Tdd] = {}
    widths: list[int] = []
    for gid in C.topological_order():
        g = C.gates[gid]
        if g.kind == "input":
            D = canonize(literal_tdd((g.var, True), T))
        elif g.kind == "not":
            D = canonize(negate(val[g.inputs[0]]))
        else:
            op = "and" if g.kind == "and" else "or"
            if not g.inputs:
                D = canonize(constant_tdd(g.kind == "and", T))
            else:
                D = val[g.inputs[0]]
                for c in g.inputs[1:]:
                    D = canonize(apply(op, D, val[c]))
                    widths.append(D.width)
        val[gid] = D
        widths.append(D.width)
    return val[C._out()], widths


def compile_circuit(C: Circuit, T: Vtree | None = None) -> Tdd:
    return compile_circuit_trace(C, T)[0]
