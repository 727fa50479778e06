"""Shared strategies and corpus generators for the test suite."""

from __future__ import annotations

import random

import numpy as np
from hypothesis import strategies as st

from treedd.formula import CnfFormula
from treedd.oracle import BoolFunTable
from treedd.vtree import Vtree

FIG1_CLAUSES = [(1, 2, 3), (1, 4, 5), (4, 6), (-5, 9), (6, 7, 8), (9, 10, 11)]


def nested_split(vs, rng: random.Random):
    if len(vs) == 1:
        return vs[0]
    k = rng.randint(1, len(vs) - 1)
    return (nested_split(vs[:k], rng), nested_split(vs[k:], rng))


def random_vtree(variables, rng: random.Random) -> Vtree:
    vs = list(variables)
    rng.shuffle(vs)
    return Vtree.from_nested(nested_split(vs, rng))


def random_table(n: int, rng: random.Random, density: float | None = None) -> BoolFunTable:
    if density is None:
        density = rng.choice([0.05, 0.3, 0.5, 0.7, 0.95])
    flat = np.array([rng.random() < density for _ in range(2 ** n)], dtype=bool)
    return BoolFunTable.from_flat(range(1, n + 1), flat)


def random_cnf(rng: random.Random, max_vars: int = 12, max_clauses: int = 20, max_len: int = 3) -> CnfFormula:
    n = rng.randint(1, max_vars)
    clauses = []
    for _ in range(rng.randint(0, max_clauses)):
        k = rng.randint(1, min(max_len, n))
        vs = rng.sample(range(1, n + 1), k)
        clauses.append(tuple(v if rng.random() < 0.5 else -v for v in vs))
    return CnfFormula.of(clauses, n)


def grid_cnf(rows: int, cols: int, rng: random.Random) -> CnfFormula:
    """2-clauses along the edges of a rows x cols grid, numbered column by column."""
    vid = lambda r, c: c * rows + r + 1  # noqa: E731
    clauses = []
    for c in range(cols):
        for r in range(rows):
            if r + 1 < rows:
                clauses.append((vid(r, c), vid(r + 1, c)))
            if c + 1 < cols:
                clauses.append((vid(r, c), vid(r, c + 1)))
    clauses = [tuple(v if rng.random() < 0.5 else -v for v in e) for e in clauses]
    rng.shuffle(clauses)
    return CnfFormula.of(clauses, rows * cols)


# -- hypothesis strategies ------------------------------------------------


@st.composite
def vtrees(draw, min_vars: int = 1, max_vars: int = 6) -> Vtree:
    n = draw(st.integers(min_vars, max_vars))
    seed = draw(st.integers(0, 2 ** 32 - 1))
    return random_vtree(range(1, n + 1), random.Random(seed))


@st.composite
def tables(draw, variables) -> BoolFunTable:
    n = len(variables)
    bits = draw(st.lists(st.booleans(), min_size=2 ** n, max_size=2 ** n))
    return BoolFunTable.from_flat(variables, np.array(bits, dtype=bool))


@st.composite
def vtree_and_table(draw, min_vars: int = 1, max_vars: int = 6):
    T = draw(vtrees(min_vars, max_vars))
    return T, draw(tables(T.variables))


@st.composite
def cnfs(draw, max_vars: int = 7, max_clauses: int = 8) -> CnfFormula:
    n = draw(st.integers(1, max_vars))
    lit = st.integers(1, n).flatmap(lambda v: st.sampled_from([v, -v]))
    clause = st.lists(lit, min_size=1, max_size=3, unique_by=abs).map(tuple)
    return CnfFormula.of(draw(st.lists(clause, max_size=max_clauses)), n)


def random_circuit(rng: random.Random, max_vars: int = 7, max_gates: int = 8):
    from treedd.formula import Circuit, Gate

    n = rng.randint(1, max_vars)
    C = Circuit()
    ids = []
    for v in range(1, n + 1):
        C.add(Gate(str(v), "input", (), v))
        ids.append(str(v))
    for k in range(rng.randint(1, max_gates)):
        kind = rng.choice(["and", "or", "not"])
        gid = f"g{k}"
        if kind == "not":
            C.add(Gate(gid, "not", (rng.choice(ids),)))
        else:
            C.add(Gate(gid, kind, tuple(rng.sample(ids, min(len(ids), rng.randint(1, 3))))))
        ids.append(gid)
    C.output = ids[-1]
    return C


# criterion number -> (passed, detail); filled by test_acceptance, printed by conftest
ACCEPTANCE: dict[int, tuple[bool, str]] = {}
