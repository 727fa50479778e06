import random

import pytest
from hypothesis import given, settings, strategies as st

from helpers import FIG1_CLAUSES, cnfs, random_circuit, random_vtree
from treedd.compile import compile_circuit, compile_circuit_trace, compile_cnf, compile_cnf_trace
from treedd.formula import CnfFormula, parse_circuit
from treedd.oracle import factor_width, fun_from_cnf
from treedd.tdd import TddError, empty_tdd, model_count, to_table
from treedd.vtree import balanced_vtree, linear_vtree

prop = settings(deadline=None, max_examples=80)


def test_fig1_default_vtree():
    F = CnfFormula.of(FIG1_CLAUSES, 11)
    C = compile_cnf(F)
    assert model_count(C) == 763
    assert C.width == factor_width(F.table(), C.vtree) == 3


def test_empty_and_unsat_formulas():
    T = linear_vtree([1, 2])
    assert model_count(compile_cnf(CnfFormula.of([], 2), T)) == 4
    C, widths = compile_cnf_trace(CnfFormula.of([(1,), (-1,)], 2), T)
    assert C == empty_tdd(T)
    assert widths == [1, 1]  # the marker keeps one (empty) output node


def test_clause_order_validation_and_independence():
    F = CnfFormula.of(FIG1_CLAUSES, 11)
    T = balanced_vtree(range(1, 12))
    with pytest.raises(TddError):
        compile_cnf(F, T, clause_order=[0, 0, 1, 2, 3, 4])
    assert compile_cnf(F, T, clause_order=[5, 4, 3, 2, 1, 0]) == compile_cnf(F, T)


def test_vtree_must_cover_variables():
    with pytest.raises(TddError):
        compile_cnf(CnfFormula.of([(1, 3)], 3), linear_vtree([1, 2]))


def test_circuit_example():
    C = parse_circuit("input x\ninput y\nnot nx x\nor o nx y\noutput o\n")
    D = compile_circuit(C, linear_vtree(["x", "y"]))
    assert to_table(D) == C.table()
    D2, widths = compile_circuit_trace(C)
    assert to_table(D2) == C.table() and max(widths) <= 2


@prop
@given(cnfs(), st.integers(0, 2 ** 32 - 1))
def test_compile_matches_oracle(F, seed):
    rng = random.Random(seed)
    T = random_vtree(F.variables, rng)
    C, widths = compile_cnf_trace(F, T)
    f = F.table()
    assert to_table(C) == f
    assert model_count(C) == f.count()
    # every intermediate is canonical, so its width is the factor width of the prefix
    for k, w in enumerate(widths, 1):
        g = fun_from_cnf(F.clauses[:k], F.variables)
        assert w == max(1, factor_width(g, T))


@prop
@given(st.integers(0, 2 ** 32 - 1))
def test_compile_circuit_matches_oracle(seed):
    rng = random.Random(seed)
    circ = random_circuit(rng)
    T = random_vtree(circ.variables, rng)
    D = compile_circuit(circ, T)
    assert to_table(D) == circ.table()
