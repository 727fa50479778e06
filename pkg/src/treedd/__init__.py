"""Tree decision diagrams: compilation, canonical forms, transformations and learning."""

from .compile import compile_circuit, compile_cnf
from .formula import Circuit, CnfFormula, parse_circuit, parse_dimacs
from .minimize import canonize, equivalent
from .oracle import BoolFunTable, count_subfunctions, factor_width, fun_from_cnf
from .tdd import NTdd, Tdd, evaluate, model_count, read_tdd, to_table, write_tdd
from .transform import apply, condition, conjoin, determinize, forget, negate
from .vtree import Vtree, balanced_vtree, linear_vtree

__all__ = [
    "BoolFunTable",
    "Circuit",
    "CnfFormula",
    "NTdd",
    "Tdd",
    "Vtree",
    "apply",
    "balanced_vtree",
    "canonize",
    "compile_circuit",
    "compile_cnf",
    "condition",
    "conjoin",
    "count_subfunctions",
    "determinize",
    "equivalent",
    "evaluate",
    "factor_width",
    "forget",
    "fun_from_cnf",
    "linear_vtree",
    "model_count",
    "negate",
    "parse_circuit",
    "parse_dimacs",
    "read_tdd",
    "to_table",
    "write_tdd",
]
