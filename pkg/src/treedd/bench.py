"""Benchmark functions and factor-width reports."""

from __future__ import annotations

import csv
import io
from typing import Iterable, Sequence

import numpy as np

from .minimize import canonize
from .oracle import BoolFunTable, _check_size, subfunction_profile
from .tdd import Tdd
from .transform import determinize, union_of_models
from .vtree import Vtree, balanced_vtree, linear_vtree


def _bits_table(variables: Sequence, fn_of_index) -> BoolFunTable:
    """Table whose entry at flat index ``i`` is ``fn_of_index(bits)``, with
    ``bits[j]`` the value of ``variables[j]`` (variables given in sorted order)."""
    n = len(variables)
    _check_size(n)
    idx = np.arange(2 ** n)
    bits = [(idx >> (n - 1 - j)) & 1 for j in range(n)]
    return BoolFunTable(tuple(variables), np.asarray(fn_of_index(bits), dtype=bool).reshape((2,) * n))


def hwb(n: int) -> BoolFunTable:
    """Hidden weighted bit on ``1..n``: the value of ``x_S`` where ``S`` is the
    number of ones, and 0 when ``S = 0``."""
    if n < 1:
        raise ValueError("n must be positive")

    def fn(bits):
        s = sum(bits)
        stacked = np.stack([np.zeros_like(s)] + bits)
        return stacked[s, np.arange(s.shape[0])]

    return _bits_table(list(range(1, n + 1)), fn)


def parity(n: int) -> BoolFunTable:
    """True when an even number of ``1..n`` are set."""
    if n < 1:
        raise ValueError("n must be positive")
    return _bits_table(list(range(1, n + 1)), lambda bits: sum(bits) % 2 == 0)


def mux_variables(k: int) -> tuple[list[str], list[str]]:
    n = 2 ** k
    return [f"x{i}" for i in range(k)], [f"y{j}" for j in range(n)]


def mux(k: int) -> BoolFunTable:
    """Multiplexer: selectors ``x0..x{k-1}`` address ``y_j`` with ``j = sum x_i 2^i``."""
    if k < 1:
        raise ValueError("k must be positive")
    xs, ys = mux_variables(k)
    from .vtree import sort_vars

    vs = sort_vars(xs + ys)
    pos = {v: i for i, v in enumerate(vs)}

    def fn(bits):
        j = sum(bits[pos[f"x{i}"]] << i for i in range(k))
        stacked = np.stack([bits[pos[y]] for y in ys])
        return stacked[j, np.arange(j.shape[0])]

    return _bits_table(list(vs), fn)


def mux_order(k: int) -> list[str]:
    xs, ys = mux_variables(k)
    return xs + ys


def table_to_tdd(f: BoolFunTable, T: Vtree) -> Tdd:
    """Canonical circuit for a truth table: union of its models, determinized, canonized."""
    if set(f.variables) != set(T.variables):
        raise ValueError("vtree leaves must equal the table's variables")
    return canonize(determinize(union_of_models(f.models(), T)))


VTREE_KINDS = {
    "balanced": balanced_vtree,
    "linear": linear_vtree,
    "linear-reversed": lambda order: linear_vtree(list(reversed(list(order)))),
}


def fw_report(f: BoolFunTable, name: str, vtrees: dict[str, Vtree]) -> list[dict]:
    """Per-node subfunction counts for each vtree, plus the maximum."""
    rows = []
    for kind, T in vtrees.items():
        prof = subfunction_profile(f, T)
        mx = max(prof.values())
        for t, c in sorted(prof.items()):
            rows.append(
                {"function": name, "n": f.n, "vtree-kind": kind, "vtree-node": t, "subfunction-count": c, "max": mx}
            )
    return rows


FW_COLUMNS = ["function", "n", "vtree-kind", "vtree-node", "subfunction-count", "max"]


def rows_to_csv(rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=FW_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()
