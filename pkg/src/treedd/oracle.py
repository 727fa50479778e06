"""Brute-force truth tables.

This is the reference semantics the rest of the package is checked against.
A table over ``n`` variables is an ``n``-dimensional boolean array of shape
``(2,) * n``; axis ``i`` belongs to ``variables[i]`` (variables sorted), so the
flat index of an assignment is its binary expansion with the first variable
as the most significant bit.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping

import numpy as np

from .vtree import Var, Vtree, parse_var, sort_vars

DEFAULT_LIMIT = 20


class OracleLimitError(ValueError):
    pass


def oracle_limit() -> int:
    return int(os.environ.get("TREEDD_ORACLE_LIMIT", DEFAULT_LIMIT))


def _check_size(n: int) -> None:
    if n > oracle_limit():
        raise OracleLimitError(f"{n} variables exceeds the oracle limit of {oracle_limit()}")


@dataclass(frozen=True, eq=False)
class BoolFunTable:
    variables: tuple
    bits: np.ndarray

    def __post_init__(self):
        if self.bits.shape != (2,) * len(self.variables):
            raise ValueError("table shape does not match the variable count")
        if self.bits.dtype != np.bool_:
            object.__setattr__(self, "bits", self.bits.astype(bool))

    # -- constructors ----------------------------------------------------

    @classmethod
    def constant(cls, value: bool, variables: Iterable[Var] = ()) -> "BoolFunTable":
        vs = sort_vars(variables)
        _check_size(len(vs))
        return cls(vs, np.full((2,) * len(vs), bool(value)))

    @classmethod
    def from_callable(cls, variables: Iterable[Var], fn: Callable[[dict], bool]) -> "BoolFunTable":
        vs = sort_vars(variables)
        _check_size(len(vs))
        flat = np.array(
            [bool(fn(dict(zip(vs, bits)))) for bits in itertools.product((0, 1), repeat=len(vs))],
            dtype=bool,
        )
        return cls(vs, flat.reshape((2,) * len(vs)))

    @classmethod
    def from_flat(cls, variables: Iterable[Var], flat) -> "BoolFunTable":
        vs = sort_vars(variables)
        arr = np.asarray(flat, dtype=bool)
        return cls(vs, arr.reshape((2,) * len(vs)))

    @classmethod
    def literal(cls, v: Var, positive: bool = True, variables: Iterable[Var] | None = None) -> "BoolFunTable":
        vs = sort_vars(set(variables or ()) | {v})
        return cls(vs, _axis_values(vs, v, positive))

    # -- basic queries ---------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.variables)

    @property
    def flat(self) -> np.ndarray:
        return self.bits.reshape(-1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BoolFunTable):
            return NotImplemented
        return self.variables == other.variables and np.array_equal(self.bits, other.bits)

    def __hash__(self) -> int:
        return hash((self.variables, self.bits.tobytes()))

    def __repr__(self) -> str:
        return f"BoolFunTable({list(self.variables)}, models={self.count()})"

    def count(self) -> int:
        return int(self.bits.sum())

    def is_empty(self) -> bool:
        return not self.bits.any()

    def __call__(self, tau: Mapping[Var, int]) -> bool:
        return bool(self.bits[tuple(int(tau[v]) for v in self.variables)])

    def models(self) -> Iterator[dict]:
        if self.n == 0:
            if self.bits:
                yield {}
            return
        for idx in zip(*np.nonzero(self.bits)):
            yield {v: int(b) for v, b in zip(self.variables, idx)}

    def hex(self) -> str:
        """Hex dump of the flat table, most significant index first."""
        bits = "".join("1" if b else "0" for b in self.flat)
        width = max(1, (len(bits) + 3) // 4)
        return format(int(bits, 2), f"0{width}x")

    # -- operations ------------------------------------------------------

    def extend(self, variables: Iterable[Var]) -> "BoolFunTable":
        """The same function viewed over a superset of its variables."""
        vs = sort_vars(set(variables) | set(self.variables))
        if vs == self.variables:
            return self
        _check_size(len(vs))
        # insert broadcast axes for new variables
        src = {v: i for i, v in enumerate(self.variables)}
        order = [src[v] for v in vs if v in src]
        arr = np.transpose(self.bits, order) if order else self.bits
        shape = [2 if v in src else 1 for v in vs]
        arr = arr.reshape(shape)
        return BoolFunTable(vs, np.broadcast_to(arr, (2,) * len(vs)).copy())

    def _aligned(self, other: "BoolFunTable"):
        vs = set(self.variables) | set(other.variables)
        return self.extend(vs), other.extend(vs)

    def __and__(self, other):
        a, b = self._aligned(other)
        return BoolFunTable(a.variables, a.bits & b.bits)

    def __or__(self, other):
        a, b = self._aligned(other)
        return BoolFunTable(a.variables, a.bits | b.bits)

    def __xor__(self, other):
        a, b = self._aligned(other)
        return BoolFunTable(a.variables, a.bits ^ b.bits)

    def __invert__(self):
        return BoolFunTable(self.variables, ~self.bits)

    def exists(self, Y: Iterable[Var]) -> "BoolFunTable":
        Y = set(Y)
        axes = tuple(i for i, v in enumerate(self.variables) if v in Y)
        keep = tuple(v for v in self.variables if v not in Y)
        return BoolFunTable(keep, self.bits.any(axis=axes) if axes else self.bits)


def _axis_values(vs: tuple, v: Var, positive: bool) -> np.ndarray:
    i = vs.index(v)
    shape = [1] * len(vs)
    shape[i] = 2
    arr = np.array([not positive, positive], dtype=bool).reshape(shape)
    return np.broadcast_to(arr, (2,) * len(vs)).copy()


def restrict(f: BoolFunTable, tau: Mapping[Var, int]) -> BoolFunTable:
    """Fix the variables in ``tau``; the result is over the remaining variables."""
    for v in tau:
        if v not in f.variables:
            raise ValueError(f"variable {v!r} is not in the table")
    index = tuple(int(tau[v]) if v in tau else slice(None) for v in f.variables)
    keep = tuple(v for v in f.variables if v not in tau)
    return BoolFunTable(keep, np.asarray(f.bits[index]))


def fun_from_cnf(clauses: Iterable[Iterable[int]], variables: Iterable[Var] | None = None) -> BoolFunTable:
    """Truth table of a CNF given as DIMACS-style signed integer clauses."""
    clauses = [tuple(c) for c in clauses]
    vs = set(abs(l) for c in clauses for l in c)
    if variables is not None:
        extra = vs - set(variables)
        if extra:
            raise ValueError(f"clause variables {sorted(extra)} missing from the variable set")
        vs |= set(variables)
    vs = sort_vars(vs)
    _check_size(len(vs))
    shape = (2,) * len(vs)
    bits = np.ones(shape, dtype=bool)
    cache: dict = {}
    for c in clauses:
        sat = np.zeros(shape, dtype=bool)
        for l in c:
            key = (abs(l), l > 0)
            if key not in cache:
                cache[key] = _axis_values(vs, abs(l), l > 0)
            sat |= cache[key]
        bits &= sat
    return BoolFunTable(vs, bits)


def count_subfunctions(f: BoolFunTable, Y: Iterable[Var], nontrivial_only: bool = True) -> int:
    """Number of distinct functions ``f[tau]`` over the other variables, for ``tau`` ranging over ``Y``."""
    Y = set(Y)
    if not Y <= set(f.variables):
        raise ValueError("Y must be a subset of the table's variables")
    front = [i for i, v in enumerate(f.variables) if v in Y]
    back = [i for i, v in enumerate(f.variables) if v not in Y]
    arr = np.transpose(f.bits, front + back).reshape(2 ** len(front), 2 ** len(back))
    rows = np.unique(arr, axis=0)
    if nontrivial_only:
        rows = rows[rows.any(axis=1)]
    return int(rows.shape[0])


def subfunction_profile(f: BoolFunTable, T: Vtree, nontrivial_only: bool = True) -> dict[int, int]:
    if set(T.variables) != set(f.variables):
        raise ValueError("vtree leaves must equal the table's variables")
    return {t: count_subfunctions(f, T.vars_of(t), nontrivial_only) for t in range(len(T))}


def factor_width(f: BoolFunTable, T: Vtree) -> int:
    return max(subfunction_profile(f, T).values())


def dumps_table(f: BoolFunTable) -> str:
    """Text form: ``vars v1 .. vn`` then ``bits`` with the flat table as 0/1."""
    bits = "".join("1" if b else "0" for b in f.flat)
    return "vars " + " ".join(map(str, f.variables)) + "\nbits " + bits + "\n"


def parse_table(text: str) -> BoolFunTable:
    variables = bits = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts or parts[0] in ("c", "#"):
            continue
        if parts[0] == "vars":
            variables = [parse_var(p) for p in parts[1:]]
        elif parts[0] == "bits":
            bits = "".join(parts[1:])
        else:
            raise ValueError(f"line {lineno}: unexpected token {parts[0]!r}")
    if variables is None or bits is None:
        raise ValueError("truth table needs a 'vars' and a 'bits' line")
    if sort_vars(variables) != tuple(variables) or len(set(variables)) != len(variables):
        raise ValueError("variables must be distinct and listed in sorted order")
    if len(bits) != 2 ** len(variables) or set(bits) - {"0", "1"}:
        raise ValueError(f"expected {2 ** len(variables)} bits of 0/1, got {len(bits)}")
    return BoolFunTable.from_flat(variables, np.array([c == "1" for c in bits]))


def load_table(path) -> BoolFunTable:
    with open(path) as fh:
        return parse_table(fh.read())


def fun_from_function(variables: Iterable[Var], fn: Callable[[dict], bool]) -> BoolFunTable:
    return BoolFunTable.from_callable(variables, fn)
