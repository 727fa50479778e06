"""CNF formulas and Boolean circuits: parsing, graphs, brute-force semantics."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import networkx as nx
import numpy as np

from .oracle import BoolFunTable, _axis_values, _check_size, fun_from_cnf
from .vtree import Var, parse_var, sort_vars

log = logging.getLogger(__name__)


class FormatError(ValueError):
    pass


# -- CNF ------------------------------------------------------------------


@dataclass(frozen=True)
class CnfFormula:
    num_vars: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        for c in self.clauses:
            for l in c:
                if l == 0 or abs(l) > self.num_vars:
                    raise FormatError(f"literal {l} out of range 1..{self.num_vars}")

    @classmethod
    def of(cls, clauses: Iterable[Iterable[int]], num_vars: int | None = None) -> "CnfFormula":
        cs = tuple(tuple(c) for c in clauses)
        n = max((abs(l) for c in cs for l in c), default=0)
        return cls(max(n, num_vars or 0), cs)

    @property
    def variables(self) -> tuple[int, ...]:
        return tuple(range(1, self.num_vars + 1))

    def table(self) -> BoolFunTable:
        return fun_from_cnf(self.clauses, self.variables)

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.num_vars} {len(self.clauses)}"]
        lines += [" ".join(map(str, c)) + " 0" for c in self.clauses]
        return "\n".join(lines) + "\n"

    def clause_vertex(self, j: int) -> int:
        """Vertex id of clause ``j`` in the incidence graph."""
        return self.num_vars + 1 + j


def parse_dimacs(text: str) -> CnfFormula:
    num_vars = None
    declared = None
    clauses: list[tuple[int, ...]] = []
    current: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            parts = line.split()
            if num_vars is not None:
                raise FormatError(f"line {lineno}: second 'p cnf' header")
            if len(parts) != 4 or parts[1] != "cnf":
                raise FormatError(f"line {lineno}: malformed header {raw!r}")
            try:
                num_vars, declared = int(parts[2]), int(parts[3])
            except ValueError:
                raise FormatError(f"line {lineno}: malformed header {raw!r}") from None
            continue
        if num_vars is None:
            raise FormatError(f"line {lineno}: clause before the 'p cnf' header")
        for tok in line.split():
            try:
                l = int(tok)
            except ValueError:
                raise FormatError(f"line {lineno}: bad literal {tok!r}") from None
            if l == 0:
                clauses.append(tuple(current))
                current = []
            elif abs(l) > num_vars:
                raise FormatError(f"line {lineno}: literal {l} exceeds declared {num_vars} variables")
            else:
                current.append(l)
    if num_vars is None:
        raise FormatError("missing 'p cnf' header")
    if current:
        clauses.append(tuple(current))
    if declared is not None and declared != len(clauses):
        log.warning("header declares %d clauses, found %d", declared, len(clauses))
    kept = []
    for c in clauses:
        lits = tuple(dict.fromkeys(c))
        if any(-l in lits for l in lits):
            log.warning("dropping tautological clause %s", " ".join(map(str, c)))
            continue
        kept.append(lits)
    return CnfFormula(num_vars, tuple(kept))


def load_dimacs(path) -> CnfFormula:
    with open(path) as fh:
        return parse_dimacs(fh.read())


def primal_graph(F: CnfFormula) -> nx.Graph:
    G = nx.Graph()
    G.add_nodes_from(F.variables)
    for c in F.clauses:
        vs = sorted(set(abs(l) for l in c))
        for i, a in enumerate(vs):
            for b in vs[i + 1:]:
                G.add_edge(a, b)
    return G


def incidence_graph(F: CnfFormula) -> nx.Graph:
    """Bipartite variable/clause graph; clause ``j`` is vertex ``F.clause_vertex(j)``."""
    G = nx.Graph()
    G.add_nodes_from(F.variables)
    for j, c in enumerate(F.clauses):
        cv = F.clause_vertex(j)
        G.add_node(cv)
        for l in c:
            G.add_edge(abs(l), cv)
    return G


# -- circuits -------------------------------------------------------------

GATE_KINDS = ("input", "not", "and", "or")


@dataclass(frozen=True)
class Gate:
    id: str
    kind: str
    inputs: tuple[str, ...] = ()
    var: Var = None


@dataclass
class Circuit:
    gates: dict[str, Gate] = field(default_factory=dict)
    output: str | None = None

    def add(self, gate: Gate) -> None:
        if gate.id in self.gates:
            raise FormatError(f"gate {gate.id!r} defined twice")
        if gate.kind not in GATE_KINDS:
            raise FormatError(f"unknown gate kind {gate.kind!r}")
        self.gates[gate.id] = gate

    @property
    def variables(self) -> tuple:
        return sort_vars(g.var for g in self.gates.values() if g.kind == "input")

    def topological_order(self) -> list[str]:
        order: list[str] = []
        state: dict[str, int] = {}
        for start in self.gates:
            if start in state:
                continue
            stack = [(start, False)]
            while stack:
                gid, done = stack.pop()
                if done:
                    state[gid] = 2
                    order.append(gid)
                    continue
                if state.get(gid) == 2:
                    continue
                if state.get(gid) == 1:
                    raise FormatError(f"circuit has a cycle through gate {gid!r}")
                state[gid] = 1
                stack.append((gid, True))
                for child in self.gates[gid].inputs:
                    if child not in self.gates:
                        raise FormatError(f"gate {gid!r} reads undefined gate {child!r}")
                    if state.get(child) == 1:
                        raise FormatError(f"circuit has a cycle through gate {child!r}")
                    if state.get(child) != 2:
                        stack.append((child, False))
        return order

    def evaluate(self, tau: Mapping[Var, int]) -> bool:
        val: dict[str, bool] = {}
        for gid in self.topological_order():
            g = self.gates[gid]
            if g.kind == "input":
                val[gid] = bool(tau[g.var])
            elif g.kind == "not":
                val[gid] = not val[g.inputs[0]]
            elif g.kind == "and":
                val[gid] = all(val[c] for c in g.inputs)
            else:
                val[gid] = any(val[c] for c in g.inputs)
        return val[self._out()]

    def table(self) -> BoolFunTable:
        vs = self.variables
        _check_size(len(vs))
        shape = (2,) * len(vs)
        val: dict[str, np.ndarray] = {}
        for gid in self.topological_order():
            g = self.gates[gid]
            if g.kind == "input":
                val[gid] = _axis_values(vs, g.var, True)
            elif g.kind == "not":
                val[gid] = ~val[g.inputs[0]]
            elif g.kind == "and":
                acc = np.ones(shape, dtype=bool)
                for c in g.inputs:
                    acc = acc & val[c]
                val[gid] = acc
            else:
                acc = np.zeros(shape, dtype=bool)
                for c in g.inputs:
                    acc = acc | val[c]
                val[gid] = acc
        return BoolFunTable(vs, np.asarray(val[self._out()]))

    def _out(self) -> str:
        if self.output is None:
            raise FormatError("circuit has no output gate")
        return self.output

    @property
    def vertex_index(self) -> dict[str, int]:
        """1-based integer vertex ids, in definition order."""
        return {gid: i + 1 for i, gid in enumerate(self.gates)}

    def dumps(self) -> str:
        lines = []
        for g in self.gates.values():
            if g.kind == "input":
                lines.append(f"input {g.id}")
            else:
                lines.append(f"{g.kind} {g.id} " + " ".join(g.inputs))
        lines.append(f"output {self._out()}")
        return "\n".join(lines) + "\n"


def parse_circuit(text: str) -> Circuit:
    C = Circuit()
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts or parts[0] in ("c", "#"):
            continue
        kind = parts[0]
        try:
            if kind == "input":
                if len(parts) != 2:
                    raise FormatError("expected 'input <name>'")
                C.add(Gate(parts[1], "input", (), parse_var(parts[1])))
            elif kind == "not":
                if len(parts) != 3:
                    raise FormatError("expected 'not <id> <child>'")
                C.add(Gate(parts[1], "not", (parts[2],)))
            elif kind in ("and", "or"):
                if len(parts) < 2:
                    raise FormatError(f"expected '{kind} <id> <children...>'")
                C.add(Gate(parts[1], kind, tuple(parts[2:])))
            elif kind == "output":
                if len(parts) != 2:
                    raise FormatError("expected 'output <id>'")
                C.output = parts[1]
            else:
                raise FormatError(f"unknown gate kind {kind!r}")
        except FormatError as e:
            raise FormatError(f"line {lineno}: {e}") from None
    if C.output is None:
        raise FormatError("circuit has no output line")
    if C.output not in C.gates:
        raise FormatError(f"output gate {C.output!r} is undefined")
    C.topological_order()
    return C


def load_circuit(path) -> Circuit:
    with open(path) as fh:
        return parse_circuit(fh.read())


def circuit_graph(C: Circuit) -> nx.Graph:
    """Undirected gate graph on integer vertex ids from ``C.vertex_index``."""
    idx = C.vertex_index
    G = nx.Graph()
    G.add_nodes_from(idx.values())
    for g in C.gates.values():
        for c in g.inputs:
            if c != g.id:
                G.add_edge(idx[g.id], idx[c])
    return G
