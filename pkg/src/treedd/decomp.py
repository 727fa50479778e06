"""Tree decompositions and the vtrees derived from them.

A variable ``x`` is attached as a leaf just above ``t(x)``, the shallowest
decomposition node whose bag holds ``x``. Decomposition nodes with several
children are binarized by a left fold (equivalently: by copying the bag into
a chain of binary nodes), unary chains are contracted, and subtrees holding
no variable are dropped. Every resulting vtree node then covers
``B_{<=t} minus U`` for some decomposition node ``t`` and some ``U`` inside ``B_t``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping

import networkx as nx
from networkx.algorithms.approximation import treewidth_min_fill_in

from .formula import Circuit, CnfFormula, FormatError, circuit_graph, incidence_graph, primal_graph
from .vtree import Var, Vtree, var_key


class DecompositionError(ValueError):
    pass


@dataclass
class TreeDecomp:
    bags: list[frozenset]
    edges: list[tuple[int, int]]
    root: int = 0

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in self.bags]
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return [sorted(x) for x in adj]

    def rooted_children(self) -> list[list[int]]:
        """Children lists when rooted at ``self.root``; raises if not a tree."""
        n = len(self.bags)
        if n == 0:
            raise DecompositionError("decomposition has no bags")
        if len(self.edges) != n - 1:
            raise DecompositionError(f"{n} bags need {n - 1} edges, got {len(self.edges)}")
        adj = self.adjacency()
        children: list[list[int]] = [[] for _ in range(n)]
        seen = {self.root}
        queue = deque([self.root])
        while queue:
            t = queue.popleft()
            for s in adj[t]:
                if s not in seen:
                    seen.add(s)
                    children[t].append(s)
                    queue.append(s)
        if len(seen) != n:
            raise DecompositionError("decomposition tree is not connected")
        return children

    def problems(self, G: nx.Graph) -> list[str]:
        """Everything wrong with this decomposition for ``G``; empty when valid."""
        out: list[str] = []
        try:
            children = self.rooted_children()
        except DecompositionError as e:
            return [str(e)]
        where: dict[Hashable, list[int]] = {}
        for i, bag in enumerate(self.bags):
            for v in bag:
                if v not in G:
                    out.append(f"bag {i} holds {v!r}, which is not a vertex of the graph")
                where.setdefault(v, []).append(i)
        for v in G.nodes:
            if v not in where:
                out.append(f"vertex {v!r} is in no bag")
        for u, v in G.edges:
            if not any(u in self.bags[i] for i in where.get(v, ())):
                out.append(f"edge {u!r}-{v!r} is in no bag")
        adj = [[] for _ in self.bags]
        for t, cs in enumerate(children):
            for c in cs:
                adj[t].append(c)
                adj[c].append(t)
        for v, nodes in where.items():
            nodes_set = set(nodes)
            seen = {nodes[0]}
            stack = [nodes[0]]
            while stack:
                t = stack.pop()
                for s in adj[t]:
                    if s in nodes_set and s not in seen:
                        seen.add(s)
                        stack.append(s)
            if len(seen) != len(nodes_set):
                out.append(f"bags holding {v!r} are not connected")
        return out

    def validate(self, G: nx.Graph) -> None:
        probs = self.problems(G)
        if probs:
            raise DecompositionError("invalid tree decomposition: " + "; ".join(probs[:5]))

    def with_vertex_everywhere(self, v) -> "TreeDecomp":
        return TreeDecomp([b | {v} for b in self.bags], list(self.edges), self.root)

    # -- PACE .td format -------------------------------------------------

    def to_pace(self, num_vertices: int) -> str:
        lines = [f"s td {len(self.bags)} {self.width + 1} {num_vertices}"]
        for i, b in enumerate(self.bags):
            lines.append(" ".join(["b", str(i + 1)] + [str(v) for v in sorted(b)]))
        for a, b in self.edges:
            lines.append(f"{a + 1} {b + 1}")
        return "\n".join(lines) + "\n"


def parse_pace_td(text: str) -> TreeDecomp:
    nbags = None
    bags: dict[int, frozenset] = {}
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts or parts[0] == "c":
            continue
        try:
            if parts[0] == "s":
                if parts[1] != "td":
                    raise FormatError("expected 's td'")
                nbags = int(parts[2])
            elif parts[0] == "b":
                bags[int(parts[1]) - 1] = frozenset(int(v) for v in parts[2:])
            else:
                a, b = int(parts[0]), int(parts[1])
                edges.append((a - 1, b - 1))
        except (IndexError, ValueError, FormatError):
            raise FormatError(f"line {lineno}: malformed .td line {raw!r}") from None
    if nbags is None:
        raise FormatError("missing 's td' header")
    if sorted(bags) != list(range(nbags)):
        raise FormatError(f"expected bags 1..{nbags}")
    for a, b in edges:
        if not (0 <= a < nbags and 0 <= b < nbags):
            raise FormatError(f"edge {a + 1} {b + 1} refers to a missing bag")
    return TreeDecomp([bags[i] for i in range(nbags)], edges, 0)


def load_pace_td(path) -> TreeDecomp:
    with open(path) as fh:
        return parse_pace_td(fh.read())


def min_fill_td(G: nx.Graph) -> TreeDecomp:
    """Tree decomposition from a min-fill elimination ordering, rooted at bag 0."""
    _, T = treewidth_min_fill_in(G)
    nodes = list(T.nodes)
    index = {b: i for i, b in enumerate(nodes)}
    td = TreeDecomp([frozenset(b) for b in nodes], [(index[a], index[b]) for a, b in T.edges], 0)
    td.validate(G)
    return td


# -- vtrees from decompositions -------------------------------------------


def _attach_order(xs: list, inside: set, adjacency: Mapping[Var, set] | None) -> list:
    """Order in which a node's own variables are attached above it.

    Greedy: next is the variable with most neighbours already below, so that
    variables tied to the subtree join it before unrelated ones.
    """
    xs = sorted(xs, key=var_key)
    if adjacency is None:
        return xs
    below = set(inside)
    out = []
    while xs:
        best = max(xs, key=lambda x: len(adjacency.get(x, ()) & below))
        xs.remove(best)
        out.append(best)
        below.add(best)
    return out


def _adjacency(G: nx.Graph) -> dict:
    return {v: set(G[v]) for v in G.nodes}


def _vtree_from_td(
    td: TreeDecomp, vertex_var: Mapping[Hashable, Var], adjacency: Mapping[Var, set] | None = None
) -> Vtree:
    children = td.rooted_children()
    n = len(td.bags)
    depth = [0] * n
    order = []
    stack = [td.root]
    while stack:
        t = stack.pop()
        order.append(t)
        for c in reversed(children[t]):
            depth[c] = depth[t] + 1
            stack.append(c)
    # t(x): shallowest node holding x, ties broken by preorder position
    best: dict[Hashable, int] = {}
    for t in order:
        for v in td.bags[t]:
            if v not in best or depth[t] < depth[best[v]]:
                best[v] = t
    home: dict[int, list] = {t: [] for t in range(n)}
    for vertex, x in vertex_var.items():
        if vertex not in best:
            raise DecompositionError(f"variable {x!r} is in no bag")
        home[best[vertex]].append(x)
    parent = {c: t for t in range(n) for c in children[t]}
    inside: dict[int, set] = {t: set() for t in range(n)}
    built: dict[int, object] = {}
    for t in reversed(order):
        subs = [built[c] for c in children[t] if built[c] is not None]
        node = None
        for s in subs:
            node = s if node is None else (node, s)
        for x in _attach_order(home[t], inside[t], adjacency):
            node = x if node is None else (node, x)
        built[t] = node
        inside[t] |= set(home[t])
        if t != td.root:
            inside[parent[t]] |= inside[t]
    nested = built[td.root]
    if nested is None:
        raise DecompositionError("decomposition holds no variables")
    return Vtree.from_nested(nested)


def vtree_from_primal_td(td: TreeDecomp, F: CnfFormula, root: int | None = None) -> Vtree:
    if root is not None:
        td = TreeDecomp(td.bags, td.edges, root)
    G = primal_graph(F)
    td.validate(G)
    return _vtree_from_td(td, {v: v for v in F.variables}, _adjacency(G))


def vtree_from_incidence_td(td: TreeDecomp, F: CnfFormula, root: int | None = None) -> Vtree:
    if root is not None:
        td = TreeDecomp(td.bags, td.edges, root)
    td.validate(incidence_graph(F))
    return _vtree_from_td(td, {v: v for v in F.variables}, _adjacency(primal_graph(F)))


def vtree_from_circuit_td(td: TreeDecomp, C: Circuit, root: int | None = None) -> Vtree:
    """Vtree from a decomposition of the circuit's gate graph.

    The output gate is added to every bag first, as the construction requires.
    """
    if root is not None:
        td = TreeDecomp(td.bags, td.edges, root)
    G = circuit_graph(C)
    td.validate(G)
    idx = C.vertex_index
    td = td.with_vertex_everywhere(idx[C._out()])
    return _vtree_from_td(td, {idx[g.id]: g.var for g in C.gates.values() if g.kind == "input"})


def default_cnf_vtree(F: CnfFormula) -> Vtree:
    if F.num_vars == 0:
        raise DecompositionError("formula has no variables")
    return vtree_from_primal_td(min_fill_td(primal_graph(F)), F)


def default_circuit_vtree(C: Circuit) -> Vtree:
    return vtree_from_circuit_td(min_fill_td(circuit_graph(C)), C)


def path_decomposition(sequence: Iterable, span: int) -> TreeDecomp:
    """Path of bags ``sequence[i : i + span + 1]``: width ``span`` for graphs whose
    edges join vertices at most ``span`` apart in the sequence."""
    seq = list(sequence)
    if len(seq) <= span + 1:
        return TreeDecomp([frozenset(seq)], [], 0)
    bags = [frozenset(seq[i:i + span + 1]) for i in range(len(seq) - span)]
    return TreeDecomp(bags, [(i, i + 1) for i in range(len(bags) - 1)], 0)
