"""Conversions between OBDDs and circuits on linear vtrees.

An OBDD with variable order ``x1 .. xn`` corresponds to a circuit on the
linear vtree for the reversed order: the family of the vtree node covering
``{x1 .. xi}`` holds one node per OBDD node reached after reading ``x1 .. xi``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .oracle import BoolFunTable, restrict
from .tdd import NEG, ONE, POS, Tdd, TddError, build, empty_tdd, label_holds
from .vtree import Var, Vtree, linear_vtree, parse_var

SINK0, SINK1 = "0", "1"


class ObddError(ValueError):
    pass


@dataclass
class Obdd:
    """Decision nodes ``id -> (var, lo, hi)``; the two sinks have ids ``"0"`` and ``"1"``."""

    order: tuple
    nodes: dict[str, tuple[Var, str, str]] = field(default_factory=dict)
    source: str = SINK0

    def __post_init__(self):
        self.order = tuple(self.order)
        self.check()

    def check(self) -> None:
        pos = {v: i for i, v in enumerate(self.order)}
        if len(pos) != len(self.order):
            raise ObddError("order has duplicates")
        for nid, (v, lo, hi) in self.nodes.items():
            if nid in (SINK0, SINK1):
                raise ObddError(f"decision node may not use sink id {nid!r}")
            if v not in pos:
                raise ObddError(f"node {nid} tests {v!r}, which is not in the order")
            for child in (lo, hi):
                if child in (SINK0, SINK1):
                    continue
                if child not in self.nodes:
                    raise ObddError(f"node {nid} points to undefined node {child!r}")
                if pos[self.nodes[child][0]] <= pos[v]:
                    raise ObddError(f"edge {nid} -> {child} violates the variable order")
        if self.source not in self.nodes and self.source not in (SINK0, SINK1):
            raise ObddError(f"undefined source {self.source!r}")

    @property
    def size(self) -> int:
        """Number of nodes reachable from the source, sinks included."""
        return len(self._reachable())

    def _reachable(self) -> set[str]:
        seen = {self.source}
        stack = [self.source]
        while stack:
            n = stack.pop()
            if n in self.nodes:
                for c in self.nodes[n][1:]:
                    if c not in seen:
                        seen.add(c)
                        stack.append(c)
        return seen

    def evaluate(self, tau: Mapping[Var, int]) -> bool:
        n = self.source
        while n in self.nodes:
            v, lo, hi = self.nodes[n]
            n = hi if tau[v] else lo
        return n == SINK1

    def table(self) -> BoolFunTable:
        return BoolFunTable.from_callable(self.order, self.evaluate)

    def reduce(self) -> "Obdd":
        """Merge isomorphic nodes and skip redundant tests."""
        pos = {v: i for i, v in enumerate(self.order)}
        canon: dict[str, str] = {SINK0: SINK0, SINK1: SINK1}
        unique: dict[tuple, str] = {}
        nodes: dict[str, tuple] = {}
        live = self._reachable()
        for nid in sorted((n for n in live if n in self.nodes), key=lambda n: -pos[self.nodes[n][0]]):
            v, lo, hi = self.nodes[nid]
            lo, hi = canon[lo], canon[hi]
            if lo == hi:
                canon[nid] = lo
                continue
            key = (v, lo, hi)
            if key not in unique:
                unique[key] = nid
                nodes[nid] = key
            canon[nid] = unique[key]
        return Obdd(self.order, nodes, canon[self.source])

    def dumps(self) -> str:
        lines = ["order " + " ".join(map(str, self.order))]
        pos = {v: i for i, v in enumerate(self.order)}
        for nid in sorted(self.nodes, key=lambda n: (pos[self.nodes[n][0]], n)):
            v, lo, hi = self.nodes[nid]
            lines.append(f"node {nid} {v} {lo} {hi}")
        lines += [f"sink0 {SINK0}", f"sink1 {SINK1}", f"source {self.source}"]
        return "\n".join(lines) + "\n"


def parse_obdd(text: str) -> Obdd:
    order = None
    raw_nodes: dict[str, tuple] = {}
    sinks: dict[str, str] = {}
    source = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts or parts[0] in ("c", "#"):
            continue
        try:
            if parts[0] == "order":
                order = tuple(parse_var(p) for p in parts[1:])
            elif parts[0] == "node":
                nid, v, lo, hi = parts[1], parse_var(parts[2]), parts[3], parts[4]
                if nid in raw_nodes:
                    raise ObddError(f"node {nid} defined twice")
                raw_nodes[nid] = (v, lo, hi)
            elif parts[0] in ("sink0", "sink1"):
                sinks[parts[1]] = SINK0 if parts[0] == "sink0" else SINK1
            elif parts[0] == "source":
                source = parts[1]
            else:
                raise ObddError(f"unexpected token {parts[0]!r}")
        except ObddError as e:
            raise ObddError(f"line {lineno}: {e}") from None
        except IndexError:
            raise ObddError(f"line {lineno}: malformed line {raw!r}") from None
    if order is None:
        raise ObddError("missing 'order' line")
    if source is None:
        raise ObddError("missing 'source' line")
    for s in sinks:
        if s in raw_nodes:
            raise ObddError(f"id {s} is both a sink and a decision node")

    def ref(x):
        if x in sinks:
            return sinks[x]
        if x in raw_nodes:
            return "n" + x
        raise ObddError(f"reference to undefined node {x!r}")

    nodes = {"n" + k: (v, ref(lo), ref(hi)) for k, (v, lo, hi) in raw_nodes.items()}
    return Obdd(order, nodes, ref(source))


def load_obdd(path) -> Obdd:
    with open(path) as fh:
        return parse_obdd(fh.read())


def obdd_from_table(f: BoolFunTable, order: Sequence[Var], quasi: bool = False) -> Obdd:
    """Reduced OBDD of a truth table for the given order.

    With ``quasi`` redundant tests are kept, so every path tests every variable
    (isomorphic nodes are still shared).
    """
    order = tuple(order)
    if set(order) != set(f.variables):
        raise ObddError("order must list exactly the table's variables")
    unique: dict[tuple, str] = {}
    nodes: dict[str, tuple] = {}

    def mk(v, lo, hi):
        if lo == hi and not quasi:
            return lo
        key = (v, lo, hi)
        if key not in unique:
            unique[key] = f"n{len(unique)}"
            nodes[unique[key]] = key
        return unique[key]

    memo: dict[tuple, str] = {}

    def go(i: int, tau: tuple) -> str:
        # identify subfunctions by their restricted table bytes
        sub = restrict(f, dict(zip(order[:i], tau)))
        key = (i, sub.bits.tobytes())
        if key in memo:
            return memo[key]
        if i == len(order):
            res = SINK1 if bool(sub.bits) else SINK0
        else:
            res = mk(order[i], go(i + 1, tau + (0,)), go(i + 1, tau + (1,)))
        memo[key] = res
        return res

    return Obdd(order, nodes, go(0, ()))


def obdd_vtree(order: Sequence[Var]) -> Vtree:
    """The linear vtree whose leaves, read from the root, are the order reversed."""
    return linear_vtree(tuple(reversed(tuple(order))))


def _reachable_alive(B: Obdd, alive: set) -> set:
    seen = {B.source} & alive
    stack = list(seen)
    while stack:
        k = stack.pop()
        if k in B.nodes:
            for c in B.nodes[k][1:]:
                if c in alive and c not in seen:
                    seen.add(c)
                    stack.append(c)
    return seen


def obdd_to_tdd(B: Obdd) -> Tdd:
    """Circuit on the reversed-order linear vtree computing the same function.

    Only states from which the 1-sink is reachable are kept; a path that skips
    ``x_i`` keeps its state through level ``i`` with one pair per literal.
    """
    order = B.order
    n = len(order)
    if n == 0:
        raise ObddError("OBDD over no variables")
    T = obdd_vtree(order)
    level = {v: i + 1 for i, v in enumerate(order)}

    def lvl(node: str) -> int:
        return level[B.nodes[node][0]] if node in B.nodes else n + 1

    # nodes that can still reach the 1-sink
    alive = {SINK1}
    for nid in sorted(B.nodes, key=lambda k: -lvl(k)):
        if B.nodes[nid][1] in alive or B.nodes[nid][2] in alive:
            alive.add(nid)
    if B.source not in alive:
        return empty_tdd(T)
    # state (node, i): after reading x1..xi the path sits at node, with lvl(node) > i
    # vtree node covering {x1..xi}: the leaf of x1 for i = 1, else the internal one
    cover: dict[int, int] = {}
    t = T.root
    for i in range(n, 1, -1):
        cover[i] = t
        t = T.right[t]
    cover[1] = t
    leaf_of = T.leaf_of
    fams: list = [[] for _ in range(len(T))]
    # a level nobody tests gets a single constant leaf instead of two literals
    tested = {B.nodes[k][0] for k in _reachable_alive(B, alive) if k in B.nodes}
    for i in range(2, n + 1):
        fams[leaf_of[order[i - 1]]] = [NEG, POS] if order[i - 1] in tested else [ONE]
    states: dict[str, int] = {}
    # level 1: a leaf family
    if lvl(B.source) == 1:
        _, lo, hi = B.nodes[B.source]
        labels: dict[str, list[str]] = {}
        for child, lab in ((lo, NEG), (hi, POS)):
            if child in alive:
                labels.setdefault(child, []).append(lab)
        for child, labs in labels.items():
            states[child] = len(fams[cover[1]])
            fams[cover[1]].append(ONE if len(labs) == 2 else labs[0])
    else:
        states[B.source] = 0
        fams[cover[1]].append(ONE)
    for i in range(2, n + 1):
        t = cover[i]
        new: dict[str, list] = {}
        for node, g in states.items():
            if lvl(node) == i:
                _, lo, hi = B.nodes[node]
                for child, lit in ((lo, 0), (hi, 1)):
                    if child in alive:
                        new.setdefault(child, []).append((lit, g))
            elif order[i - 1] in tested:
                new.setdefault(node, []).extend([(0, g), (1, g)])
            else:
                new.setdefault(node, []).append((0, g))
        states = {}
        for node, pairs in new.items():
            states[node] = len(fams[t])
            fams[t].append(pairs)
    out = states[SINK1]
    return build(Tdd, T, fams, out)


def tdd_to_obdd(C: Tdd, reduce: bool = True) -> Obdd:
    """OBDD for a deterministic circuit on a linear vtree.

    The order reads the vtree bottom-up. Each node of a non-root family becomes
    a decision node on the next variable; a missing parent sends the edge to
    the 0-sink, and the root family's output goes to the 1-sink.
    """
    T = C.vtree
    if not T.is_linear():
        raise TddError("tdd_to_obdd needs a linear vtree")
    order = tuple(reversed(T.linear_order()))
    # chain of families from the first-read leaf up to the root, and the sibling
    # leaf read when moving from each family to its parent
    first = T.leaf_of[order[0]]
    chain = [first]
    while chain[-1] != T.root:
        chain.append(T.parent[chain[-1]])
    nodes: dict[str, tuple] = {}

    def nid(t: int, g: int) -> str:
        if t == T.root:
            return SINK1 if g == C.out else SINK0
        return f"t{t}g{g}"

    def leaf_hit(leaf: int, value: int) -> int | None:
        for g, lab in enumerate(C.families[leaf]):
            if label_holds(lab, value):
                return g
        return None

    x0 = order[0]
    if first == T.root:
        src_lo = SINK1 if leaf_hit(first, 0) == C.out else SINK0
        src_hi = SINK1 if leaf_hit(first, 1) == C.out else SINK0
    else:
        h0, h1 = leaf_hit(first, 0), leaf_hit(first, 1)
        src_lo = SINK0 if h0 is None else nid(first, h0)
        src_hi = SINK0 if h1 is None else nid(first, h1)
    nodes["src"] = (x0, src_lo, src_hi)
    for k in range(len(chain) - 1):
        t, p = chain[k], chain[k + 1]
        s = T.sibling(t)
        y = T.var[s]
        owner = {pr: h for h, e in enumerate(C.families[p]) for pr in e}
        t_left = T.left[p] == t
        for g in range(len(C.families[t])):
            kids = []
            for value in (0, 1):
                a = leaf_hit(s, value)
                key = (g, a) if t_left else (a, g)
                h = owner.get(key) if a is not None else None
                kids.append(SINK0 if h is None else nid(p, h))
            nodes[nid(t, g)] = (y, kids[0], kids[1])
    B = Obdd(order, nodes, "src")
    return B.reduce() if reduce else B


def obdd_level_widths(B: Obdd) -> dict:
    """Number of decision nodes per variable."""
    out = {v: 0 for v in B.order}
    for n in B._reachable():
        if n in B.nodes:
            out[B.nodes[n][0]] += 1
    return out
