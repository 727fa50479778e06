"""Tree decision diagrams.

A circuit over a vtree ``T`` keeps one family of nodes per vtree node. Nodes in
a leaf family carry a label: ``+`` (the variable), ``-`` (its negation),
``1`` or ``0``. A node in the family of an internal vtree node ``t`` is a
disjunction over a set of input pairs ``(a, b)``, each one the conjunction of
node ``a`` from the left child's family and node ``b`` from the right child's.
The output is one node of the root family.

``NTdd`` places no further restriction. ``Tdd`` additionally promises
determinism: within a family no two nodes share a model.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .oracle import BoolFunTable, _check_size
from .vtree import Var, Vtree, _parse_vtree_lines, parse_var, var_key

ZERO, ONE, POS, NEG = "0", "1", "+", "-"
LABELS = (ZERO, ONE, POS, NEG)
_LABEL_RANK = {NEG: 0, POS: 1, ONE: 2, ZERO: 3}

Pair = tuple[int, int]


class TddError(ValueError):
    pass


class TddFormatError(TddError):
    pass


# -- label algebra --------------------------------------------------------


def label_or(labels: Iterable[str]) -> str:
    s = set(labels)
    if ONE in s or (POS in s and NEG in s):
        return ONE
    if POS in s:
        return POS
    if NEG in s:
        return NEG
    return ZERO


def label_and(a: str, b: str) -> str:
    if a == ZERO or b == ZERO:
        return ZERO
    if a == ONE:
        return b
    if b == ONE:
        return a
    return a if a == b else ZERO


def label_holds(label: str, value: int) -> bool:
    return label == ONE or (label == POS and value == 1) or (label == NEG and value == 0)


def as_literal(lit) -> tuple[Var, bool]:
    """Accept a signed int (DIMACS style) or a ``(variable, polarity)`` pair."""
    if isinstance(lit, tuple):
        v, pos = lit
        return v, bool(pos)
    if isinstance(lit, int) and not isinstance(lit, bool) and lit != 0:
        return abs(lit), lit > 0
    raise TddError(f"not a literal: {lit!r}")


# -- circuits ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class NTdd:
    vtree: Vtree
    families: tuple[tuple, ...]
    out: int

    def __post_init__(self):
        if len(self.families) != len(self.vtree):
            raise TddError("need exactly one family per vtree node")

    def __eq__(self, other) -> bool:
        if not isinstance(other, NTdd):
            return NotImplemented
        return self.vtree == other.vtree and self.families == other.families and self.out == other.out

    def __hash__(self) -> int:
        return hash((self.vtree, self.families, self.out))

    def __repr__(self) -> str:
        return f"{type(self).__name__}(vars={len(self.variables)}, width={self.width}, size={self.size})"

    @property
    def variables(self) -> tuple:
        return self.vtree.variables

    @property
    def width(self) -> int:
        return max(len(f) for f in self.families)

    @property
    def size(self) -> int:
        T = self.vtree
        return sum(len(e) for t in T.internal_nodes for e in self.families[t])

    @property
    def node_count(self) -> int:
        return sum(len(f) for f in self.families)

    def family(self, t: int) -> tuple:
        return self.families[t]

    def is_deterministic(self) -> bool:
        return not isinstance(validate_deterministic(self), DeterminismViolation)

    def dumps(self) -> str:
        return write_tdd(self)


class Tdd(NTdd):
    """A deterministic circuit. Construct through the operations, or check with
    :func:`validate_deterministic`."""


def build(cls, vtree: Vtree, families: Sequence[Sequence], out: int):
    """Normalize families (pairs sorted and deduplicated) and construct."""
    norm = []
    for t, fam in enumerate(families):
        if vtree.is_leaf(t):
            norm.append(tuple(fam))
        else:
            norm.append(tuple(tuple(sorted(set(e))) for e in fam))
    return cls(vtree, tuple(norm), out)


def check_well_formed(C: NTdd) -> None:
    T = C.vtree
    for t in range(len(T)):
        fam = C.families[t]
        if T.is_leaf(t):
            for g, lab in enumerate(fam):
                if lab not in LABELS:
                    raise TddError(f"vtree node {t}, node {g}: bad label {lab!r}")
        else:
            l, r = T.children(t)
            nl, nr = len(C.families[l]), len(C.families[r])
            for g, e in enumerate(fam):
                for a, b in e:
                    if not (0 <= a < nl and 0 <= b < nr):
                        raise TddError(f"vtree node {t}, node {g}: pair ({a},{b}) out of range")
    if not 0 <= C.out < len(C.families[T.root]):
        raise TddError(f"output {C.out} is not a node of the root family")


@dataclass(frozen=True)
class DeterminismViolation:
    vtree_node: int
    nodes: tuple[int, ...]
    reason: str

    def __str__(self) -> str:
        return f"vtree node {self.vtree_node}, nodes {self.nodes}: {self.reason}"


def validate_deterministic(C: NTdd) -> "Tdd | DeterminismViolation":
    check_well_formed(C)
    T = C.vtree
    for t in range(len(T)):
        fam = C.families[t]
        if T.is_leaf(t):
            for lab in (POS, NEG, ONE):
                idx = tuple(g for g, l in enumerate(fam) if l == lab)
                if len(idx) > 1:
                    return DeterminismViolation(t, idx, f"label {lab} occurs more than once")
            ones = [g for g, l in enumerate(fam) if l == ONE]
            if ones:
                others = tuple(g for g, l in enumerate(fam) if l in (POS, NEG))
                if others:
                    return DeterminismViolation(t, (ones[0],) + others, "a 1-node shares the family with a literal")
        else:
            owner: dict[Pair, int] = {}
            for g, e in enumerate(fam):
                for p in e:
                    if p in owner:
                        return DeterminismViolation(t, (owner[p], g), f"both contain pair {p}")
                    owner[p] = g
    if isinstance(C, Tdd):
        return C
    return Tdd(C.vtree, C.families, C.out)


def as_tdd(C: NTdd) -> Tdd:
    res = validate_deterministic(C)
    if isinstance(res, DeterminismViolation):
        raise TddError(f"not deterministic: {res}")
    return res


# -- semantics --------------------------------------------------------------


def satisfied_nodes(C: NTdd, tau: Mapping[Var, int]) -> list[set[int]]:
    T = C.vtree
    sat: list[set[int]] = [set() for _ in range(len(T))]
    for t in T.postorder:
        fam = C.families[t]
        if T.is_leaf(t):
            x = int(tau[T.var[t]])
            sat[t] = {g for g, lab in enumerate(fam) if label_holds(lab, x)}
        else:
            s1, s2 = sat[T.left[t]], sat[T.right[t]]
            sat[t] = {g for g, e in enumerate(fam) if any(a in s1 and b in s2 for a, b in e)}
    return sat


def evaluate(C: NTdd, tau: Mapping[Var, int]) -> bool:
    return C.out in satisfied_nodes(C, tau)[C.vtree.root]


def node_tables(C: NTdd) -> list[list[np.ndarray]]:
    """Truth table of every node over its own vtree node's variables.

    Axes follow the vtree's left-to-right leaf order below ``t``, not sorted order.
    """
    T = C.vtree
    # flat[t]: one row per node, columns indexed with the left child's variables most significant
    flat: list[np.ndarray] = [None] * len(T)  # type: ignore[list-item]
    for t in T.postorder:
        fam = C.families[t]
        if T.is_leaf(t):
            flat[t] = np.array([[label_holds(l, 0), label_holds(l, 1)] for l in fam], dtype=bool).reshape(len(fam), 2)
            continue
        L, R = flat[T.left[t]], flat[T.right[t]]
        rows = np.zeros((len(fam), L.shape[1] * R.shape[1]), dtype=bool)
        Lf, Rf = L.astype(np.float32), R.astype(np.float32)
        for g, e in enumerate(fam):
            if not e:
                continue
            M = np.zeros((L.shape[0], R.shape[0]), dtype=np.float32)
            for a, b in e:
                M[a, b] = 1
            rows[g] = (Lf.T @ M @ Rf).ravel() > 0
        flat[t] = rows
    return [[row.reshape(_shape_below(T, t)) for row in flat[t]] for t in range(len(T))]


def _shape_below(T: Vtree, t: int) -> tuple:
    return (2,) * len(T.vars_of(t))


def _leaf_order(T: Vtree, t: int) -> list:
    return [T.var[s] for s in T.postorder_from(t) if T.is_leaf(s)]


def to_table(C: NTdd) -> BoolFunTable:
    T = C.vtree
    _check_size(len(T.variables))
    tabs = node_tables(C)
    arr = tabs[T.root][C.out]
    order = _leaf_order(T, T.root)
    perm = [order.index(v) for v in T.variables]
    return BoolFunTable(T.variables, np.transpose(arr, perm))


def node_table(C: NTdd, t: int, g: int) -> BoolFunTable:
    """Truth table of one node, over the variables of its vtree node."""
    T = C.vtree
    tabs = node_tables(C)
    order = _leaf_order(T, t)
    vs = tuple(sorted(order, key=var_key))
    return BoolFunTable(vs, np.transpose(tabs[t][g], [order.index(v) for v in vs]))


def certificate_of(C: Tdd, tau: Mapping[Var, int]) -> dict[int, int] | None:
    """For a model, the unique choice of one satisfied node per vtree node
    that witnesses it; ``None`` for a non-model."""
    T = C.vtree
    chosen: dict[int, int] = {}
    for t in T.postorder:
        fam = C.families[t]
        if T.is_leaf(t):
            x = int(tau[T.var[t]])
            hits = [g for g, lab in enumerate(fam) if label_holds(lab, x)]
            if not hits:
                return None
            chosen[t] = hits[0]
        else:
            key = (chosen[T.left[t]], chosen[T.right[t]])
            hit = _pair_owner(C, t).get(key)
            if hit is None:
                return None
            chosen[t] = hit
    return chosen if chosen[T.root] == C.out else None


def _pair_owner(C: NTdd, t: int) -> dict[Pair, int]:
    return {p: g for g, e in enumerate(C.families[t]) for p in e}


def model_counts(C: NTdd) -> list[list[int]]:
    T = C.vtree
    cnt: list[list[int]] = [[] for _ in range(len(T))]
    for t in T.postorder:
        fam = C.families[t]
        if T.is_leaf(t):
            cnt[t] = [2 if l == ONE else 0 if l == ZERO else 1 for l in fam]
        else:
            L, R = cnt[T.left[t]], cnt[T.right[t]]
            cnt[t] = [sum(L[a] * R[b] for a, b in e) for e in fam]
    return cnt


def model_count(C: Tdd) -> int:
    """Exact number of models over the vtree's variables; needs determinism."""
    return model_counts(C)[C.vtree.root][C.out]


def enumerate_models(C: Tdd, limit: int | None = None) -> Iterator[dict]:
    """Each model exactly once, by walking certificates top-down."""
    T = C.vtree
    cnt = model_counts(C)

    def walk(t: int, g: int) -> Iterator[dict]:
        if cnt[t][g] == 0:
            return
        if T.is_leaf(t):
            lab = C.families[t][g]
            x = T.var[t]
            if lab in (NEG, ONE):
                yield {x: 0}
            if lab in (POS, ONE):
                yield {x: 1}
            return
        l, r = T.children(t)
        for a, b in C.families[t][g]:
            if cnt[l][a] and cnt[r][b]:
                for m1 in walk(l, a):
                    for m2 in walk(r, b):
                        yield {**m1, **m2}

    yield from itertools.islice(walk(T.root, C.out), limit)


def any_model(C: NTdd) -> dict | None:
    T = C.vtree
    cnt = model_counts(C)
    if not cnt[T.root][C.out]:
        return None
    tau: dict = {}
    stack = [(T.root, C.out)]
    while stack:
        t, g = stack.pop()
        if T.is_leaf(t):
            tau[T.var[t]] = 0 if C.families[t][g] == NEG else 1
            continue
        l, r = T.children(t)
        a, b = next((a, b) for a, b in C.families[t][g] if cnt[l][a] and cnt[r][b])
        stack.append((l, a))
        stack.append((r, b))
    return tau


# -- basic constructions ------------------------------------------------------


def empty_tdd(T: Vtree) -> Tdd:
    """Marker form of the unsatisfiable function: a single output node with no models."""
    fams: list[tuple] = [() for _ in range(len(T))]
    fams[T.root] = (ZERO,) if T.is_leaf(T.root) else ((),)
    return Tdd(T, tuple(fams), 0)


def is_empty_marker(C: NTdd) -> bool:
    return C == empty_tdd(C.vtree)


def constant_tdd(value: bool, T: Vtree) -> Tdd:
    if not value:
        return empty_tdd(T)
    fams = [(ONE,) if T.is_leaf(t) else (((0, 0),),) for t in range(len(T))]
    return Tdd(T, tuple(fams), 0)


def single_model_tdd(tau: Mapping[Var, int], T: Vtree) -> Tdd:
    fams = []
    for t in range(len(T)):
        if T.is_leaf(t):
            fams.append((POS if tau[T.var[t]] else NEG,))
        else:
            fams.append((((0, 0),),))
    return Tdd(T, tuple(fams), 0)


def clause_tdd(clause: Iterable, T: Vtree) -> Tdd:
    """Deterministic circuit of width at most 2 for a clause.

    At each vtree node ``t`` there is a node ``d_t`` for "no literal over X_t is
    true" and, when the clause mentions a variable below ``t``, a node ``c_t``
    for "some literal over X_t is true".
    """
    lits = dict()
    for lit in clause:
        v, pos = as_literal(lit)
        if v in lits and lits[v] != pos:
            raise TddError(f"clause is a tautology on variable {v!r}")
        if v not in T.leaf_of:
            raise TddError(f"clause variable {v!r} is not a leaf of the vtree")
        lits[v] = pos
    # per vtree node: index of c (or None) and d in the family
    c_idx: list[int | None] = [None] * len(T)
    d_idx: list[int] = [0] * len(T)
    fams: list[tuple] = [()] * len(T)
    for t in T.postorder:
        if T.is_leaf(t):
            v = T.var[t]
            if v in lits:
                c_lab = POS if lits[v] else NEG
                d_lab = NEG if lits[v] else POS
                fams[t] = (c_lab, d_lab)
                c_idx[t], d_idx[t] = 0, 1
            else:
                fams[t] = (ONE,)
                c_idx[t], d_idx[t] = None, 0
            continue
        l, r = T.children(t)
        c1, c2, d1, d2 = c_idx[l], c_idx[r], d_idx[l], d_idx[r]
        c_pairs = []
        if c1 is not None:
            c_pairs.append((c1, d2))
            if c2 is not None:
                c_pairs.append((c1, c2))
        if c2 is not None:
            c_pairs.append((d1, c2))
        fam = []
        if c_pairs:
            c_idx[t] = len(fam)
            fam.append(tuple(sorted(c_pairs)))
        d_idx[t] = len(fam)
        fam.append(((d1, d2),))
        fams[t] = tuple(fam)
    if c_idx[T.root] is None:
        return empty_tdd(T)
    return Tdd(T, tuple(fams), c_idx[T.root])


def literal_tdd(lit, T: Vtree) -> Tdd:
    return clause_tdd([lit], T)


# -- d-DNNF export --------------------------------------------------------------


def to_ddnnf(C: NTdd) -> str:
    """Smooth, decomposable NNF in the c2d text format (deterministic when ``C`` is).

    Non-integer variables are numbered by sorted order; ``c var`` comment lines
    record the mapping.
    """
    T = C.vtree
    ints = all(isinstance(v, int) for v in T.variables)
    num = {v: v for v in T.variables} if ints else {v: i + 1 for i, v in enumerate(T.variables)}
    lines: list[str] = []
    edges = 0
    ids: dict[tuple[int, int], int] = {}
    lit_ids: dict[int, int] = {}

    def emit(line: str, nchild: int) -> int:
        nonlocal edges
        lines.append(line)
        edges += nchild
        return len(lines) - 1

    def lit(l: int) -> int:
        if l not in lit_ids:
            lit_ids[l] = emit(f"L {l}", 0)
        return lit_ids[l]

    reach = reachable(C)
    for t in T.postorder:
        for g in sorted(reach[t]):
            if T.is_leaf(t):
                lab, x = C.families[t][g], num[T.var[t]]
                if lab == POS:
                    ids[t, g] = lit(x)
                elif lab == NEG:
                    ids[t, g] = lit(-x)
                elif lab == ONE:
                    a, b = lit(x), lit(-x)
                    ids[t, g] = emit(f"O {x} 2 {a} {b}", 2)
                else:
                    ids[t, g] = emit("O 0 0", 0)
            else:
                l, r = T.children(t)
                kids = []
                for a, b in C.families[t][g]:
                    kids.append(emit(f"A 2 {ids[l, a]} {ids[r, b]}", 2))
                ids[t, g] = emit(f"O 0 {len(kids)} " + " ".join(map(str, kids)), len(kids))
    header = []
    if not ints:
        header = [f"c var {num[v]} {v}" for v in T.variables]
    nvars = max(num.values())
    return "\n".join(header + [f"nnf {len(lines)} {edges} {nvars}"] + lines) + "\n"


def reachable(C: NTdd) -> list[set[int]]:
    """Nodes reachable from the output, per vtree node."""
    T = C.vtree
    reach: list[set[int]] = [set() for _ in range(len(T))]
    reach[T.root] = {C.out}
    for t in T.preorder:
        if T.is_leaf(t):
            continue
        l, r = T.children(t)
        for g in reach[t]:
            for a, b in C.families[t][g]:
                reach[l].add(a)
                reach[r].add(b)
    return reach


def read_nnf(text: str) -> tuple[list[tuple], dict[int, Var]]:
    """Parse c2d NNF; returns the node list and the variable-number map."""
    nodes: list[tuple] = []
    names: dict[int, Var] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts:
            continue
        if parts[0] == "c":
            if len(parts) == 4 and parts[1] == "var":
                names[int(parts[2])] = parse_var(parts[3])
            continue
        if parts[0] == "nnf":
            continue
        try:
            if parts[0] == "L":
                nodes.append(("L", int(parts[1])))
            elif parts[0] == "A":
                k = int(parts[1])
                nodes.append(("A", tuple(int(x) for x in parts[2:2 + k])))
            elif parts[0] == "O":
                k = int(parts[2])
                nodes.append(("O", tuple(int(x) for x in parts[3:3 + k])))
            else:
                raise ValueError
        except ValueError:
            raise TddFormatError(f"line {lineno}: malformed NNF line {raw!r}") from None
    return nodes, names


def nnf_evaluate(nodes: Sequence[tuple], tau: Mapping[int, int]) -> bool:
    val: list[bool] = []
    for kind, arg in nodes:
        if kind == "L":
            val.append(bool(tau[abs(arg)]) == (arg > 0))
        elif kind == "A":
            val.append(all(val[i] for i in arg))
        else:
            val.append(any(val[i] for i in arg))
    return val[-1]


# -- text format --------------------------------------------------------------


def write_tdd(C: NTdd) -> str:
    T = C.vtree
    lines = ["tdd inline"]
    lines += T.dumps().rstrip("\n").split("\n")
    for t in T.preorder:
        fam = C.families[t]
        lines.append(f"F {t} {len(fam)}")
        for g, e in enumerate(fam):
            if T.is_leaf(t):
                if e in (POS, NEG):
                    lines.append(f"n {g} lit {e}{T.var[t]}")
                else:
                    lines.append(f"n {g} const {e}")
            else:
                lines.append(f"n {g} pairs" + "".join(f" ({a},{b})" for a, b in e))
    lines.append(f"out {C.out}")
    return "\n".join(lines) + "\n"


def read_tdd(text: str, base_dir: str | None = None) -> NTdd:
    """Parse the text format. Returns a ``Tdd`` when the circuit is deterministic."""
    lines = text.splitlines()
    i = 0
    while i < len(lines) and (not lines[i].split() or lines[i].split()[0] in ("c", "#")):
        i += 1
    if i >= len(lines) or lines[i].split()[0] != "tdd":
        raise TddFormatError(f"line {i + 1}: expected 'tdd' header")
    head = lines[i].split()
    i += 1
    if len(head) >= 2 and head[1] != "inline":
        path = head[1] if base_dir is None else os.path.join(base_dir, head[1])
        with open(path) as fh:
            T = Vtree.loads(fh.read())
    else:
        try:
            T, i = _parse_vtree_lines(lines, i)
        except ValueError as e:
            raise TddFormatError(str(e)) from None
    fams: list[list | None] = [None] * len(T)
    cur: int | None = None
    expected = 0
    out = None
    for k in range(i, len(lines)):
        raw = lines[k]
        lineno = k + 1
        parts = raw.split()
        if not parts or parts[0] in ("c", "#"):
            continue
        try:
            if parts[0] == "F":
                if cur is not None and len(fams[cur]) != expected:
                    raise TddFormatError(f"family {cur} declares {expected} nodes, got {len(fams[cur])}")
                cur, expected = int(parts[1]), int(parts[2])
                if not 0 <= cur < len(T):
                    raise TddFormatError(f"no vtree node {cur}")
                if fams[cur] is not None:
                    raise TddFormatError(f"family {cur} given twice")
                fams[cur] = []
            elif parts[0] == "n":
                if cur is None:
                    raise TddFormatError("node outside of a family")
                g = int(parts[1])
                if g != len(fams[cur]):
                    raise TddFormatError(f"node ids must count up from 0, got {g}")
                kind = parts[2]
                if T.is_leaf(cur):
                    if kind == "lit":
                        tok = parts[3]
                        sign, name = tok[0], parse_var(tok[1:])
                        if sign not in "+-" or name != T.var[cur]:
                            raise TddFormatError(f"literal {tok!r} does not match leaf {T.var[cur]!r}")
                        fams[cur].append(sign)
                    elif kind == "const":
                        if parts[3] not in (ZERO, ONE):
                            raise TddFormatError(f"bad constant {parts[3]!r}")
                        fams[cur].append(parts[3])
                    else:
                        raise TddFormatError(f"leaf family node must be 'lit' or 'const', got {kind!r}")
                else:
                    if kind != "pairs":
                        raise TddFormatError(f"internal family node must be 'pairs', got {kind!r}")
                    pairs = []
                    for tok in parts[3:]:
                        if not (tok.startswith("(") and tok.endswith(")")):
                            raise TddFormatError(f"bad pair {tok!r}")
                        a, b = tok[1:-1].split(",")
                        pairs.append((int(a), int(b)))
                    fams[cur].append(tuple(sorted(set(pairs))))
            elif parts[0] == "out":
                out = int(parts[1])
            else:
                raise TddFormatError(f"unexpected token {parts[0]!r}")
        except TddFormatError as e:
            raise TddFormatError(f"line {lineno}: {e}") from None
        except (IndexError, ValueError):
            raise TddFormatError(f"line {lineno}: malformed line {raw!r}") from None
    if cur is not None and len(fams[cur]) != expected:
        raise TddFormatError(f"family {cur} declares {expected} nodes, got {len(fams[cur])}")
    missing = [t for t, f in enumerate(fams) if f is None]
    if missing:
        raise TddFormatError(f"missing families for vtree nodes {missing}")
    if out is None:
        raise TddFormatError("missing 'out' line")
    C = NTdd(T, tuple(tuple(f) for f in fams), out)
    try:
        check_well_formed(C)
    except TddError as e:
        raise TddFormatError(str(e)) from None
    res = validate_deterministic(C)
    return C if isinstance(res, DeterminismViolation) else res


def load_tdd(path) -> NTdd:
    with open(path) as fh:
        return read_tdd(fh.read(), os.path.dirname(os.path.abspath(path)))


def save_tdd(C: NTdd, path) -> None:
    with open(path, "w") as fh:
        fh.write(write_tdd(C))
