"""Transformations: zero elimination, conditioning, negation, products,
forgetting and determinization."""

from __future__ import annotations

from typing import Callable, Iterable, Mapping

from .tdd import (
    NEG,
    ONE,
    POS,
    ZERO,
    NTdd,
    Tdd,
    TddError,
    build,
    empty_tdd,
    label_and,
    label_or,
)
from .vtree import Var, Vtree, remove_leaf_with_map


def _same_kind(C: NTdd):
    return Tdd if isinstance(C, Tdd) else NTdd


def eliminate_zeros(C: NTdd) -> NTdd:
    """Drop 0-labelled leaves and, bottom-up, every node left without inputs.

    What remains has no node without models. An unsatisfiable circuit comes
    back as the empty-function marker.
    """
    T = C.vtree
    fams: list[list] = [[] for _ in range(len(T))]
    remap: list[dict[int, int]] = [{} for _ in range(len(T))]
    for t in T.postorder:
        fam = C.families[t]
        if T.is_leaf(t):
            for g, lab in enumerate(fam):
                if lab != ZERO:
                    remap[t][g] = len(fams[t])
                    fams[t].append(lab)
        else:
            ml, mr = remap[T.left[t]], remap[T.right[t]]
            for g, e in enumerate(fam):
                kept = [(ml[a], mr[b]) for a, b in e if a in ml and b in mr]
                if kept:
                    remap[t][g] = len(fams[t])
                    fams[t].append(kept)
    if C.out not in remap[T.root]:
        return empty_tdd(T)
    return build(_same_kind(C), T, fams, remap[T.root][C.out])


def relabel_leaf(C: NTdd, x: Var, mapping: Mapping[str, str]) -> NTdd:
    T = C.vtree
    leaf = T.leaf_of[x]
    fams = list(C.families)
    fams[leaf] = tuple(mapping.get(l, l) for l in fams[leaf])
    return type(C)(T, tuple(fams), C.out)


def remove_unused_variable(C: NTdd, x: Var) -> NTdd:
    """Remove a variable whose leaf family holds only constants.

    The leaf's parent ``t`` disappears and its sibling ``u`` takes its place.
    For every ``t``-node ``h``, a new ``u``-node computes the union of the
    ``u``-nodes that ``h`` pairs with a 1-labelled leaf node. The new node keeps
    ``h``'s index, so the families above are untouched.
    """
    T = C.vtree
    if x not in T.leaf_of:
        raise TddError(f"{x!r} is not a variable of the circuit")
    leaf = T.leaf_of[x]
    labels = C.families[leaf]
    if any(l in (POS, NEG) for l in labels):
        raise TddError(f"variable {x!r} still occurs as a literal")
    if len(T) == 1:
        raise TddError("cannot remove the only variable; evaluate the constant instead")
    t = T.parent[leaf]
    u = T.sibling(leaf)
    leaf_is_left = T.left[t] == leaf
    ones = {g for g, l in enumerate(labels) if l == ONE}
    new_u = []
    for e in C.families[t]:
        U = sorted({(b if leaf_is_left else a) for a, b in e if (a if leaf_is_left else b) in ones})
        if T.is_leaf(u):
            new_u.append(label_or(C.families[u][v] for v in U))
        else:
            merged = set()
            for v in U:
                merged.update(C.families[u][v])
            new_u.append(tuple(sorted(merged)))
    T2, mapping = remove_leaf_with_map(T, x)
    fams: list = [None] * len(T2)
    for old, new in mapping.items():
        fams[new] = C.families[old]
    fams[mapping[u]] = tuple(new_u)
    return type(C)(T2, tuple(fams), C.out)


def condition(C: NTdd, x: Var, value: int) -> NTdd:
    """Fix ``x`` to ``value``; the result lives on the vtree without ``x``."""
    if value not in (0, 1):
        raise TddError("value must be 0 or 1")
    if x not in C.vtree.leaf_of:
        raise TddError(f"{x!r} is not a variable of the circuit")
    mapping = {POS: ONE, NEG: ZERO} if value else {POS: ZERO, NEG: ONE}
    return eliminate_zeros(remove_unused_variable(relabel_leaf(C, x, mapping), x))


def make_full(C: Tdd) -> Tdd:
    """Add nodes so that every family partitions all assignments to its variables."""
    T = C.vtree
    fams: list[list] = [list(f) for f in C.families]
    for t in T.postorder:
        if T.is_leaf(t):
            labs = fams[t]
            if not set(labs) & {ONE, POS, NEG}:
                labs.append(ONE)
            elif ONE not in labs:
                for lab in (POS, NEG):
                    if lab not in labs:
                        labs.append(lab)
        else:
            l, r = T.children(t)
            covered = set()
            for e in fams[t]:
                covered.update(e)
            missing = [(a, b) for a in range(len(fams[l])) for b in range(len(fams[r])) if (a, b) not in covered]
            if missing:
                fams[t].append(missing)
    return build(Tdd, T, fams, C.out)


def negate(C: Tdd) -> Tdd:
    """Complement: make full, then merge all non-output root nodes into the new output."""
    F = make_full(C)
    T = F.vtree
    root = F.families[T.root]
    others = [g for g in range(len(root)) if g != F.out]
    if T.is_leaf(T.root):
        merged = label_or(root[g] for g in others)
    else:
        merged = tuple(sorted({p for g in others for p in root[g]}))
    fams = list(F.families)
    fams[T.root] = (root[F.out], merged)
    return Tdd(T, tuple(fams), 1)


def _check_vtrees(C1: NTdd, C2: NTdd) -> Vtree:
    if C1.vtree != C2.vtree:
        raise TddError("circuits respect different vtrees")
    return C1.vtree


def _product(C1: NTdd, C2: NTdd, roots: list[tuple[int, int]]):
    """Product circuit over the pairs reachable from ``roots``.

    Returns families and, per vtree node, the map from node pairs to indices.
    """
    T = _check_vtrees(C1, C2)
    need: list[dict[tuple[int, int], int]] = [{} for _ in range(len(T))]
    for p in roots:
        need[T.root].setdefault(p, len(need[T.root]))
    for t in T.preorder:
        if T.is_leaf(t):
            continue
        l, r = T.children(t)
        f1, f2 = C1.families[t], C2.families[t]
        for g1, g2 in need[t]:
            for a1, a2 in f1[g1]:
                for b1, b2 in f2[g2]:
                    need[l].setdefault((a1, b1), len(need[l]))
                    need[r].setdefault((a2, b2), len(need[r]))
    fams: list[list] = [[] for _ in range(len(T))]
    for t in T.preorder:
        if T.is_leaf(t):
            fams[t] = [label_and(C1.families[t][g1], C2.families[t][g2]) for g1, g2 in need[t]]
        else:
            l, r = T.children(t)
            nl, nr = need[l], need[r]
            f1, f2 = C1.families[t], C2.families[t]
            fams[t] = [
                [(nl[a1, b1], nr[a2, b2]) for a1, a2 in f1[g1] for b1, b2 in f2[g2]]
                for g1, g2 in need[t]
            ]
    return T, fams, need


def conjoin(C1: NTdd, C2: NTdd) -> NTdd:
    """Conjunction by a product construction, built only from the output pair down."""
    T, fams, need = _product(C1, C2, [(C1.out, C2.out)])
    cls = Tdd if isinstance(C1, Tdd) and isinstance(C2, Tdd) else NTdd
    return build(cls, T, fams, 0)


# bit (2*a + b) of the code is op(a, b)
OPS: dict[str, int] = {
    "false": 0b0000,
    "and": 0b1000,
    "and_not": 0b0100,
    "left": 0b1100,
    "not_and": 0b0010,
    "right": 0b1010,
    "xor": 0b0110,
    "or": 0b1110,
    "nor": 0b0001,
    "iff": 0b1001,
    "not_right": 0b0101,
    "implied_by": 0b1101,
    "not_left": 0b0011,
    "implies": 0b1011,
    "nand": 0b0111,
    "true": 0b1111,
}
OPS["xnor"] = OPS["iff"]


def op_code(op) -> int:
    if isinstance(op, str):
        if op not in OPS:
            raise TddError(f"unknown operator {op!r}; known: {sorted(OPS)}")
        return OPS[op]
    if callable(op):
        return sum(1 << (2 * a + b) for a in (0, 1) for b in (0, 1) if op(bool(a), bool(b)))
    if isinstance(op, int) and 0 <= op < 16:
        return op
    raise TddError(f"bad operator {op!r}")


def op_value(code: int, a: bool, b: bool) -> bool:
    return bool(code >> (2 * int(a) + int(b)) & 1)


def apply(op, C1: Tdd, C2: Tdd) -> Tdd:
    """Any binary Boolean operation, via the product of the two full circuits.

    The root products are merged into two nodes according to ``op``; the result
    is full and deterministic.
    """
    code = op_code(op)
    F1, F2 = make_full(C1), make_full(C2)
    T = _check_vtrees(F1, F2)
    r1, r2 = len(F1.families[T.root]), len(F2.families[T.root])
    roots = [(g1, g2) for g1 in range(r1) for g2 in range(r2)]
    _, fams, need = _product(F1, F2, roots)
    root_nodes = fams[T.root]
    yes = [i for (g1, g2), i in need[T.root].items() if op_value(code, g1 == F1.out, g2 == F2.out)]
    no = [i for (g1, g2), i in need[T.root].items() if not op_value(code, g1 == F1.out, g2 == F2.out)]
    if T.is_leaf(T.root):
        fams[T.root] = [label_or(root_nodes[i] for i in yes), label_or(root_nodes[i] for i in no)]
    else:
        fams[T.root] = [[p for i in yes for p in root_nodes[i]], [p for i in no for p in root_nodes[i]]]
    return build(Tdd, T, fams, 0)


def disjoin_via_negation(C1: Tdd, C2: Tdd) -> Tdd:
    from .minimize import canonize

    return negate(canonize(conjoin(canonize(negate(C1)), canonize(negate(C2)))))


def forget(C: NTdd, Y: Iterable[Var]) -> NTdd:
    """Existential quantification: relabel literals over ``Y`` to 1, then remove
    those variables. The result is in general not deterministic."""
    Y = list(dict.fromkeys(Y))
    T = C.vtree
    for y in Y:
        if y not in T.leaf_of:
            raise TddError(f"{y!r} is not a variable of the circuit")
    if Y and len(set(Y)) == len(T.leaf_of):
        raise TddError("cannot forget every variable; the result is a constant")
    D = NTdd(C.vtree, C.families, C.out)
    for y in Y:
        D = relabel_leaf(D, y, {POS: ONE, NEG: ONE})
        D = remove_unused_variable(D, y)
    return eliminate_zeros(D)


def forget_single(C: Tdd, x: Var) -> Tdd:
    """Deterministic forgetting of one variable as a disjunction of its two conditionings."""
    return apply("or", condition(C, x, 0), condition(C, x, 1))


def determinize(C: NTdd) -> Tdd:
    """Subset construction over realizable shapes.

    The shape of an assignment ``tau`` to ``X_t`` is the set of ``t``-nodes it
    satisfies. Each realizable shape becomes one node, so the result is full,
    deterministic, and at most ``2**width`` wide.
    """
    T = C.vtree
    shapes: list[list[int]] = [[] for _ in range(len(T))]  # bitmasks over old nodes
    fams: list[list] = [[] for _ in range(len(T))]
    for t in T.postorder:
        fam = C.families[t]
        if T.is_leaf(t):
            s0 = sum(1 << g for g, l in enumerate(fam) if l in (ONE, NEG))
            s1 = sum(1 << g for g, l in enumerate(fam) if l in (ONE, POS))
            if s0 == s1:
                shapes[t], fams[t] = [s0], [ONE]
            else:
                shapes[t], fams[t] = [s0, s1], [NEG, POS]
            continue
        l, r = T.children(t)
        left_of: dict[int, list[int]] = {}
        right_of: dict[int, list[int]] = {}
        for i, s in enumerate(shapes[l]):
            for g in _bits(s):
                left_of.setdefault(g, []).append(i)
        for j, s in enumerate(shapes[r]):
            for g in _bits(s):
                right_of.setdefault(g, []).append(j)
        acc: dict[tuple[int, int], int] = {}
        for g, e in enumerate(fam):
            bit = 1 << g
            for a, b in e:
                for i in left_of.get(a, ()):
                    for j in right_of.get(b, ()):
                        acc[i, j] = acc.get((i, j), 0) | bit
        index: dict[int, int] = {}
        pairs: list[list] = []
        for i in range(len(shapes[l])):
            for j in range(len(shapes[r])):
                s = acc.get((i, j), 0)
                if s not in index:
                    index[s] = len(pairs)
                    pairs.append([])
                pairs[index[s]].append((i, j))
        shapes[t] = list(index)
        fams[t] = pairs
    root = T.root
    out_bit = 1 << C.out
    yes = [k for k, s in enumerate(shapes[root]) if s & out_bit]
    no = [k for k, s in enumerate(shapes[root]) if not s & out_bit]
    rf = fams[root]
    if T.is_leaf(root):
        fams[root] = [label_or(rf[k] for k in yes), label_or(rf[k] for k in no)]
    else:
        fams[root] = [[p for k in yes for p in rf[k]], [p for k in no for p in rf[k]]]
    return build(Tdd, T, fams, 0)


def _bits(mask: int):
    g = 0
    while mask:
        if mask & 1:
            yield g
        mask >>= 1
        g += 1


def union_of_models(models: Iterable[Mapping[Var, int]], T: Vtree) -> NTdd:
    """Disjunction of single-model circuits, one node per model in every family."""
    models = list(models)
    if not models:
        return empty_tdd(T)
    fams: list = []
    for t in range(len(T)):
        if T.is_leaf(t):
            x = T.var[t]
            fams.append(tuple(POS if m[x] else NEG for m in models))
        elif t == T.root:
            fams.append((tuple((k, k) for k in range(len(models))),))
        else:
            fams.append(tuple(((k, k),) for k in range(len(models))))
    if T.is_leaf(T.root):
        fams[T.root] = (label_or(fams[T.root]),)
    return NTdd(T, tuple(fams), 0)
