"""Twin contraction and canonical forms.

Two nodes in the same family are twins when they occur in their parent family
with exactly the same partners. Merging twins keeps the function and the
determinism; once no twins remain (after dropping dead and unreachable
nodes), a family of ``t`` has one node per nontrivial subfunction over ``X_t``.
"""

from __future__ import annotations

from .tdd import (
    _LABEL_RANK,
    NTdd,
    Tdd,
    TddError,
    as_tdd,
    build,
    is_empty_marker,
    label_or,
)
from .transform import eliminate_zeros
from .vtree import Vtree


def _signatures(T: Vtree, fams: list, t: int) -> list[frozenset]:
    p = T.parent[t]
    is_left = T.left[p] == t
    sig: list[set] = [set() for _ in fams[t]]
    for h, e in enumerate(fams[p]):
        for a, b in e:
            if is_left:
                sig[a].add((h, b))
            else:
                sig[b].add((h, a))
    return [frozenset(s) for s in sig]


def _twin_groups(T: Vtree, fams: list, t: int) -> list[list[int]]:
    groups: dict[frozenset, list[int]] = {}
    for g, s in enumerate(_signatures(T, fams, t)):
        groups.setdefault(s, []).append(g)
    return [g for g in groups.values() if len(g) > 1]


def find_twins(C: NTdd, t: int) -> list[list[int]]:
    """Groups of mutually twin nodes in the family of ``t`` (``t`` not the root)."""
    if t == C.vtree.root:
        raise TddError("root nodes have no twins")
    return _twin_groups(C.vtree, [list(f) for f in C.families], t)


def _contract(T: Vtree, fams: list, t: int, groups: list[list[int]]) -> None:
    """Merge each group into one node, in place."""
    rep = list(range(len(fams[t])))
    for grp in groups:
        for g in grp:
            rep[g] = grp[0]
    keep = [g for g in range(len(fams[t])) if rep[g] == g]
    new_index = {g: i for i, g in enumerate(keep)}
    idx = [new_index[rep[g]] for g in range(len(fams[t]))]
    merged: list = []
    for g in keep:
        members = [h for h in range(len(fams[t])) if rep[h] == g]
        if T.is_leaf(t):
            merged.append(label_or(fams[t][h] for h in members))
        else:
            merged.append(sorted({pr for h in members for pr in fams[t][h]}))
    fams[t] = merged
    p = T.parent[t]
    is_left = T.left[p] == t
    if is_left:
        fams[p] = [sorted({(idx[a], b) for a, b in e}) for e in fams[p]]
    else:
        fams[p] = [sorted({(a, idx[b]) for a, b in e}) for e in fams[p]]


def contract_twins(C: NTdd, t: int, g1: int, g2: int) -> NTdd:
    """Merge twin nodes ``g1`` and ``g2`` of the family of ``t``."""
    T = C.vtree
    if t == T.root:
        raise TddError("root nodes have no twins")
    fams = [list(f) for f in C.families]
    sig = _signatures(T, fams, t)
    if g1 == g2 or sig[g1] != sig[g2]:
        raise TddError(f"nodes {g1} and {g2} of vtree node {t} are not twins")
    _contract(T, fams, t, [sorted((g1, g2))])
    return build(type(C), T, fams, C.out)


def _prune(C: NTdd) -> tuple[list, int]:
    """Keep only the output at the root and nodes reachable from it."""
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
    idx = [{g: i for i, g in enumerate(sorted(reach[t]))} for t in range(len(T))]
    fams: list = []
    for t in range(len(T)):
        fam = C.families[t]
        if T.is_leaf(t):
            fams.append([fam[g] for g in sorted(reach[t])])
        else:
            l, r = T.children(t)
            fams.append([[(idx[l][a], idx[r][b]) for a, b in fam[g]] for g in sorted(reach[t])])
    return fams, 0


def canonical_order(C: NTdd) -> NTdd:
    """Renumber nodes: leaves by label, internal nodes by their sorted pair lists."""
    T = C.vtree
    perm: list[dict[int, int]] = [{} for _ in range(len(T))]
    fams: list = [None] * len(T)
    for t in T.postorder:
        fam = C.families[t]
        if T.is_leaf(t):
            order = sorted(range(len(fam)), key=lambda g: _LABEL_RANK[fam[g]])
            fams[t] = tuple(fam[g] for g in order)
        else:
            pl, pr = perm[T.left[t]], perm[T.right[t]]
            mapped = [tuple(sorted((pl[a], pr[b]) for a, b in e)) for e in fam]
            order = sorted(range(len(fam)), key=lambda g: mapped[g])
            fams[t] = tuple(mapped[g] for g in order)
        perm[t] = {g: i for i, g in enumerate(order)}
    return type(C)(T, tuple(fams), perm[T.root][C.out])


def canonize(C: NTdd) -> Tdd:
    """The unique minimal deterministic circuit for ``f_C`` on ``C``'s vtree.

    Requires ``C`` deterministic. The pipeline is zero elimination, keeping only
    the output at the root, pruning unreachable nodes, contracting twins until
    none are left, and a canonical renumbering.
    """
    C = as_tdd(C)
    D = eliminate_zeros(C)
    if is_empty_marker(D):
        return D
    T = D.vtree
    fams, out = _prune(D)
    # top-down sweeps reach the fixpoint in fewer rounds; the fixpoint is unique
    changed = True
    while changed:
        changed = False
        for t in T.preorder:
            if t == T.root:
                continue
            groups = _twin_groups(T, fams, t)
            if groups:
                _contract(T, fams, t, groups)
                changed = True
    return canonical_order(build(Tdd, T, fams, out))


def is_canonical(C: NTdd) -> bool:
    return isinstance(C, Tdd) and canonize(C) == C


def equivalent(C1: NTdd, C2: NTdd) -> bool:
    """Whether two deterministic circuits over the same vtree compute the same function."""
    if C1.vtree != C2.vtree:
        raise TddError("circuits respect different vtrees")
    return canonize(C1) == canonize(C2)
