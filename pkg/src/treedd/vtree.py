"""Vtrees: full binary trees whose leaves are in bijection with a set of variables.

Node ids are assigned in preorder, so two vtrees with the same shape and
leaf labels have identical arrays and compare equal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Hashable, Iterable, Sequence

Var = Hashable


class VtreeError(ValueError):
    pass


def var_key(v: Var):
    """Sort key that orders ints before strings and is total on both."""
    if isinstance(v, bool):
        raise VtreeError(f"booleans are not valid variable names: {v!r}")
    if isinstance(v, int):
        return (0, v, "")
    return (1, 0, str(v))


def sort_vars(vs: Iterable[Var]) -> tuple:
    return tuple(sorted(vs, key=var_key))


def parse_var(token: str) -> Var:
    try:
        return int(token)
    except ValueError:
        return token


@dataclass(frozen=True, eq=False)
class Vtree:
    left: tuple[int, ...]
    right: tuple[int, ...]
    var: tuple
    root: int = 0

    # -- construction ---------------------------------------------------

    @classmethod
    def from_nested(cls, nested) -> "Vtree":
        """Build from a nested form: a variable is a leaf, a pair ``(l, r)`` an internal node."""
        left: list[int] = []
        right: list[int] = []
        var: list = []
        seen: set = set()
        stack = [(nested, -1, 0)]
        while stack:
            item, parent, side = stack.pop()
            i = len(left)
            if parent >= 0:
                (left if side == 0 else right)[parent] = i
            if isinstance(item, tuple):
                if len(item) != 2:
                    raise VtreeError(f"internal vtree node must have two children, got {item!r}")
                left.append(-1)
                right.append(-1)
                var.append(None)
                stack.append((item[1], i, 1))
                stack.append((item[0], i, 0))
            else:
                if item is None:
                    raise VtreeError("None is not a valid variable")
                var_key(item)
                if item in seen:
                    raise VtreeError(f"variable {item!r} labels more than one leaf")
                seen.add(item)
                left.append(-1)
                right.append(-1)
                var.append(item)
        return cls(tuple(left), tuple(right), tuple(var), 0)

    def to_nested(self, t: int | None = None):
        t = self.root if t is None else t
        # iterative to survive deep linear vtrees
        out: dict[int, object] = {}
        for i in self.postorder_from(t):
            out[i] = self.var[i] if self.is_leaf(i) else (out[self.left[i]], out[self.right[i]])
        return out[t]

    # -- basic structure -------------------------------------------------

    def __len__(self) -> int:
        return len(self.left)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Vtree):
            return NotImplemented
        return self.left == other.left and self.right == other.right and self.var == other.var

    def __hash__(self) -> int:
        return hash((self.left, self.right, self.var))

    def __repr__(self) -> str:
        return f"Vtree({self.to_nested()!r})"

    def is_leaf(self, t: int) -> bool:
        return self.left[t] < 0

    def children(self, t: int) -> tuple[int, int]:
        return self.left[t], self.right[t]

    @cached_property
    def parent(self) -> tuple[int, ...]:
        p = [-1] * len(self)
        for t in range(len(self)):
            if not self.is_leaf(t):
                p[self.left[t]] = t
                p[self.right[t]] = t
        return tuple(p)

    def sibling(self, t: int) -> int:
        p = self.parent[t]
        if p < 0:
            raise VtreeError("the root has no sibling")
        return self.right[p] if self.left[p] == t else self.left[p]

    @cached_property
    def preorder(self) -> tuple[int, ...]:
        return tuple(range(len(self)))

    def postorder_from(self, t: int) -> list[int]:
        order: list[int] = []
        stack = [t]
        while stack:
            i = stack.pop()
            order.append(i)
            if not self.is_leaf(i):
                stack.append(self.left[i])
                stack.append(self.right[i])
        order.reverse()
        return order

    @cached_property
    def postorder(self) -> tuple[int, ...]:
        return tuple(self.postorder_from(self.root))

    @cached_property
    def leaves(self) -> tuple[int, ...]:
        return tuple(t for t in range(len(self)) if self.is_leaf(t))

    @cached_property
    def internal_nodes(self) -> tuple[int, ...]:
        return tuple(t for t in range(len(self)) if not self.is_leaf(t))

    @cached_property
    def variables(self) -> tuple:
        return sort_vars(self.var[t] for t in self.leaves)

    @cached_property
    def leaf_of(self) -> dict:
        return {self.var[t]: t for t in self.leaves}

    @cached_property
    def vars_below(self) -> tuple[frozenset, ...]:
        vs: list = [None] * len(self)
        for t in self.postorder:
            if self.is_leaf(t):
                vs[t] = frozenset([self.var[t]])
            else:
                vs[t] = vs[self.left[t]] | vs[self.right[t]]
        return tuple(vs)

    def vars_of(self, t: int) -> frozenset:
        return self.vars_below[t]

    @cached_property
    def depth(self) -> tuple[int, ...]:
        d = [0] * len(self)
        for t in self.preorder:
            if t != self.root:
                d[t] = d[self.parent[t]] + 1
        return tuple(d)

    def is_linear(self) -> bool:
        return all(self.is_leaf(self.left[t]) or self.is_leaf(self.right[t]) for t in self.internal_nodes)

    def linear_order(self) -> tuple:
        """Variable order of a linear vtree: the root's leaf child first.

        At the bottom node, where both children are leaves, the left leaf comes first.
        """
        if not self.is_linear():
            raise VtreeError("vtree is not linear")
        order = []
        t = self.root
        while not self.is_leaf(t):
            l, r = self.children(t)
            if self.is_leaf(l):
                order.append(self.var[l])
                t = r
            else:
                order.append(self.var[r])
                t = l
        order.append(self.var[t])
        return tuple(order)

    # -- text format -----------------------------------------------------

    def dumps(self) -> str:
        lines = [f"vtree {len(self)}"]
        for t in self.postorder:
            if self.is_leaf(t):
                lines.append(f"L {t} {self.var[t]}")
            else:
                lines.append(f"I {t} {self.left[t]} {self.right[t]}")
        lines.append(f"root {self.root}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "Vtree":
        return _parse_vtree_lines(text.splitlines(), 0)[0]


def _parse_vtree_lines(lines: Sequence[str], start: int) -> tuple[Vtree, int]:
    """Parse a vtree block starting at ``lines[start]``; return it and the index after ``root``."""
    leaves: dict[int, Var] = {}
    internal: dict[int, tuple[int, int]] = {}
    declared = None
    i = start
    while i < len(lines):
        raw = lines[i]
        lineno = i + 1
        i += 1
        parts = raw.split()
        if not parts or parts[0] in ("c", "#"):
            continue
        head = parts[0]
        try:
            if head == "vtree":
                declared = int(parts[1])
            elif head == "L":
                nid, v = int(parts[1]), parse_var(parts[2])
                if nid in leaves or nid in internal:
                    raise VtreeError(f"line {lineno}: duplicate node id {nid}")
                leaves[nid] = v
            elif head == "I":
                nid, l, r = int(parts[1]), int(parts[2]), int(parts[3])
                if nid in leaves or nid in internal:
                    raise VtreeError(f"line {lineno}: duplicate node id {nid}")
                internal[nid] = (l, r)
            elif head == "root":
                root = int(parts[1])
                break
            else:
                raise VtreeError(f"line {lineno}: unexpected token {head!r} in vtree block")
        except (IndexError, ValueError) as e:
            if isinstance(e, VtreeError):
                raise
            raise VtreeError(f"line {lineno}: malformed vtree line {raw!r}") from None
    else:
        raise VtreeError("vtree block has no root line")
    count = len(leaves) + len(internal)
    if declared is not None and declared != count:
        raise VtreeError(f"vtree declares {declared} nodes but defines {count}")

    used: set[int] = set()

    def build(nid):
        # iterative post-order build of the nested form
        result: dict[int, object] = {}
        stack = [(nid, False)]
        while stack:
            n, done = stack.pop()
            if n in leaves:
                if n in used:
                    raise VtreeError(f"node {n} has more than one parent")
                used.add(n)
                result[n] = leaves[n]
            elif n in internal:
                l, r = internal[n]
                if done:
                    result[n] = (result[l], result[r])
                else:
                    if n in used:
                        raise VtreeError(f"node {n} has more than one parent")
                    used.add(n)
                    stack.append((n, True))
                    stack.append((r, False))
                    stack.append((l, False))
            else:
                raise VtreeError(f"reference to undefined vtree node {n}")
        return result[nid]

    nested = build(root)
    if len(used) != count:
        raise VtreeError("vtree has nodes unreachable from the root")
    return Vtree.from_nested(nested), i


def load_vtree(path) -> Vtree:
    with open(path) as fh:
        return Vtree.loads(fh.read())


# -- standard shapes ------------------------------------------------------


def _check_order(order: Sequence[Var]) -> tuple:
    order = tuple(order)
    if not order:
        raise VtreeError("a vtree needs at least one variable")
    if len(set(order)) != len(order):
        raise VtreeError("variable order contains duplicates")
    return order


def linear_vtree(order: Sequence[Var]) -> Vtree:
    """Right-linear vtree: root has leaf ``order[0]`` on the left and the rest on the right."""
    order = _check_order(order)
    nested = order[-1]
    for v in reversed(order[:-1]):
        nested = (v, nested)
    return Vtree.from_nested(nested)


def balanced_vtree(order: Sequence[Var]) -> Vtree:
    order = _check_order(order)

    def build(vs):
        if len(vs) == 1:
            return vs[0]
        mid = math.ceil(len(vs) / 2)
        return (build(vs[:mid]), build(vs[mid:]))

    return Vtree.from_nested(build(order))


def remove_leaf_with_map(T: Vtree, x: Var) -> tuple[Vtree, dict[int, int]]:
    """Delete leaf ``x`` and contract its parent.

    Returns the new vtree and a map from surviving old node ids to new ids.
    The parent of ``x`` and ``x`` itself do not survive; the sibling keeps its
    identity and takes the parent's place.
    """
    if x not in T.leaf_of:
        raise VtreeError(f"variable {x!r} is not a leaf of the vtree")
    if len(T) == 1:
        raise VtreeError("cannot remove the only leaf of a vtree")
    leaf = T.leaf_of[x]
    contracted = T.parent[leaf]
    left: list[int] = []
    right: list[int] = []
    var: list = []
    mapping: dict[int, int] = {}
    stack = [(T.root, -1, 0)]
    while stack:
        old, parent, side = stack.pop()
        if old == contracted:
            old = T.sibling(leaf)
        i = len(left)
        mapping[old] = i
        if parent >= 0:
            (left if side == 0 else right)[parent] = i
        left.append(-1)
        right.append(-1)
        var.append(T.var[old])
        if not T.is_leaf(old):
            stack.append((T.right[old], i, 1))
            stack.append((T.left[old], i, 0))
    return Vtree(tuple(left), tuple(right), tuple(var), 0), mapping


def remove_leaf(T: Vtree, x: Var) -> Vtree:
    return remove_leaf_with_map(T, x)[0]
