"""Exact learning of deterministic circuits from membership and equivalence queries.

For every vtree node ``t`` the learner keeps a set of assignments to ``X_t``
(candidate nodes) and, for non-root ``t``, a set of assignments to the other
variables (tests). Two candidates are equivalent at ``t`` when no test tells
them apart. Once the tables are closed and consistent, the equivalence classes
form a full deterministic circuit, which is submitted as the hypothesis.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Protocol

from .minimize import canonize
from .oracle import BoolFunTable
from .tdd import NEG, ONE, POS, ZERO, Tdd, TddError, any_model, build, evaluate, to_table
from .transform import apply
from .vtree import Var, Vtree

Assignment = frozenset  # of (variable, bit) items


class TeacherError(RuntimeError):
    """The teacher contradicted itself."""


class Teacher(Protocol):
    def membership(self, tau: Mapping[Var, int]) -> bool: ...

    def equivalence(self, H: Tdd) -> dict | None: ...


class TableTeacher:
    def __init__(self, f: BoolFunTable):
        self.f = f

    def membership(self, tau):
        return self.f(tau)

    def equivalence(self, H):
        diff = to_table(H).extend(self.f.variables) ^ self.f
        return next(diff.models(), None)


class TddTeacher:
    def __init__(self, C: Tdd):
        self.C = C
        self._canon = canonize(C)

    def membership(self, tau):
        return evaluate(self.C, tau)

    def equivalence(self, H):
        if H.vtree != self.C.vtree:
            raise TddError("hypothesis and target respect different vtrees")
        if canonize(H) == self._canon:
            return None
        return any_model(apply("xor", H, self.C))


def truth_table_teacher(f: BoolFunTable) -> TableTeacher:
    return TableTeacher(f)


def tdd_teacher(C: Tdd) -> TddTeacher:
    return TddTeacher(C)


@dataclass
class LearnResult:
    tdd: Tdd
    membership_queries: int
    equivalence_queries: int
    rounds: int


class Learner:
    def __init__(self, T: Vtree, teacher: Teacher, max_rounds: int = 10_000):
        self.T = T
        self.teacher = teacher
        self.max_rounds = max_rounds
        self.membership_queries = 0
        self.equivalence_queries = 0
        self._cache: dict[Assignment, bool] = {}
        nodes: list[list[Assignment]] = [[] for _ in range(len(T))]
        tests: list[list[Assignment]] = [[] for _ in range(len(T))]
        for t in T.leaves:
            x = T.var[t]
            nodes[t] = [frozenset({(x, 0)}), frozenset({(x, 1)})]
        # the root starts with the empty placeholder, which is never a class
        nodes[T.root].append(frozenset())
        tests[T.root] = [frozenset()]
        self.nodes = nodes
        self.tests = tests

    # -- queries ---------------------------------------------------------

    def member(self, tau: Assignment) -> bool:
        if tau not in self._cache:
            self.membership_queries += 1
            self._cache[tau] = bool(self.teacher.membership(dict(tau)))
        return self._cache[tau]

    def row(self, t: int, tau: Assignment) -> tuple[bool, ...]:
        return tuple(self.member(tau | k) for k in self.tests[t])

    def _total(self, t: int, tau: Assignment) -> bool:
        return len(tau) == len(self.T.vars_of(t))

    # -- closure and consistency ------------------------------------------

    def close(self) -> bool:
        """Add missing candidates bottom-up; return whether anything changed."""
        T = self.T
        changed = False
        for t in T.postorder:
            if T.is_leaf(t):
                continue
            l, r = T.children(t)
            rows = {self.row(t, tau) for tau in self.nodes[t] if self._total(t, tau)}
            for tl in self.nodes[l]:
                for tr in self.nodes[r]:
                    tau = tl | tr
                    rw = self.row(t, tau)
                    if rw not in rows:
                        rows.add(rw)
                        self.nodes[t].append(tau)
                        changed = True
        return changed

    def find_inconsistency(self) -> tuple[int, Assignment] | None:
        """A child node and a new test that splits two of its equivalent candidates."""
        T = self.T
        for t in T.postorder:
            if T.is_leaf(t):
                continue
            l, r = T.children(t)
            for child, other in ((l, r), (r, l)):
                by_row: dict[tuple, Assignment] = {}
                for tau in self.nodes[child]:
                    rw = self.row(child, tau)
                    if rw not in by_row:
                        by_row[rw] = tau
                        continue
                    rep = by_row[rw]
                    for to in self.nodes[other]:
                        for k in self.tests[t]:
                            if self.member(rep | to | k) != self.member(tau | to | k):
                                return child, to | k
        return None

    def stabilize(self) -> None:
        while True:
            self.close()
            bad = self.find_inconsistency()
            if bad is None:
                return
            child, test = bad
            self.tests[child].append(test)

    # -- hypothesis -------------------------------------------------------

    def hypothesis(self) -> Tdd:
        T = self.T
        if T.is_leaf(T.root):
            x = T.var[T.root]
            v0, v1 = self.member(frozenset({(x, 0)})), self.member(frozenset({(x, 1)}))
            lab = ONE if v0 and v1 else POS if v1 else NEG if v0 else ZERO
            return build(Tdd, T, [[lab]], 0)
        cls_of: list[dict[tuple, int]] = [{} for _ in range(len(T))]
        reps: list[list[Assignment]] = [[] for _ in range(len(T))]
        for t in range(len(T)):
            for tau in self.nodes[t]:
                if not self._total(t, tau):
                    continue
                rw = self.row(t, tau)
                if rw not in cls_of[t]:
                    cls_of[t][rw] = len(reps[t])
                    reps[t].append(tau)
        fams: list[list] = [[] for _ in range(len(T))]
        for t in T.postorder:
            if T.is_leaf(t):
                x = T.var[t]
                vals = [dict(tau)[x] for tau in reps[t]]
                fams[t] = [ONE] if len(vals) == 1 else [NEG if v == 0 else POS for v in vals]
                continue
            l, r = T.children(t)
            fams[t] = [[] for _ in reps[t]]
            for i, tl in enumerate(reps[l]):
                for j, tr in enumerate(reps[r]):
                    k = cls_of[t].get(self.row(t, tl | tr))
                    if k is None:
                        raise AssertionError("hypothesis built from a table that is not closed")
                    fams[t][k].append((i, j))
        out = cls_of[T.root].get((True,))
        if out is None:
            fams[T.root].append([])
            out = len(fams[T.root]) - 1
        return build(Tdd, T, fams, out)

    def add_counterexample(self, tau: Mapping[Var, int]) -> None:
        T = self.T
        for t in T.internal_nodes:
            part = frozenset((x, int(tau[x])) for x in T.vars_of(t))
            if part not in self.nodes[t]:
                self.nodes[t].append(part)

    def run(self) -> LearnResult:
        rounds = 0
        while True:
            rounds += 1
            if rounds > self.max_rounds:
                raise RuntimeError("learner did not converge")
            self.stabilize()
            H = self.hypothesis()
            self.equivalence_queries += 1
            cex = self.teacher.equivalence(H)
            if cex is None:
                return LearnResult(canonize(H), self.membership_queries, self.equivalence_queries, rounds)
            tau = {x: int(cex[x]) for x in self.T.variables}
            if evaluate(H, tau) == self.member(frozenset(tau.items())):
                raise TeacherError(f"counterexample {tau} agrees with the hypothesis")
            self.add_counterexample(tau)


def learn(T: Vtree, teacher: Teacher, max_rounds: int = 10_000) -> LearnResult:
    return Learner(T, teacher, max_rounds).run()
