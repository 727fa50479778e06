import random

import pytest
from hypothesis import given, settings, strategies as st

from helpers import random_table, random_vtree, vtree_and_table
from treedd.bench import table_to_tdd
from treedd.learn import Learner, TeacherError, learn, tdd_teacher, truth_table_teacher
from treedd.oracle import BoolFunTable
from treedd.tdd import TddError, write_tdd
from treedd.vtree import Vtree, linear_vtree


def envelope(C, T) -> tuple[int, int]:
    """Pinned query budgets: membership |T| (w+1)^2, equivalence nodes + 1."""
    return len(T) * (C.width + 1) ** 2, C.node_count + 1


def test_constant_one_takes_one_equivalence_query():
    T = linear_vtree([1, 2, 3])
    res = learn(T, truth_table_teacher(BoolFunTable.constant(True, [1, 2, 3])))
    assert res.equivalence_queries == 1
    assert res.tdd == table_to_tdd(BoolFunTable.constant(True, [1, 2, 3]), T)


def test_single_leaf_vtree():
    T = Vtree.from_nested("x")
    for bits in ([0, 0], [0, 1], [1, 0], [1, 1]):
        f = BoolFunTable.from_flat(["x"], bits)
        assert learn(T, truth_table_teacher(f)).tdd == table_to_tdd(f, T)


def test_tdd_teacher():
    rng = random.Random(4)
    f = random_table(6, rng, 0.5)
    T = random_vtree(f.variables, rng)
    C = table_to_tdd(f, T)
    res = learn(T, tdd_teacher(C))
    assert write_tdd(res.tdd) == write_tdd(C)
    with pytest.raises(TddError):
        tdd_teacher(C).equivalence(table_to_tdd(f, linear_vtree(list(f.variables))))


class LyingTeacher:
    """Answers membership from one function and equivalence from another."""

    def __init__(self, f, g):
        self.f, self.g = f, g

    def membership(self, tau):
        return self.f(tau)

    def equivalence(self, H):
        return next(self.g.models(), None)


def test_inconsistent_teacher_detected():
    T = linear_vtree([1, 2])
    f = BoolFunTable.constant(True, [1, 2])
    with pytest.raises(TeacherError):
        learn(T, LyingTeacher(f, f))


def test_round_limit():
    T = linear_vtree([1, 2, 3])
    f = BoolFunTable.from_callable([1, 2, 3], lambda a: a[1] ^ a[3])
    with pytest.raises(RuntimeError):
        Learner(T, truth_table_teacher(f), max_rounds=0).run()


@settings(deadline=None, max_examples=60)
@given(vtree_and_table(max_vars=6))
def test_learns_canonical_circuit_within_envelope(Tf):
    T, f = Tf
    res = learn(T, truth_table_teacher(f))
    C = table_to_tdd(f, T)
    assert write_tdd(res.tdd) == write_tdd(C)
    mq, eq = envelope(C, T)
    assert res.membership_queries <= mq
    assert res.equivalence_queries <= eq
    assert res.membership_queries <= 2 ** len(T.variables)


@settings(deadline=None, max_examples=20)
@given(st.integers(0, 2 ** 32 - 1))
def test_learner_on_random_vtrees(seed):
    rng = random.Random(seed)
    f = random_table(rng.randint(1, 7), rng)
    T = random_vtree(f.variables, rng)
    assert learn(T, tdd_teacher(table_to_tdd(f, T))).tdd == table_to_tdd(f, T)
