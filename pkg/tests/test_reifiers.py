import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gitrees.core import RUNTIME, Err, Nat, Tau, Vis, later
from gitrees.effects import (
    STORE_IO, UNIT, Loc, Location, LocTree, Num, Tree, alloc_node, dealloc_node,
    input_node, output_node, read_node, write_node,
)
from gitrees.engine import istep
from gitrees.reifiers import (
    HeapState, IoState, combine_reifiers, io_reifier, reifier_for, reify, store_reifier,
)

import treegen

R = reifier_for(STORE_IO)


def test_io_table():
    io = io_reifier()
    assert io.step("input", UNIT, IoState.of([3, 4])) == (Num(3), IoState.of([4]))
    assert io.step("input", UNIT, IoState.of()) is None
    assert io.step("output", Num(5), IoState.of([], [1])) == (UNIT, IoState.of([], [5, 1]))


def test_store_table():
    s = store_reifier()
    a, b = later(Nat(1)), later(Nat(2))
    h = HeapState.of({Location(0): a, Location(2): b})
    y, h2 = s.step("alloc", Tree(b), h)
    assert y == Loc(Location(1)) and h2.domain() == (0, 1, 2)
    assert s.step("read", Loc(Location(2)), h) == (Tree(b), h)
    assert s.step("read", Loc(Location(1)), h) is None
    y, h3 = s.step("write", LocTree(Location(0), b), h)
    assert y == UNIT and h3.cells[Location(0)] is b
    assert s.step("write", LocTree(Location(1), b), h) is None
    y, h4 = s.step("dealloc", Loc(Location(0)), h)
    assert y == UNIT and h4.domain() == (2,)
    assert s.step("dealloc", Loc(Location(5)), h) is None


def test_reify_success_and_failure():
    st0 = R.initial_state(io=IoState.of([7]))
    t, st1 = reify(input_node(), st0, R)
    assert isinstance(t, Tau) and t.next.force() == Nat(7)
    assert R.local(st1, "io").inputs == ()
    t, st2 = reify(input_node(), st1, R)
    assert t == Err(RUNTIME) and st2 == st1
    with pytest.raises(ValueError):
        reify(Nat(0), st0, R)


def test_initial_state_overrides():
    st0 = R.initial_state(io=IoState.of([1]))
    assert R.local(st0, "io") == IoState.of([1])
    assert R.local(st0, "store") == HeapState.of()
    with pytest.raises(KeyError):
        R.initial_state(nope=1)


def test_inputs_seed_initial_tape():
    r = reifier_for(STORE_IO, [1, 2])
    assert r.local(r.initial_state(), "io").inputs == (1, 2)


def test_combined_ambient_matches():
    r = combine_reifiers([store_reifier(), io_reifier()])
    assert [f.name for f in r.ambient.families] == ["store", "io"]


def test_alloc_then_read_roundtrip():
    t = alloc_node(Nat(9), read_node)
    st0 = R.initial_state()
    t1, st1 = istep(t, st0, R)
    t2, st2 = istep(t1, st1, R)
    assert t2 == Nat(9)
    assert R.local(st2, "store").domain() == (0,)


@settings(max_examples=100, deadline=None)
@given(treegen.states(), st.integers(0, 5))
def test_io_effects_leave_store_alone(s, n):
    for node in (input_node(), output_node(n)):
        _, s2 = reify(node, s, R)
        assert R.local(s2, "store") == R.local(s, "store")


@settings(max_examples=100, deadline=None)
@given(treegen.states(), st.integers(0, 3))
def test_store_effects_leave_io_alone(s, i):
    for node in (read_node(Location(i)), write_node(Location(i), Nat(1)),
                 dealloc_node(Location(i)), alloc_node(Nat(0), read_node)):
        _, s2 = reify(node, s, R)
        assert R.local(s2, "io") == R.local(s, "io")


@settings(max_examples=100, deadline=None)
@given(treegen.states(), st.integers(0, 3))
def test_reify_ignores_continuation(s, i):
    # Same op and payload with different continuations give the same state.
    base = read_node(Location(i))
    other = Vis(base.op, base.payload, lambda y: later(Nat(99)))
    t1, s1 = reify(base, s, R)
    t2, s2 = reify(other, s, R)
    assert s1 == s2
    assert isinstance(t1, Err) == isinstance(t2, Err)
