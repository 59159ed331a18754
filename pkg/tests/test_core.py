import math
import operator

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gitrees.core import (
    LIN, RUNTIME, Err, Nat, Suspension, Tau, Vis, app_cbn, app_strict,
    compose_homs, fun_of, get_fun, get_nat, get_val, gfix, ifz, is_value, later,
    layer_equal, make_hom, monus, natop, pair, proj1, proj2, seq, tick, ticks,
    while_loop,
)
from gitrees.effects import STORE_IO, UNIT, Num, Tree, input_node
from gitrees.engine import OutcomeKind, StepKind, run
from gitrees.programs import fact, fact_io
from gitrees.reifiers import IoState, reifier_for

import treegen

R = reifier_for(STORE_IO)
PAYLOADS = [UNIT, Num(0), Num(3), Tree(later(Nat(2)))]


def run_plain(t, fuel=10 ** 4, inputs=()):
    r = reifier_for(STORE_IO, inputs)
    out, trace = run(t, r.initial_state(), r, fuel)
    return out, trace


def test_suspension_is_not_memoized():
    calls = []
    s = Suspension(lambda: calls.append(1) or Nat(len(calls)))
    assert s.force() == Nat(1)
    assert s.force() == Nat(2)


def test_nat_rejects_negatives():
    with pytest.raises(ValueError):
        Nat(-1)


def test_ticks_builds_nested_tau():
    t = ticks(3, Nat(4))
    for _ in range(3):
        assert isinstance(t, Tau)
        t = t.next.force()
    assert t == Nat(4)


def test_is_value():
    assert is_value(Nat(0)) and is_value(fun_of(lambda x: x))
    assert not is_value(Err(RUNTIME)) and not is_value(tick(Nat(0)))


def test_get_nat_on_values():
    assert get_nat(Nat(4), lambda n: Nat(n * 2)) == Nat(8)
    assert get_nat(fun_of(lambda x: x), lambda n: Nat(n)) == Err(RUNTIME)


def test_get_fun_on_values():
    assert get_fun(Nat(1), lambda g: Nat(0)) == Err(RUNTIME)
    out = get_fun(fun_of(lambda x: x), lambda g: g.force()(Nat(9)))
    assert out == Nat(9)


def test_ifz_branch_convention():
    assert ifz(Nat(5), Nat(1), Nat(2)) == Nat(1)
    assert ifz(Nat(0), Nat(1), Nat(2)) == Nat(2)
    assert ifz(fun_of(lambda x: x), Nat(1), Nat(2)) == Err(RUNTIME)


def test_natop_monus_and_errors():
    assert natop(monus, Nat(2), Nat(5)) == Nat(0)
    assert natop(monus, Nat(5), Nat(2)) == Nat(3)
    assert natop(operator.add, fun_of(lambda x: x), Nat(1)) == Err(RUNTIME)


def test_natop_evaluates_right_first():
    r = reifier_for(STORE_IO, [10, 3])
    t = natop(monus, input_node(), input_node())
    out, _ = run(t, r.initial_state(), r)
    # rhs reads 10, lhs reads 3
    assert out.tree == Nat(0)


def test_seq_discards_first_value():
    assert seq(Nat(3), Nat(4)) == Nat(4)


def test_errors_propagate_through_homs():
    for e in (Err(RUNTIME), Err(LIN)):
        assert get_val(e, lambda v: Nat(0)) == e
        assert app_strict(fun_of(lambda x: x), e) == e
        assert natop(operator.add, Nat(1), e) == e


def test_app_strict_beta_costs_one_tick():
    out, trace = run_plain(app_strict(fun_of(lambda x: natop(operator.add, x, Nat(1))), Nat(4)))
    assert out.tree == Nat(5) and out.steps == 1
    assert [e.kind for e in trace] == [StepKind.TAU]


def test_app_cbn_passes_argument_unevaluated():
    captured = []
    app = app_cbn(fun_of(lambda x: captured.append(x) or Nat(0)), input_node())
    out, _ = run_plain(app)
    assert out.tree == Nat(0)
    assert isinstance(captured[0], Vis)


@pytest.mark.parametrize("proj,expected", [(proj1, 4), (proj2, 9)])
def test_projection_takes_three_ticks(proj, expected):
    out, trace = run_plain(proj(pair(Nat(4), Nat(9))))
    assert out.tree == Nat(expected)
    assert out.steps == 3
    assert all(e.kind is StepKind.TAU for e in trace)


def test_pair_evaluates_right_component_first():
    out, _ = run_plain(proj1(pair(input_node(), input_node())), inputs=[1, 2])
    assert out.tree == Nat(2)


def test_gfix_unfolds_lazily():
    countdown = gfix(lambda self: fun_of(
        lambda x: ifz(x, app_strict(Tau(self), natop(monus, x, Nat(1))), Nat(42))))
    out, _ = run_plain(app_strict(countdown, Nat(3)))
    assert out.kind is OutcomeKind.VALUE and out.tree == Nat(42)


def test_while_with_true_condition_runs_out_of_fuel():
    out, trace = run_plain(while_loop(Nat(1), Nat(0)), fuel=50)
    assert out.kind is OutcomeKind.OUT_OF_FUEL
    assert out.steps == 50 and len(trace) == 50
    assert all(e.kind is StepKind.TAU for e in trace)


def test_while_with_false_condition_is_zero():
    assert while_loop(Nat(0), Nat(7)) == Nat(0)


@pytest.mark.parametrize("n", range(9))
def test_fact(n):
    out, _ = run_plain(fact(n), fuel=10 ** 6)
    assert out.kind is OutcomeKind.VALUE and out.tree == Nat(math.prod(range(1, n + 1)))


def test_fact_io():
    out, _ = run_plain(fact_io(), fuel=10 ** 6, inputs=[5])
    io = R.local(out.state, "io")
    assert out.kind is OutcomeKind.VALUE
    assert io == IoState((), (120,))


def test_make_hom_identity_case():
    h = make_hom(lambda v: v)
    assert h(Nat(3)) == Nat(3)
    with pytest.raises(TypeError):
        h(object())


def test_compose_homs_order():
    double = make_hom(lambda v: get_nat(v, lambda n: Nat(2 * n)))
    inc = make_hom(lambda v: get_nat(v, lambda n: Nat(n + 1)))
    assert compose_homs(double, inc)(Nat(3)) == Nat(8)
    assert compose_homs(inc, double)(Nat(3)) == Nat(7)


def test_layer_equal_distinguishes_heads():
    assert layer_equal(tick(Nat(1)), tick(Nat(1)), depth=2)
    assert not layer_equal(tick(Nat(1)), tick(Nat(2)), depth=2)
    assert not layer_equal(Nat(1), tick(Nat(1)))
    assert layer_equal(fun_of(lambda x: x), fun_of(lambda x: x), depth=2)
    assert not layer_equal(fun_of(lambda x: x), fun_of(lambda x: Nat(0)), depth=2)


@settings(max_examples=100, deadline=None)
@given(treegen.trees, st.sampled_from(sorted(treegen.HOMS)))
def test_homs_commute_with_tick(t, name):
    h = treegen.HOMS[name]
    lhs = h(tick(t))
    assert isinstance(lhs, Tau)
    assert layer_equal(lhs.next.force(), h(t), depth=2, payloads=PAYLOADS)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(sorted(treegen.HOMS)), st.sampled_from([RUNTIME, LIN]))
def test_homs_fix_errors(name, kind):
    assert treegen.HOMS[name](Err(kind)) == Err(kind)


def test_projecting_a_number_is_an_error():
    out, _ = run_plain(proj1(Nat(5)))
    assert out.tree == Err(RUNTIME)


def test_app_strict_runs_argument_effects_first():
    fn = treegen.build(("output", 1, ("fun", "id")))
    arg = treegen.build(("output", 2, ("nat", 0)))
    head = app_strict(fn, arg)
    assert isinstance(head, Vis) and head.payload == arg.payload
