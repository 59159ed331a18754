"""Guarded interaction trees with the later modality erased to suspensions.

A tree is one of five heads: ``Nat``, ``Fun``, ``Err``, ``Tau`` or ``Vis``.
Every recursive position sits behind a :class:`Suspension`, so building a
tree never runs an unbounded computation; only forcing does, and the
reduction engine forces under a fuel budget.

The combinators below are smart constructors: they inspect the head of
their tree arguments and either compute the base case immediately or push
themselves under one ``Tau``/``Vis`` layer (the homomorphism clauses).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Callable, Optional

__all__ = [
    "Suspension", "later", "ErrorKind", "RUNTIME", "LIN",
    "ITree", "Nat", "Fun", "Err", "Tau", "Vis",
    "is_value", "tick", "ticks", "make_hom", "compose_homs",
    "get_fun", "get_nat", "get_val", "let", "app_cbn", "app_strict",
    "ifz", "natop", "monus", "seq", "while_loop", "pair", "proj1", "proj2",
    "gfix", "fun_of", "layer_equal", "ShapeError",
]


class ShapeError(Exception):
    """A payload does not have the shape its operation declares."""


class Suspension:
    """A pure deferred computation; stands in for a value under ``▶``.

    Forcing is not memoised: a suspension may be forced any number of
    times and must produce interchangeable results each time.
    """

    __slots__ = ("_produce",)

    def __init__(self, produce: Callable[[], object]):
        self._produce = produce

    def force(self):
        return self._produce()

    def map(self, f: Callable) -> "Suspension":
        return Suspension(lambda: f(self.force()))

    def __repr__(self):
        return "Suspension(...)"


def later(value) -> Suspension:
    """``Next``: suspend an already-available value."""
    return Suspension(lambda: value)


@dataclass(frozen=True)
class ErrorKind:
    tag: str

    def __str__(self):
        return self.tag


RUNTIME = ErrorKind("RunTime")
LIN = ErrorKind("Lin")


class ITree:
    """Base class of the five tree heads."""

    __slots__ = ()


@dataclass(frozen=True, eq=True)
class Nat(ITree):
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"Nat({self.n}) is not a natural number")


@dataclass(frozen=True, eq=True)
class Fun(ITree):
    # Forces to a Python callable ITree -> ITree.
    fn: Suspension


@dataclass(frozen=True, eq=True)
class Err(ITree):
    kind: ErrorKind


@dataclass(frozen=True, eq=True)
class Tau(ITree):
    next: Suspension


@dataclass(frozen=True, eq=True)
class Vis(ITree):
    op: object  # effects.OpId
    payload: object  # effects.Payload
    k: Callable  # Payload -> Suspension of ITree


def is_value(t: ITree) -> bool:
    return isinstance(t, (Nat, Fun))


def fun_of(g: Callable[[ITree], ITree]) -> Fun:
    """``Fun(Next(g))`` for a meta-level function ``g``."""
    return Fun(later(g))


def tick(t: ITree) -> Tau:
    return Tau(later(t))


def ticks(n: int, t: ITree) -> ITree:
    for _ in range(n):
        t = tick(t)
    return t


# -- homomorphisms ---------------------------------------------------------

def make_hom(value_case: Callable[[ITree], ITree]) -> Callable[[ITree], ITree]:
    """Extend an action on values to a tree homomorphism.

    The result fixes errors, commutes with ``Tau`` and post-composes
    itself onto ``Vis`` continuations.
    """

    def hom(t: ITree) -> ITree:
        if isinstance(t, (Nat, Fun)):
            return value_case(t)
        if isinstance(t, Err):
            return t
        if isinstance(t, Tau):
            nxt = t.next
            return Tau(Suspension(lambda: hom(nxt.force())))
        if isinstance(t, Vis):
            k = t.k
            return Vis(t.op, t.payload, lambda y: Suspension(lambda: hom(k(y).force())))
        raise TypeError(f"not a tree: {t!r}")

    return hom


def compose_homs(*homs: Callable[[ITree], ITree]) -> Callable[[ITree], ITree]:
    """Right-to-left composition, ``compose_homs(f, g)(t) == f(g(t))``."""

    def composed(t):
        for h in reversed(homs):
            t = h(t)
        return t

    return composed


def get_fun(t: ITree, f: Callable[[Suspension], ITree]) -> ITree:
    def on_value(v):
        if isinstance(v, Fun):
            return f(v.fn)
        return Err(RUNTIME)

    return make_hom(on_value)(t)


def get_nat(t: ITree, f: Callable[[int], ITree]) -> ITree:
    def on_value(v):
        if isinstance(v, Nat):
            return f(v.n)
        return Err(RUNTIME)

    return make_hom(on_value)(t)


def get_val(t: ITree, f: Callable[[ITree], ITree]) -> ITree:
    return make_hom(f)(t)


# LET x = t IN f(x)
let = get_val


def app_cbn(fn: ITree, arg: ITree) -> ITree:
    """Call-by-name application: the argument is passed unevaluated."""
    return get_fun(fn, lambda g: Tau(Suspension(lambda: g.force()(arg))))


def app_strict(fn: ITree, arg: ITree) -> ITree:
    """Call-by-value application, argument first, then the function."""
    return get_val(arg, lambda v: app_cbn(fn, v))


def ifz(t: ITree, then: ITree, else_: ITree) -> ITree:
    """Branch on a number: nonzero selects ``then``, zero selects ``else_``."""

    def on_value(v):
        if isinstance(v, Nat):
            return then if v.n > 0 else else_
        return Err(RUNTIME)

    return make_hom(on_value)(t)


def monus(a: int, b: int) -> int:
    return max(a - b, 0)


def natop(op: Callable[[int, int], int], lhs: ITree, rhs: ITree) -> ITree:
    """Binary arithmetic, evaluating ``rhs`` before ``lhs``."""

    def base(a, b):
        if isinstance(a, Nat) and isinstance(b, Nat):
            return Nat(op(a.n, b.n))
        return Err(RUNTIME)

    return get_val(rhs, lambda b: get_val(lhs, lambda a: base(a, b)))


def seq(first: ITree, then: ITree) -> ITree:
    return get_val(first, lambda _: then)


def gfix(f: Callable[[Suspension], ITree]) -> ITree:
    """Guarded fixpoint: ``gfix(f) == f(Next(gfix(f)))``.

    ``f`` must only force its argument under a constructor; otherwise
    building the fixpoint recurses without bound.
    """
    return f(Suspension(lambda: gfix(f)))


def while_loop(cond: ITree, body: ITree) -> ITree:
    return gfix(lambda self: ifz(cond, seq(body, Tau(self)), Nat(0)))


def pair(left: ITree, right: ITree) -> ITree:
    """Church pair; evaluates ``right`` then ``left``."""

    def build(x, y):
        return fun_of(lambda sel: app_strict(app_strict(sel, x), y))

    return get_val(right, lambda y: get_val(left, lambda x: build(x, y)))


_FIRST = fun_of(lambda a: fun_of(lambda b: a))
_SECOND = fun_of(lambda a: fun_of(lambda b: b))


def proj1(t: ITree) -> ITree:
    return app_strict(t, _FIRST)


def proj2(t: ITree) -> ITree:
    return app_strict(t, _SECOND)


# -- shallow structural comparison -----------------------------------------

_PROBES = (Nat(0), Nat(3))


def _payload_equal(p, q, depth, payloads) -> bool:
    # Payloads may carry suspended trees; compare those one layer down.
    if type(p) is not type(q):
        return False
    if not dataclasses.is_dataclass(p):
        return p == q
    for f in dataclasses.fields(p):
        x, y = getattr(p, f.name), getattr(q, f.name)
        if isinstance(x, Suspension):
            if not layer_equal(x.force(), y.force(), depth - 1, payloads):
                return False
        elif x != y:
            return False
    return True


def layer_equal(a: ITree, b: ITree, depth: int = 1,
                payloads: Optional[list] = None) -> bool:
    """Compare two trees head-for-head down to ``depth`` forced layers.

    Suspended parts (``Tau`` bodies, function results on a few probe
    arguments, continuation results on ``payloads``) are forced and
    compared recursively until the depth runs out.
    """
    if type(a) is not type(b):
        return False
    if isinstance(a, Nat):
        return a.n == b.n
    if isinstance(a, Err):
        return a.kind == b.kind
    if depth <= 0:
        return True
    if isinstance(a, Tau):
        return layer_equal(a.next.force(), b.next.force(), depth - 1, payloads)
    if isinstance(a, Fun):
        fa, fb = a.fn.force(), b.fn.force()
        return all(layer_equal(fa(p), fb(p), depth - 1, payloads) for p in _PROBES)
    if isinstance(a, Vis):
        if a.op != b.op or not _payload_equal(a.payload, b.payload, depth, payloads):
            return False
        for y in payloads or ():
            try:
                ka, kb = a.k(y).force(), b.k(y).force()
            except ShapeError:
                continue
            if not layer_equal(ka, kb, depth - 1, payloads):
                return False
        return True
    raise TypeError(f"not a tree: {a!r}")
