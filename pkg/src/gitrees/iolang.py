"""A PCF-like language with natural numbers, recursion and tape I/O.

Evaluation is call-by-value, right to left. The module carries two
semantics that are meant to agree: a substitution-based small-step
machine (:func:`op_step`, :func:`op_run`) and a denotation into trees
(:func:`denote_io`).

Surface syntax::

    n | x | input | (output e) | (if e t u) | (app e1 e2)
      | (rec f x body) | (+ e1 e2) | (- e1 e2) | (* e1 e2)
"""

from __future__ import annotations

import operator
from dataclasses import dataclass
from typing import Callable, Dict, Mapping, Optional, Tuple

from . import core
from .core import ITree, Nat, app_strict, gfix, get_nat, ifz, monus, natop
from .effects import STORE_IO, Ambient, input_node, output_node
from .reifiers import IoState
from .sexpr import ParseError, SExpr, dump, parse
from .unify import Subst, TVar, UnifyError

__all__ = [
    "IoExpr", "Var", "Lit", "Rec", "If", "App", "BinOp", "Input", "Output",
    "IoType", "TNat", "Arrow", "BINOPS", "is_value", "free_vars",
    "typecheck_io", "subst", "EvalCtx", "Hole", "OutputCtx", "IfCtx", "AppR",
    "AppL", "OpR", "OpL", "plug", "decompose", "IoConfig", "op_step", "op_run",
    "OpResult", "denote_io", "denote_ectx", "parse_io", "parse_io_type", "show",
    "select_branch",
]

BINOPS: Dict[str, Callable[[int, int], int]] = {
    "+": operator.add,
    "-": monus,
    "*": operator.mul,
}


# -- syntax ----------------------------------------------------------------

class IoExpr:
    __slots__ = ()


@dataclass(frozen=True)
class Var(IoExpr):
    name: str


@dataclass(frozen=True)
class Lit(IoExpr):
    n: int


@dataclass(frozen=True)
class Rec(IoExpr):
    fname: str
    xname: str
    body: IoExpr

    def __post_init__(self):
        if self.fname == self.xname:
            raise ValueError("rec: function and argument names must differ")


@dataclass(frozen=True)
class If(IoExpr):
    cond: IoExpr
    then: IoExpr
    else_: IoExpr


@dataclass(frozen=True)
class App(IoExpr):
    fn: IoExpr
    arg: IoExpr


@dataclass(frozen=True)
class BinOp(IoExpr):
    op: str
    lhs: IoExpr
    rhs: IoExpr

    def __post_init__(self):
        if self.op not in BINOPS:
            raise ValueError(f"unknown operator {self.op!r}")


@dataclass(frozen=True)
class Input(IoExpr):
    pass


@dataclass(frozen=True)
class Output(IoExpr):
    arg: IoExpr


class IoType:
    __slots__ = ()


@dataclass(frozen=True)
class TNat(IoType):
    def __str__(self):
        return "nat"


@dataclass(frozen=True)
class Arrow(IoType):
    dom: object
    cod: object

    def __str__(self):
        return f"(-> {self.dom} {self.cod})"


def is_value(e: IoExpr) -> bool:
    return isinstance(e, (Lit, Rec))


def free_vars(e: IoExpr) -> frozenset:
    if isinstance(e, Var):
        return frozenset([e.name])
    if isinstance(e, (Lit, Input)):
        return frozenset()
    if isinstance(e, Rec):
        return free_vars(e.body) - {e.fname, e.xname}
    if isinstance(e, If):
        return free_vars(e.cond) | free_vars(e.then) | free_vars(e.else_)
    if isinstance(e, App):
        return free_vars(e.fn) | free_vars(e.arg)
    if isinstance(e, BinOp):
        return free_vars(e.lhs) | free_vars(e.rhs)
    if isinstance(e, Output):
        return free_vars(e.arg)
    raise TypeError(e)


# -- typing ----------------------------------------------------------------

def _infer(env: Mapping[str, object], e: IoExpr, s: Subst):
    if isinstance(e, Var):
        if e.name not in env:
            raise UnifyError(f"unbound variable {e.name}")
        return env[e.name]
    if isinstance(e, (Lit, Input)):
        return TNat()
    if isinstance(e, Output):
        s.unify(_infer(env, e.arg, s), TNat())
        return TNat()
    if isinstance(e, BinOp):
        s.unify(_infer(env, e.lhs, s), TNat())
        s.unify(_infer(env, e.rhs, s), TNat())
        return TNat()
    if isinstance(e, If):
        s.unify(_infer(env, e.cond, s), TNat())
        t = _infer(env, e.then, s)
        s.unify(t, _infer(env, e.else_, s))
        return t
    if isinstance(e, App):
        tf = _infer(env, e.fn, s)
        ta = _infer(env, e.arg, s)
        res = TVar.fresh()
        s.unify(tf, Arrow(ta, res))
        return res
    if isinstance(e, Rec):
        dom, cod = TVar.fresh(), TVar.fresh()
        inner = dict(env)
        inner[e.fname] = Arrow(dom, cod)
        inner[e.xname] = dom
        s.unify(_infer(inner, e.body, s), cod)
        return Arrow(dom, cod)
    raise TypeError(e)


def typecheck_io(env: Mapping[str, IoType], e: IoExpr,
                 expected: Optional[IoType] = None) -> Optional[IoType]:
    """Infer the simple type of ``e``; ``None`` if it is ill-typed.

    The body of ``rec f x = body`` is checked at the result type of the
    function. Types left unconstrained default to ``nat`` unless pinned by
    ``expected``.
    """
    s = Subst()
    try:
        t = _infer(env, e, s)
        if expected is not None:
            s.unify(t, expected)
    except UnifyError:
        return None
    return s.default(t, TNat())


# -- operational semantics -------------------------------------------------

def subst(e: IoExpr, x: str, v: IoExpr) -> IoExpr:
    """Replace free ``x`` by the closed expression ``v``."""
    if isinstance(e, Var):
        return v if e.name == x else e
    if isinstance(e, (Lit, Input)):
        return e
    if isinstance(e, Rec):
        if x in (e.fname, e.xname):
            return e
        return Rec(e.fname, e.xname, subst(e.body, x, v))
    if isinstance(e, If):
        return If(subst(e.cond, x, v), subst(e.then, x, v), subst(e.else_, x, v))
    if isinstance(e, App):
        return App(subst(e.fn, x, v), subst(e.arg, x, v))
    if isinstance(e, BinOp):
        return BinOp(e.op, subst(e.lhs, x, v), subst(e.rhs, x, v))
    if isinstance(e, Output):
        return Output(subst(e.arg, x, v))
    raise TypeError(e)


class EvalCtx:
    __slots__ = ()


@dataclass(frozen=True)
class Hole(EvalCtx):
    pass


@dataclass(frozen=True)
class OutputCtx(EvalCtx):
    inner: EvalCtx


@dataclass(frozen=True)
class IfCtx(EvalCtx):
    inner: EvalCtx
    then: IoExpr
    else_: IoExpr


@dataclass(frozen=True)
class AppR(EvalCtx):
    """``e K``: the argument is being evaluated."""
    fn: IoExpr
    inner: EvalCtx


@dataclass(frozen=True)
class AppL(EvalCtx):
    """``K v``: the argument is a value, the function is being evaluated."""
    inner: EvalCtx
    arg: IoExpr


@dataclass(frozen=True)
class OpR(EvalCtx):
    op: str
    lhs: IoExpr
    inner: EvalCtx


@dataclass(frozen=True)
class OpL(EvalCtx):
    op: str
    inner: EvalCtx
    rhs: IoExpr


def plug(k: EvalCtx, e: IoExpr) -> IoExpr:
    if isinstance(k, Hole):
        return e
    if isinstance(k, OutputCtx):
        return Output(plug(k.inner, e))
    if isinstance(k, IfCtx):
        return If(plug(k.inner, e), k.then, k.else_)
    if isinstance(k, AppR):
        return App(k.fn, plug(k.inner, e))
    if isinstance(k, AppL):
        return App(plug(k.inner, e), k.arg)
    if isinstance(k, OpR):
        return BinOp(k.op, k.lhs, plug(k.inner, e))
    if isinstance(k, OpL):
        return BinOp(k.op, plug(k.inner, e), k.rhs)
    raise TypeError(k)


def decompose(e: IoExpr) -> Optional[Tuple[EvalCtx, IoExpr]]:
    """Split a non-value into its unique context and redex (right to left)."""
    if is_value(e):
        return None
    if isinstance(e, Output) and not is_value(e.arg):
        k, r = decompose(e.arg)
        return OutputCtx(k), r
    if isinstance(e, If) and not is_value(e.cond):
        k, r = decompose(e.cond)
        return IfCtx(k, e.then, e.else_), r
    if isinstance(e, App):
        if not is_value(e.arg):
            k, r = decompose(e.arg)
            return AppR(e.fn, k), r
        if not is_value(e.fn):
            k, r = decompose(e.fn)
            return AppL(k, e.arg), r
    if isinstance(e, BinOp):
        if not is_value(e.rhs):
            k, r = decompose(e.rhs)
            return OpR(e.op, e.lhs, k), r
        if not is_value(e.lhs):
            k, r = decompose(e.lhs)
            return OpL(e.op, k, e.rhs), r
    return Hole(), e


def select_branch(n: int, then: IoExpr, else_: IoExpr) -> IoExpr:
    return then if n > 0 else else_


@dataclass(frozen=True)
class IoConfig:
    expr: IoExpr
    tapes: IoState = IoState()


def _head_step(e: IoExpr, st: IoState) -> Optional[Tuple[IoExpr, IoState]]:
    if isinstance(e, App) and isinstance(e.fn, Rec) and is_value(e.arg):
        f = e.fn
        return subst(subst(f.body, f.xname, e.arg), f.fname, f), st
    if isinstance(e, BinOp) and isinstance(e.lhs, Lit) and isinstance(e.rhs, Lit):
        return Lit(BINOPS[e.op](e.lhs.n, e.rhs.n)), st
    if isinstance(e, If) and isinstance(e.cond, Lit):
        return select_branch(e.cond.n, e.then, e.else_), st
    if isinstance(e, Input) and st.inputs:
        return Lit(st.inputs[0]), IoState(st.inputs[1:], st.outputs)
    if isinstance(e, Output) and isinstance(e.arg, Lit):
        return Lit(0), IoState(st.inputs, (e.arg.n,) + st.outputs)
    return None


def op_step(c: IoConfig) -> Optional[IoConfig]:
    split = decompose(c.expr)
    if split is None:
        return None
    k, redex = split
    out = _head_step(redex, c.tapes)
    if out is None:
        return None
    e2, st2 = out
    return IoConfig(plug(k, e2), st2)


@dataclass(frozen=True)
class OpResult:
    config: IoConfig
    steps: int
    status: str  # "value", "stuck" or "out-of-fuel"


def op_run(c: IoConfig, fuel: int = 10 ** 6) -> OpResult:
    steps = 0
    while True:
        if is_value(c.expr):
            return OpResult(c, steps, "value")
        if steps >= fuel:
            return OpResult(c, steps, "out-of-fuel")
        nxt = op_step(c)
        if nxt is None:
            return OpResult(c, steps, "stuck")
        c = nxt
        steps += 1


# -- denotation ------------------------------------------------------------

def denote_io(e: IoExpr, env: Optional[Mapping[str, ITree]] = None,
              amb: Ambient = STORE_IO) -> ITree:
    env = env or {}
    if isinstance(e, Var):
        if e.name not in env:
            raise KeyError(f"unbound variable {e.name}")
        return env[e.name]
    if isinstance(e, Lit):
        return Nat(e.n)
    if isinstance(e, If):
        return ifz(denote_io(e.cond, env, amb), denote_io(e.then, env, amb),
                   denote_io(e.else_, env, amb))
    if isinstance(e, BinOp):
        return natop(BINOPS[e.op], denote_io(e.lhs, env, amb), denote_io(e.rhs, env, amb))
    if isinstance(e, Input):
        return input_node(amb)
    if isinstance(e, Output):
        return get_nat(denote_io(e.arg, env, amb), lambda n: output_node(n, amb))
    if isinstance(e, App):
        return app_strict(denote_io(e.fn, env, amb), denote_io(e.arg, env, amb))
    if isinstance(e, Rec):
        def unfold(self_):
            def call(v):
                inner = dict(env)
                inner[e.xname] = v
                inner[e.fname] = self_.force()
                return denote_io(e.body, inner, amb)
            return core.Fun(core.later(call))
        return gfix(unfold)
    raise TypeError(e)


def denote_ectx(k: EvalCtx, env: Optional[Mapping[str, ITree]] = None,
                amb: Ambient = STORE_IO) -> Callable[[ITree], ITree]:
    """Interpret an evaluation context as a tree homomorphism."""
    env = env or {}
    if isinstance(k, Hole):
        return lambda t: t
    inner = denote_ectx(k.inner, env, amb)
    if isinstance(k, OutputCtx):
        return lambda t: get_nat(inner(t), lambda n: output_node(n, amb))
    if isinstance(k, IfCtx):
        then, else_ = denote_io(k.then, env, amb), denote_io(k.else_, env, amb)
        return lambda t: ifz(inner(t), then, else_)
    if isinstance(k, AppR):
        fn = denote_io(k.fn, env, amb)
        return lambda t: app_strict(fn, inner(t))
    if isinstance(k, AppL):
        arg = denote_io(k.arg, env, amb)
        return lambda t: app_strict(inner(t), arg)
    if isinstance(k, OpR):
        lhs = denote_io(k.lhs, env, amb)
        return lambda t: natop(BINOPS[k.op], lhs, inner(t))
    if isinstance(k, OpL):
        rhs = denote_io(k.rhs, env, amb)
        return lambda t: natop(BINOPS[k.op], inner(t), rhs)
    raise TypeError(k)


# -- surface syntax --------------------------------------------------------

def _sym(x: SExpr, what: str) -> str:
    if not isinstance(x, str):
        raise ParseError(f"expected {what}, got {dump(x)}")
    return x


def from_sexpr(x: SExpr) -> IoExpr:
    if isinstance(x, int):
        return Lit(x)
    if isinstance(x, str):
        if x == "input":
            return Input()
        return Var(x)
    if not x:
        raise ParseError("empty form")
    head, args = x[0], x[1:]
    if not isinstance(head, str):
        raise ParseError(f"form must start with a keyword: {dump(x)}")
    try:
        if head == "rec" and len(args) == 3:
            return Rec(_sym(args[0], "a name"), _sym(args[1], "a name"), from_sexpr(args[2]))
        if head == "if" and len(args) == 3:
            return If(*map(from_sexpr, args))
        if head == "app" and len(args) >= 2:
            e = from_sexpr(args[0])
            for a in args[1:]:
                e = App(e, from_sexpr(a))
            return e
        if head in BINOPS and len(args) == 2:
            return BinOp(head, from_sexpr(args[0]), from_sexpr(args[1]))
        if head == "output" and len(args) == 1:
            return Output(from_sexpr(args[0]))
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    raise ParseError(f"bad iolang form: {dump(x)}")


def type_from_sexpr(x: SExpr) -> IoType:
    if x == "nat":
        return TNat()
    if isinstance(x, list) and len(x) >= 3 and x[0] == "->":
        parts = [type_from_sexpr(y) for y in x[1:]]
        t = parts[-1]
        for dom in reversed(parts[:-1]):
            t = Arrow(dom, t)
        return t
    raise ParseError(f"bad iolang type: {dump(x)}")


def parse_io(src: str) -> IoExpr:
    return from_sexpr(parse(src))


def parse_io_type(src: str) -> IoType:
    return type_from_sexpr(parse(src))


def show(e: IoExpr) -> str:
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Lit):
        return str(e.n)
    if isinstance(e, Input):
        return "input"
    if isinstance(e, Rec):
        return f"(rec {e.fname} {e.xname} {show(e.body)})"
    if isinstance(e, If):
        return f"(if {show(e.cond)} {show(e.then)} {show(e.else_)})"
    if isinstance(e, App):
        return f"(app {show(e.fn)} {show(e.arg)})"
    if isinstance(e, BinOp):
        return f"({e.op} {show(e.lhs)} {show(e.rhs)})"
    if isinstance(e, Output):
        return f"(output {show(e.arg)})"
    raise TypeError(e)
