"""An affine language with strong-update references.

Every variable is used at most once; the checker enforces this with
disjoint used-sets and the denotation backs it up at run time by handing
each binding over as a store-backed thunk that errors with ``Lin`` when
forced a second time.

Surface syntax::

    n | #t | #f | unit | x | (lam x body) | (lam (x T) body) | (app e1 e2)
      | (pair e1 e2) | (letpair x y e body)
      | (alloc e) | (dealloc e) | (replace e1 e2)

    T ::= nat | bool | unit | (* T T) | (-o T T) | (ref T)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Mapping, Optional, Tuple

from . import core
from .core import (
    LIN, Err, ITree, app_strict, fun_of, get_nat, ifz, let, pair, proj1, proj2, seq,
)
from .effects import (
    STORE_IO, Ambient, Location, alloc_node, dealloc_node, read_node, write_node,
)
from .sexpr import ParseError, SExpr, dump, parse
from .unify import Subst, TVar, UnifyError

__all__ = [
    "AffExpr", "Lit", "BoolLit", "UnitLit", "Var", "Lam", "App", "Pair", "LetPair",
    "Alloc", "Dealloc", "Replace", "AffType", "ABool", "ANat", "AUnit", "Tensor",
    "Lolli", "Ref", "Derivation", "AffTypeError", "AffineChecker", "derive_aff",
    "typecheck_aff", "thunk_protect", "force", "AffineDenoter", "denote_aff",
    "AffineReader", "parse_aff", "parse_aff_type",
]


# -- syntax ----------------------------------------------------------------

class AffExpr:
    __slots__ = ()


@dataclass(frozen=True)
class Lit(AffExpr):
    n: int


@dataclass(frozen=True)
class BoolLit(AffExpr):
    b: bool


@dataclass(frozen=True)
class UnitLit(AffExpr):
    pass


@dataclass(frozen=True)
class Var(AffExpr):
    name: str


@dataclass(frozen=True)
class Lam(AffExpr):
    xname: str
    body: AffExpr
    ann: Optional["AffType"] = None


@dataclass(frozen=True)
class App(AffExpr):
    fn: AffExpr
    arg: AffExpr


@dataclass(frozen=True)
class Pair(AffExpr):
    left: AffExpr
    right: AffExpr


@dataclass(frozen=True)
class LetPair(AffExpr):
    x1: str
    x2: str
    rhs: AffExpr
    body: AffExpr


@dataclass(frozen=True)
class Alloc(AffExpr):
    init: AffExpr


@dataclass(frozen=True)
class Dealloc(AffExpr):
    ref: AffExpr


@dataclass(frozen=True)
class Replace(AffExpr):
    ref: AffExpr
    value: AffExpr


class AffType:
    __slots__ = ()


@dataclass(frozen=True)
class ABool(AffType):
    def __str__(self):
        return "bool"


@dataclass(frozen=True)
class ANat(AffType):
    def __str__(self):
        return "nat"


@dataclass(frozen=True)
class AUnit(AffType):
    def __str__(self):
        return "unit"


@dataclass(frozen=True)
class Tensor(AffType):
    left: object
    right: object

    def __str__(self):
        return f"(* {self.left} {self.right})"


@dataclass(frozen=True)
class Lolli(AffType):
    dom: object
    cod: object

    def __str__(self):
        return f"(-o {self.dom} {self.cod})"


@dataclass(frozen=True)
class Ref(AffType):
    inner: object

    def __str__(self):
        return f"(ref {self.inner})"


# -- typing ----------------------------------------------------------------

class AffTypeError(Exception):
    pass


@dataclass
class Derivation:
    """A typing derivation node: the expression, its type, the variables it consumes."""

    expr: object
    type: object
    used: FrozenSet[str]
    children: Tuple["Derivation", ...] = ()
    # Rule-specific data, e.g. the conversion of an embedding.
    info: Dict[str, object] = field(default_factory=dict)


class AffineChecker:
    """Algorithmic affine type checking with inference for unannotated binders."""

    def __init__(self):
        self.subst = Subst()

    def unify(self, a, b, what=""):
        try:
            self.subst.unify(a, b)
        except UnifyError as exc:
            raise AffTypeError(f"{what}: {exc}" if what else str(exc)) from None

    @staticmethod
    def disjoint(a: FrozenSet[str], b: FrozenSet[str], what: str):
        both = a & b
        if both:
            raise AffTypeError(f"{what}: variables used twice: {sorted(both)}")

    def infer(self, env: Mapping[str, object], e) -> Derivation:
        method = getattr(self, "infer_" + type(e).__name__.lower(), None)
        if method is None:
            raise AffTypeError(f"cannot type {type(e).__name__}")
        return method(env, e)

    def infer_lit(self, env, e):
        return Derivation(e, ANat(), frozenset())

    def infer_boollit(self, env, e):
        return Derivation(e, ABool(), frozenset())

    def infer_unitlit(self, env, e):
        return Derivation(e, AUnit(), frozenset())

    def infer_var(self, env, e):
        if e.name not in env:
            raise AffTypeError(f"unbound variable {e.name}")
        return Derivation(e, env[e.name], frozenset([e.name]))

    def infer_lam(self, env, e):
        dom = e.ann if e.ann is not None else TVar.fresh()
        inner = dict(env)
        inner[e.xname] = dom
        body = self.infer(inner, e.body)
        return Derivation(e, Lolli(dom, body.type), body.used - {e.xname}, (body,))

    def infer_app(self, env, e):
        fn, arg = self.infer(env, e.fn), self.infer(env, e.arg)
        self.disjoint(fn.used, arg.used, "application")
        res = TVar.fresh()
        self.unify(fn.type, Lolli(arg.type, res), "application")
        return Derivation(e, res, fn.used | arg.used, (fn, arg))

    def infer_pair(self, env, e):
        left, right = self.infer(env, e.left), self.infer(env, e.right)
        self.disjoint(left.used, right.used, "pair")
        return Derivation(e, Tensor(left.type, right.type), left.used | right.used, (left, right))

    def infer_letpair(self, env, e):
        if e.x1 == e.x2:
            raise AffTypeError("letpair binds the same name twice")
        rhs = self.infer(env, e.rhs)
        a, b = TVar.fresh(), TVar.fresh()
        self.unify(rhs.type, Tensor(a, b), "letpair")
        inner = dict(env)
        inner[e.x1], inner[e.x2] = a, b
        body = self.infer(inner, e.body)
        body_used = body.used - {e.x1, e.x2}
        self.disjoint(rhs.used, body_used, "letpair")
        return Derivation(e, body.type, rhs.used | body_used, (rhs, body))

    def infer_alloc(self, env, e):
        init = self.infer(env, e.init)
        return Derivation(e, Ref(init.type), init.used, (init,))

    def infer_dealloc(self, env, e):
        ref = self.infer(env, e.ref)
        self.unify(ref.type, Ref(TVar.fresh()), "dealloc")
        return Derivation(e, AUnit(), ref.used, (ref,))

    def infer_replace(self, env, e):
        ref, value = self.infer(env, e.ref), self.infer(env, e.value)
        self.disjoint(ref.used, value.used, "replace")
        old = TVar.fresh()
        self.unify(ref.type, Ref(old), "replace")
        return Derivation(e, Tensor(old, Ref(value.type)), ref.used | value.used, (ref, value))

    def finish(self, d: Derivation) -> Derivation:
        """Resolve every node's type, defaulting unconstrained variables to ``nat``."""
        d.type = self.subst.default(d.type, ANat())
        for c in d.children:
            self.finish(c)
        return d


def derive_aff(env: Mapping[str, AffType], e, expected: Optional[AffType] = None,
               checker_cls=AffineChecker) -> Optional[Derivation]:
    checker = checker_cls()
    try:
        d = checker.infer(env, e)
        if expected is not None:
            checker.unify(d.type, expected, "expected type")
    except AffTypeError:
        return None
    return checker.finish(d)


def typecheck_aff(env: Mapping[str, AffType], e,
                  expected: Optional[AffType] = None) -> Optional[Tuple[AffType, FrozenSet[str]]]:
    """Return ``(type, consumed variables)`` or ``None`` if ``e`` is rejected."""
    d = derive_aff(env, e, expected)
    if d is None:
        return None
    return d.type, d.used


# -- denotation ------------------------------------------------------------

def thunk_protect(t: ITree, amb: Ambient = STORE_IO) -> ITree:
    """Wrap ``t`` in a function that may be called once; the second call gives ``Err(Lin)``."""

    def guarded(loc: Location) -> ITree:
        return fun_of(lambda _: ifz(read_node(loc, amb), Err(LIN),
                                    seq(write_node(loc, core.Nat(1), amb), t)))

    return alloc_node(core.Nat(0), guarded, amb)


def force(t: ITree) -> ITree:
    return app_strict(t, core.Nat(0))


class AffineDenoter:
    """Interpret typing derivations as trees over an ambient containing the store."""

    def __init__(self, amb: Ambient = STORE_IO):
        self.amb = amb

    def thunk(self, t: ITree) -> ITree:
        return thunk_protect(t, self.amb)

    @staticmethod
    def restrict(env: Mapping[str, ITree], d: Derivation) -> Dict[str, ITree]:
        return {x: env[x] for x in d.used if x in env}

    def denote(self, d: Derivation, env: Mapping[str, ITree]) -> ITree:
        method = getattr(self, "denote_" + type(d.expr).__name__.lower())
        return method(d, env)

    def denote_lit(self, d, env):
        return core.Nat(d.expr.n)

    def denote_boollit(self, d, env):
        return core.Nat(1 if d.expr.b else 0)

    def denote_unitlit(self, d, env):
        return core.Nat(0)

    def denote_var(self, d, env):
        return force(env[d.expr.name])

    def denote_lam(self, d, env):
        (body,) = d.children
        x = d.expr.xname

        def call(arg):
            inner = dict(env)
            inner[x] = arg
            return self.denote(body, inner)

        return fun_of(call)

    def denote_app(self, d, env):
        fn, arg = d.children
        fn_t = self.denote(fn, self.restrict(env, fn))
        arg_t = self.denote(arg, self.restrict(env, arg))
        return let(arg_t, lambda x: app_strict(fn_t, self.thunk(x)))

    def denote_pair(self, d, env):
        left, right = d.children
        return pair(self.denote(left, self.restrict(env, left)),
                    self.denote(right, self.restrict(env, right)))

    def denote_letpair(self, d, env):
        rhs, body = d.children
        e = d.expr
        rest = {x: t for x, t in env.items() if x not in rhs.used}

        def bind(p):
            def with_both(y, z):
                inner = dict(rest)
                inner[e.x1], inner[e.x2] = y, z
                return self.denote(body, inner)

            return let(self.thunk(proj1(p)), lambda y:
                       let(self.thunk(proj2(p)), lambda z: with_both(y, z)))

        return let(self.denote(rhs, self.restrict(env, rhs)), bind)

    def denote_alloc(self, d, env):
        (init,) = d.children
        return let(self.denote(init, env),
                   lambda x: alloc_node(x, lambda loc: core.Nat(loc.to_nat()), self.amb))

    def denote_dealloc(self, d, env):
        (ref,) = d.children
        return get_nat(self.denote(ref, env),
                       lambda n: dealloc_node(Location.from_nat(n), self.amb))

    def denote_replace(self, d, env):
        ref, value = d.children
        ref_t = self.denote(ref, self.restrict(env, ref))
        value_t = self.denote(value, self.restrict(env, value))

        def swap(y, n):
            loc = Location.from_nat(n)
            return let(read_node(loc, self.amb), lambda old:
                       seq(write_node(loc, y, self.amb), pair(old, core.Nat(n))))

        return let(value_t, lambda y: get_nat(ref_t, lambda n: swap(y, n)))


def denote_aff(d: Derivation, env: Optional[Mapping[str, ITree]] = None,
               amb: Ambient = STORE_IO) -> ITree:
    return AffineDenoter(amb).denote(d, env or {})


# -- surface syntax --------------------------------------------------------

class AffineReader:
    """Build expressions and types from s-expressions."""

    def name(self, x: SExpr) -> str:
        if not isinstance(x, str) or x.startswith("#"):
            raise ParseError(f"expected a variable name, got {dump(x)}")
        return x

    def expr(self, x: SExpr):
        if isinstance(x, int):
            return Lit(x)
        if isinstance(x, str):
            if x == "#t":
                return BoolLit(True)
            if x == "#f":
                return BoolLit(False)
            if x == "unit":
                return UnitLit()
            return Var(self.name(x))
        if not x:
            raise ParseError("empty form")
        return self.form(x[0], x[1:], x)

    def form(self, head, args, whole):
        if head == "lam" and len(args) == 2:
            binder = args[0]
            if isinstance(binder, list):
                if len(binder) != 2:
                    raise ParseError(f"bad binder {dump(binder)}")
                return Lam(self.name(binder[0]), self.expr(args[1]), self.type(binder[1]))
            return Lam(self.name(binder), self.expr(args[1]))
        if head == "app" and len(args) >= 2:
            e = self.expr(args[0])
            for a in args[1:]:
                e = App(e, self.expr(a))
            return e
        if head == "pair" and len(args) == 2:
            return Pair(self.expr(args[0]), self.expr(args[1]))
        if head == "letpair" and len(args) == 4:
            return LetPair(self.name(args[0]), self.name(args[1]),
                           self.expr(args[2]), self.expr(args[3]))
        if head == "alloc" and len(args) == 1:
            return Alloc(self.expr(args[0]))
        if head == "dealloc" and len(args) == 1:
            return Dealloc(self.expr(args[0]))
        if head == "replace" and len(args) == 2:
            return Replace(self.expr(args[0]), self.expr(args[1]))
        raise ParseError(f"bad afflang form: {dump(whole)}")

    def type(self, x: SExpr) -> AffType:
        base = {"nat": ANat(), "bool": ABool(), "unit": AUnit()}
        if isinstance(x, str) and x in base:
            return base[x]
        if isinstance(x, list) and x:
            head, args = x[0], x[1:]
            if head in ("*", "tensor") and len(args) == 2:
                return Tensor(self.type(args[0]), self.type(args[1]))
            if head == "-o" and len(args) >= 2:
                parts = [self.type(a) for a in args]
                t = parts[-1]
                for dom in reversed(parts[:-1]):
                    t = Lolli(dom, t)
                return t
            if head == "ref" and len(args) == 1:
                return Ref(self.type(args[0]))
        raise ParseError(f"bad afflang type: {dump(x)}")


def parse_aff(src: str):
    return AffineReader().expr(parse(src))


def parse_aff_type(src: str) -> AffType:
    return AffineReader().type(parse(src))
