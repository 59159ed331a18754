"""Embedding closed iolang terms into the affine language.

An embedded term ``(embed e : T' ~ T)`` is type-checked as iolang at
``T'`` and must be related to the affine type ``T`` by the conversion
relation. At run time the iolang denotation is passed through glue code
that converts representations and guards affine resources with thunks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Tuple

from . import afflang, iolang
from .afflang import (
    ABool, AffineChecker, AffineDenoter, AffineReader, AffTypeError, ANat, AUnit,
    Derivation, Lolli, force,
)
from .core import ITree, Nat, app_strict, fun_of, get_nat, ifz, let
from .effects import STORE_IO, Ambient
from .iolang import Arrow, TNat
from .sexpr import ParseError, dump, parse

__all__ = [
    "Conversion", "conv_check", "to_aff", "from_aff", "Embed", "CombinedChecker",
    "derive_comb", "typecheck_comb", "CombinedDenoter", "denote_comb",
    "CombinedReader", "parse_comb",
]


@dataclass(frozen=True)
class Conversion:
    io_side: object
    aff_side: object
    shape: str  # "nat~nat", "nat~unit", "nat~bool" or "fun"
    arg: Optional["Conversion"] = None
    res: Optional["Conversion"] = None


_BASE = {ANat: "nat~nat", AUnit: "nat~unit", ABool: "nat~bool"}


def conv_check(io_ty, aff_ty) -> Optional[Conversion]:
    """Derive ``io_ty ~ aff_ty`` if the relation holds."""
    if isinstance(io_ty, TNat) and type(aff_ty) in _BASE:
        return Conversion(io_ty, aff_ty, _BASE[type(aff_ty)])
    if isinstance(aff_ty, Lolli) and isinstance(io_ty, Arrow):
        thunk_ty = io_ty.dom
        if isinstance(thunk_ty, Arrow) and isinstance(thunk_ty.dom, TNat):
            arg = conv_check(thunk_ty.cod, aff_ty.dom)
            res = conv_check(io_ty.cod, aff_ty.cod)
            if arg is not None and res is not None:
                return Conversion(io_ty, aff_ty, "fun", arg, res)
    return None


def to_aff(c: Conversion, t: ITree, amb: Ambient = STORE_IO) -> ITree:
    """Convert an iolang representation into an affine one."""
    if c.shape == "nat~nat":
        return t
    if c.shape == "nat~bool":
        return ifz(t, Nat(1), Nat(0))
    if c.shape == "nat~unit":
        return get_nat(t, lambda _: Nat(0))

    def wrap(p):
        def call(x):
            return let(from_aff(c.arg, force(x), amb), lambda y:
                       to_aff(c.res, app_strict(p, afflang.thunk_protect(y, amb)), amb))
        return fun_of(call)

    return let(t, wrap)


def from_aff(c: Conversion, t: ITree, amb: Ambient = STORE_IO) -> ITree:
    """Convert an affine representation into an iolang one.

    Affine functions are wrapped so the iolang side can call them once.
    """
    if c.shape in ("nat~nat", "nat~bool", "nat~unit"):
        return t

    def wrap(p):
        def guarded(p_once):
            def call(x):
                return let(force(p_once), lambda f:
                           let(to_aff(c.arg, force(x), amb), lambda y:
                               from_aff(c.res, app_strict(f, afflang.thunk_protect(y, amb)), amb)))
            return fun_of(call)
        return let(afflang.thunk_protect(p, amb), guarded)

    return let(t, wrap)


@dataclass(frozen=True)
class Embed(afflang.AffExpr):
    expr: iolang.IoExpr
    io_type: object
    aff_type: object


class CombinedChecker(AffineChecker):
    def infer_embed(self, env, e):
        if iolang.free_vars(e.expr):
            raise AffTypeError("embedded iolang terms must be closed")
        if iolang.typecheck_io({}, e.expr, expected=e.io_type) is None:
            raise AffTypeError(f"embedded term is not of type {e.io_type}")
        conv = conv_check(e.io_type, e.aff_type)
        if conv is None:
            raise AffTypeError(f"no conversion {e.io_type} ~ {e.aff_type}")
        return Derivation(e, e.aff_type, frozenset(), info={"conversion": conv})


def derive_comb(env, e, expected=None) -> Optional[Derivation]:
    return afflang.derive_aff(env, e, expected, checker_cls=CombinedChecker)


def typecheck_comb(env, e, expected=None) -> Optional[Tuple[object, frozenset]]:
    d = derive_comb(env, e, expected)
    if d is None:
        return None
    return d.type, d.used


class CombinedDenoter(AffineDenoter):
    def denote_embed(self, d, env):
        conv = d.info["conversion"]
        return to_aff(conv, iolang.denote_io(d.expr.expr, {}, self.amb), self.amb)


def denote_comb(d: Derivation, env: Optional[Mapping[str, ITree]] = None,
                amb: Ambient = STORE_IO) -> ITree:
    return CombinedDenoter(amb).denote(d, env or {})


class CombinedReader(AffineReader):
    def form(self, head, args, whole):
        if head == "embed":
            # (embed <io-expr> : <io-type> ~ <aff-type>)
            if len(args) != 5 or args[1] != ":" or args[3] != "~":
                raise ParseError(f"bad embed form: {dump(whole)}")
            return Embed(iolang.from_sexpr(args[0]), iolang.type_from_sexpr(args[2]),
                         self.type(args[4]))
        return super().form(head, args, whole)


def parse_comb(src: str):
    return CombinedReader().expr(parse(src))
