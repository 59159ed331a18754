"""First-order unification over frozen-dataclass type terms.

Both object languages infer the types of unannotated binders with the same
machinery: type constructors are frozen dataclasses whose fields are either
sub-types or plain data, and :class:`TVar` marks an unknown.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, fields, is_dataclass, replace
from typing import Dict

_counter = itertools.count()


class UnifyError(Exception):
    pass


@dataclass(frozen=True)
class TVar:
    id: int

    @classmethod
    def fresh(cls) -> "TVar":
        return cls(next(_counter))

    def __str__(self):
        return f"?{self.id}"


def _children(t):
    return [(f.name, getattr(t, f.name)) for f in fields(t)
            if is_dataclass(getattr(t, f.name))]


class Subst:
    def __init__(self):
        self.binding: Dict[TVar, object] = {}

    def resolve(self, t):
        while isinstance(t, TVar) and t in self.binding:
            t = self.binding[t]
        return t

    def apply(self, t):
        t = self.resolve(t)
        if isinstance(t, TVar) or not is_dataclass(t):
            return t
        kids = _children(t)
        if not kids:
            return t
        return replace(t, **{name: self.apply(sub) for name, sub in kids})

    def occurs(self, v: TVar, t) -> bool:
        t = self.resolve(t)
        if t == v:
            return True
        if isinstance(t, TVar) or not is_dataclass(t):
            return False
        return any(self.occurs(v, sub) for _, sub in _children(t))

    def unify(self, a, b) -> None:
        a, b = self.resolve(a), self.resolve(b)
        if a == b:
            return
        if isinstance(a, TVar):
            if self.occurs(a, b):
                raise UnifyError(f"infinite type {a} ~ {b}")
            self.binding[a] = b
            return
        if isinstance(b, TVar):
            self.unify(b, a)
            return
        if type(a) is not type(b):
            raise UnifyError(f"cannot unify {a} with {b}")
        ka, kb = _children(a), _children(b)
        plain_a = [(f.name, getattr(a, f.name)) for f in fields(a) if not is_dataclass(getattr(a, f.name))]
        plain_b = [(f.name, getattr(b, f.name)) for f in fields(b) if not is_dataclass(getattr(b, f.name))]
        if plain_a != plain_b or len(ka) != len(kb):
            raise UnifyError(f"cannot unify {a} with {b}")
        for (_, x), (_, y) in zip(ka, kb):
            self.unify(x, y)

    def default(self, t, ground):
        """Apply the substitution and replace leftover variables by ``ground``."""
        t = self.apply(t)
        if isinstance(t, TVar):
            return ground
        if not is_dataclass(t):
            return t
        kids = _children(t)
        if not kids:
            return t
        return replace(t, **{name: self.default(sub, ground) for name, sub in kids})
