"""Reifiers: pure partial state transformers that give effects meaning.

A local reifier interprets one effect family over its own state. A
:class:`GlobalReifier` is the product of local reifiers in family order;
each op only touches its own component of the :class:`GlobalState`.
Failure is ``None`` at this layer and becomes ``Err(RunTime)`` in
:func:`reify`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Callable, Mapping, Optional, Sequence, Tuple

from .core import RUNTIME, Err, ITree, Suspension, Tau, Vis
from .effects import (
    IO_SIG, STORE_SIG, UNIT, Ambient, Loc, Location, Num, OpId, Payload, Shape,
    Signature, Tree, expect,
)

__all__ = [
    "IoState", "HeapState", "Reifier", "GlobalState", "GlobalReifier",
    "io_reifier", "store_reifier", "combine_reifiers", "reify", "reifier_for",
]

StepResult = Optional[Tuple[Payload, object]]


@dataclass(frozen=True)
class IoState:
    inputs: Tuple[int, ...] = ()
    # Most recent output first.
    outputs: Tuple[int, ...] = ()

    @classmethod
    def of(cls, inputs=(), outputs=()) -> "IoState":
        return cls(tuple(inputs), tuple(outputs))

    def summary(self) -> str:
        return f"io(in={len(self.inputs)},out={len(self.outputs)})"


@dataclass(frozen=True)
class HeapState:
    cells: Mapping[Location, Suspension] = field(default_factory=lambda: MappingProxyType({}))

    @classmethod
    def of(cls, cells: Optional[Mapping[Location, Suspension]] = None) -> "HeapState":
        return cls(MappingProxyType(dict(cells or {})))

    def __eq__(self, other):
        if not isinstance(other, HeapState):
            return NotImplemented
        # suspensions compare by identity
        return dict(self.cells) == dict(other.cells)

    def __hash__(self):
        return hash(frozenset(self.cells.items()))

    def domain(self) -> Tuple[int, ...]:
        return tuple(sorted(loc.index for loc in self.cells))

    def fresh(self) -> Location:
        taken = {loc.index for loc in self.cells}
        i = 0
        while i in taken:
            i += 1
        return Location(i)

    def set(self, loc: Location, t: Suspension) -> "HeapState":
        cells = dict(self.cells)
        cells[loc] = t
        return HeapState(MappingProxyType(cells))

    def remove(self, loc: Location) -> "HeapState":
        cells = dict(self.cells)
        del cells[loc]
        return HeapState(MappingProxyType(cells))

    def summary(self) -> str:
        return "heap{" + ",".join(map(str, self.domain())) + "}"


@dataclass(frozen=True)
class Reifier:
    signature: Signature
    initial: object
    step: Callable[[str, Payload, object], StepResult]


def _io_step(op: str, x: Payload, st: IoState) -> StepResult:
    if op == "input":
        expect(x, Shape.UNIT)
        if not st.inputs:
            return None
        return Num(st.inputs[0]), IoState(st.inputs[1:], st.outputs)
    if op == "output":
        n = expect(x, Shape.NUM).n
        return UNIT, IoState(st.inputs, (n,) + st.outputs)
    return None


def _store_step(op: str, x: Payload, st: HeapState) -> StepResult:
    if op == "alloc":
        loc = st.fresh()
        return Loc(loc), st.set(loc, expect(x, Shape.TREE).t)
    if op == "read":
        loc = expect(x, Shape.LOC).loc
        if loc not in st.cells:
            return None
        return Tree(st.cells[loc]), st
    if op == "write":
        x = expect(x, Shape.LOC_TREE)
        if x.loc not in st.cells:
            return None
        return UNIT, st.set(x.loc, x.t)
    if op == "dealloc":
        loc = expect(x, Shape.LOC).loc
        if loc not in st.cells:
            return None
        return UNIT, st.remove(loc)
    return None


def io_reifier(inputs: Sequence[int] = ()) -> Reifier:
    return Reifier(IO_SIG, IoState.of(inputs), _io_step)


def store_reifier() -> Reifier:
    return Reifier(STORE_SIG, HeapState.of(), _store_step)


@dataclass(frozen=True)
class GlobalState:
    locals: Tuple[object, ...]

    def __getitem__(self, i: int):
        return self.locals[i]

    def with_local(self, i: int, st) -> "GlobalState":
        parts = list(self.locals)
        parts[i] = st
        return GlobalState(tuple(parts))

    def summary(self) -> str:
        return " ".join(getattr(s, "summary", lambda: repr(s))() for s in self.locals)


class GlobalReifier:
    """Product of local reifiers, dispatching on the op's family index."""

    def __init__(self, reifiers: Sequence[Reifier]):
        self.reifiers = tuple(reifiers)
        self.ambient = Ambient([r.signature for r in self.reifiers])

    def initial_state(self, **overrides) -> GlobalState:
        """Initial product state; ``overrides`` replace components by family name."""
        parts = []
        for r in self.reifiers:
            parts.append(overrides.pop(r.signature.name, r.initial))
        if overrides:
            raise KeyError(f"unknown families: {sorted(overrides)}")
        return GlobalState(tuple(parts))

    def step(self, op: OpId, x: Payload, st: GlobalState) -> Optional[Tuple[Payload, GlobalState]]:
        if not 0 <= op.family < len(self.reifiers):
            return None
        out = self.reifiers[op.family].step(op.name, x, st[op.family])
        if out is None:
            return None
        y, local = out
        return y, st.with_local(op.family, local)

    def local(self, st: GlobalState, family: str):
        return st[self.ambient.index(family)]

    def family_name(self, op: OpId) -> str:
        if 0 <= op.family < len(self.reifiers):
            return self.reifiers[op.family].signature.name
        return f"#{op.family}"


def combine_reifiers(rs: Sequence[Reifier]) -> GlobalReifier:
    return GlobalReifier(rs)


def reifier_for(amb: Ambient, inputs: Sequence[int] = ()) -> GlobalReifier:
    """The standard global reifier matching an ambient signature."""
    makers = {"io": lambda: io_reifier(inputs), "store": store_reifier}
    return GlobalReifier([makers[f.name]() for f in amb.families])


def reify(t: ITree, st: GlobalState, reifier: GlobalReifier) -> Tuple[ITree, GlobalState]:
    """Run one effect node against the state: ``(Tick(k y), σ')`` or ``(Err, σ)``."""
    if not isinstance(t, Vis):
        raise ValueError(f"reify expects a Vis node, got {type(t).__name__}")
    out = reifier.step(t.op, t.payload, st)
    if out is None:
        return Err(RUNTIME), st
    y, st2 = out
    return Tau(t.k(y)), st2
