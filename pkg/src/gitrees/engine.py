"""Fuel-bounded reduction of trees against a global reifier."""

from __future__ import annotations

import enum
import sys
from dataclasses import dataclass, field
from typing import FrozenSet, Iterable, List, Optional, Tuple

from .core import Err, ErrorKind, Fun, ITree, Nat, ShapeError, Tau, Vis
from .reifiers import GlobalReifier, GlobalState, reify

__all__ = [
    "DEFAULT_FUEL", "OutcomeKind", "Outcome", "StepKind", "TraceEntry", "Trace",
    "istep", "run", "observe", "Observation",
]

DEFAULT_FUEL = 10 ** 6

# Deeply nested evaluation contexts force through one Python frame per layer.
if sys.getrecursionlimit() < 20000:
    sys.setrecursionlimit(20000)


class OutcomeKind(enum.Enum):
    VALUE = "value"
    ERROR = "error"
    OUT_OF_FUEL = "out-of-fuel"
    STUCK = "stuck"


@dataclass(frozen=True)
class Outcome:
    kind: OutcomeKind
    tree: ITree
    state: GlobalState
    steps: int
    # Only meaningful for ERROR: the error kind is in the allowed set.
    acceptable: bool = True

    @property
    def value(self) -> Optional[ITree]:
        return self.tree if self.kind is OutcomeKind.VALUE else None

    @property
    def error(self) -> Optional[ErrorKind]:
        return self.tree.kind if self.kind is OutcomeKind.ERROR else None

    @property
    def is_violation(self) -> bool:
        return self.kind is OutcomeKind.STUCK or (
            self.kind is OutcomeKind.ERROR and not self.acceptable)


class StepKind(enum.Enum):
    TAU = "TAU"
    EFF = "EFF"


@dataclass(frozen=True)
class TraceEntry:
    index: int
    kind: StepKind
    op: Optional[str]
    state: GlobalState

    def render(self) -> str:
        what = "TAU" if self.kind is StepKind.TAU else f"EFF {self.op}"
        return f"#{self.index} {what} | state: {self.state.summary()}"


@dataclass
class Trace:
    entries: List[TraceEntry] = field(default_factory=list)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def render(self) -> str:
        return "\n".join(e.render() for e in self.entries)


def istep(t: ITree, st: GlobalState, reifier: GlobalReifier) -> Optional[Tuple[ITree, GlobalState]]:
    """One internal step: strip a ``Tau`` or reify an effect.

    Values and errors have no successor. A failing reification steps to
    ``Err(RunTime)``. Raises :class:`ShapeError` on ill-shaped payloads.
    """
    if isinstance(t, Tau):
        return t.next.force(), st
    if isinstance(t, Vis):
        out, st2 = reify(t, st, reifier)
        if isinstance(out, Tau):
            return out.next.force(), st2
        return out, st2
    return None


def run(t: ITree, st: GlobalState, reifier: GlobalReifier, fuel: int = DEFAULT_FUEL,
        allowed_errors: Iterable[ErrorKind] = (), record: bool = True) -> Tuple[Outcome, Trace]:
    if fuel < 0:
        raise ValueError("fuel must be non-negative")
    allowed: FrozenSet[ErrorKind] = frozenset(allowed_errors)
    trace = Trace()
    steps = 0
    while True:
        if isinstance(t, (Nat, Fun)):
            return Outcome(OutcomeKind.VALUE, t, st, steps), trace
        if isinstance(t, Err):
            return Outcome(OutcomeKind.ERROR, t, st, steps, t.kind in allowed), trace
        if steps >= fuel:
            return Outcome(OutcomeKind.OUT_OF_FUEL, t, st, steps), trace
        try:
            nxt = istep(t, st, reifier)
        except ShapeError:
            nxt = None
        if nxt is None:
            return Outcome(OutcomeKind.STUCK, t, st, steps), trace
        if record:
            if isinstance(t, Vis):
                entry = TraceEntry(steps, StepKind.EFF,
                                   f"{reifier.family_name(t.op)}.{t.op.name}", nxt[1])
            else:
                entry = TraceEntry(steps, StepKind.TAU, None, nxt[1])
            trace.entries.append(entry)
        t, st = nxt
        steps += 1


@dataclass(frozen=True)
class Observation:
    """What a run looks like from outside: result head and state summary."""

    kind: OutcomeKind
    result: object  # int for Nat, "fun", or the error tag
    state: Tuple


def _state_key(st: GlobalState) -> Tuple:
    parts = []
    for s in st.locals:
        domain = getattr(s, "domain", None)
        parts.append(domain() if domain else s)
    return tuple(parts)


def observe(t: ITree, st: GlobalState, reifier: GlobalReifier,
            fuel: int = 10 ** 4) -> Observation:
    """Run ``t`` and summarise the outcome for observational comparison.

    Heaps are compared by domain only; stored trees are not comparable.
    """
    out, _ = run(t, st, reifier, fuel, record=False)
    if out.kind is OutcomeKind.VALUE:
        result = out.tree.n if isinstance(out.tree, Nat) else "fun"
    elif out.kind is OutcomeKind.ERROR:
        result = out.tree.kind.tag
    else:
        result = None
    return Observation(out.kind, result, _state_key(out.state))
