"""Effect signatures, the payload universe and effect-node constructors.

Operation inputs and outputs range over a small closed set of payload
shapes (unit, number, location, suspended tree, location with suspended
tree); that is all the I/O and store signatures need.

Programs never hard-code where a family sits in the global signature.
Constructors take an :class:`Ambient` describing the global family list
and look the op id up through it, so the same program builder works in a
store-only, I/O-only or combined setting.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import total_ordering
from typing import Callable, Dict, Sequence, Tuple

from .core import ITree, Nat, ShapeError, Suspension, Vis, later

__all__ = [
    "Shape", "Location", "Payload", "UNIT", "Unit", "Num", "Loc", "Tree", "LocTree",
    "shape_of", "OpSpec", "Signature", "OpId", "IO_SIG", "STORE_SIG",
    "embed_signature", "Ambient", "STORE_IO", "IO_ONLY", "STORE_ONLY",
    "input_node", "output_node", "alloc_node", "read_node", "write_node",
    "dealloc_node", "ShapeError",
]


class Shape(enum.Enum):
    UNIT = "unit"
    NUM = "num"
    LOC = "loc"
    TREE = "tree"
    LOC_TREE = "loc*tree"


@total_ordering
@dataclass(frozen=True)
class Location:
    index: int

    def __lt__(self, other):
        return self.index < other.index

    def to_nat(self) -> int:
        return self.index

    @classmethod
    def from_nat(cls, n: int) -> "Location":
        return cls(n)

    def __str__(self):
        return f"loc{self.index}"


class Payload:
    __slots__ = ()


@dataclass(frozen=True)
class Unit(Payload):
    pass


UNIT = Unit()


@dataclass(frozen=True)
class Num(Payload):
    n: int


@dataclass(frozen=True)
class Loc(Payload):
    loc: Location


@dataclass(frozen=True)
class Tree(Payload):
    t: Suspension


@dataclass(frozen=True)
class LocTree(Payload):
    loc: Location
    t: Suspension


_SHAPES = {Unit: Shape.UNIT, Num: Shape.NUM, Loc: Shape.LOC,
           Tree: Shape.TREE, LocTree: Shape.LOC_TREE}


def shape_of(p: Payload) -> Shape:
    try:
        return _SHAPES[type(p)]
    except KeyError:
        raise ShapeError(f"not a payload: {p!r}") from None


def expect(p: Payload, shape: Shape) -> Payload:
    if shape_of(p) is not shape:
        raise ShapeError(f"expected a {shape.value} payload, got {p!r}")
    return p


@dataclass(frozen=True)
class OpSpec:
    name: str
    input: Shape
    output: Shape


@dataclass(frozen=True)
class Signature:
    name: str
    ops: Tuple[OpSpec, ...]

    def __post_init__(self):
        names = [op.name for op in self.ops]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate op names in signature {self.name!r}")

    def spec(self, op: str) -> OpSpec:
        for s in self.ops:
            if s.name == op:
                return s
        raise KeyError(f"{self.name} has no op {op!r}")


@dataclass(frozen=True, order=True)
class OpId:
    family: int
    name: str

    def __str__(self):
        return f"{self.family}.{self.name}"


IO_SIG = Signature("io", (
    OpSpec("input", Shape.UNIT, Shape.NUM),
    OpSpec("output", Shape.NUM, Shape.UNIT),
))

STORE_SIG = Signature("store", (
    OpSpec("alloc", Shape.TREE, Shape.LOC),
    OpSpec("read", Shape.LOC, Shape.TREE),
    OpSpec("write", Shape.LOC_TREE, Shape.UNIT),
    OpSpec("dealloc", Shape.LOC, Shape.UNIT),
))


def embed_signature(local: Signature, families: Sequence[Signature]) -> Dict[str, OpId]:
    """Map each op of ``local`` to its id in the sum of ``families``."""
    for i, fam in enumerate(families):
        if fam == local:
            return {op.name: OpId(i, op.name) for op in local.ops}
    raise LookupError(f"signature {local.name!r} is not part of "
                      f"{[f.name for f in families]}")


class Ambient:
    """The global signature a program is built against."""

    def __init__(self, families: Sequence[Signature]):
        self.families = tuple(families)
        self._ids: Dict[Tuple[str, str], OpId] = {}
        for fam in self.families:
            for name, oid in embed_signature(fam, self.families).items():
                self._ids[fam.name, name] = oid

    def op(self, family: str, name: str) -> OpId:
        try:
            return self._ids[family, name]
        except KeyError:
            raise LookupError(f"ambient signature lacks {family}.{name}") from None

    def spec(self, op: OpId) -> OpSpec:
        return self.families[op.family].spec(op.name)

    def family_name(self, op: OpId) -> str:
        return self.families[op.family].name

    def index(self, family: str) -> int:
        for i, fam in enumerate(self.families):
            if fam.name == family:
                return i
        raise LookupError(f"ambient signature lacks family {family!r}")

    def __contains__(self, family: str) -> bool:
        return any(f.name == family for f in self.families)

    def __repr__(self):
        return f"Ambient({[f.name for f in self.families]})"


STORE_IO = Ambient((STORE_SIG, IO_SIG))
IO_ONLY = Ambient((IO_SIG,))
STORE_ONLY = Ambient((STORE_SIG,))


# -- effect-node constructors ----------------------------------------------

def _const_zero(y: Payload) -> Suspension:
    expect(y, Shape.UNIT)
    return later(Nat(0))


def input_node(amb: Ambient = STORE_IO) -> ITree:
    def k(y):
        return later(Nat(expect(y, Shape.NUM).n))

    return Vis(amb.op("io", "input"), UNIT, k)


def output_node(n: int, amb: Ambient = STORE_IO) -> ITree:
    return Vis(amb.op("io", "output"), Num(n), _const_zero)


def alloc_node(init: ITree, k: Callable[[Location], ITree], amb: Ambient = STORE_IO) -> ITree:
    def cont(y):
        return later(k(expect(y, Shape.LOC).loc))

    return Vis(amb.op("store", "alloc"), Tree(later(init)), cont)


def _read_cont(y: Payload) -> Suspension:
    return expect(y, Shape.TREE).t


def read_node(loc: Location, amb: Ambient = STORE_IO) -> ITree:
    return Vis(amb.op("store", "read"), Loc(loc), _read_cont)


def write_node(loc: Location, value: ITree, amb: Ambient = STORE_IO) -> ITree:
    return Vis(amb.op("store", "write"), LocTree(loc, later(value)), _const_zero)


def dealloc_node(loc: Location, amb: Ambient = STORE_IO) -> ITree:
    return Vis(amb.op("store", "dealloc"), Loc(loc), _const_zero)
