"""Example trees written directly against the combinators."""

from __future__ import annotations

import operator

from .core import ITree, Nat, get_nat, let, monus, natop, seq, while_loop
from .effects import (
    STORE_IO, Ambient, Location, alloc_node, input_node, output_node, read_node,
    write_node,
)

__all__ = ["fact", "fact_body", "fact_io"]


def fact_body(acc: Location, ell: Location, amb: Ambient = STORE_IO) -> ITree:
    """Loop multiplying ``acc`` by ``ell`` and decrementing ``ell`` until zero."""
    read = lambda loc: read_node(loc, amb)  # noqa: E731
    body = let(read(ell), lambda i:
               let(natop(operator.mul, i, read(acc)), lambda r:
                   let(natop(monus, i, Nat(1)), lambda i2:
                       seq(write_node(acc, r, amb), write_node(ell, i2, amb)))))
    return while_loop(read(ell), body)


def fact(n: int, amb: Ambient = STORE_IO) -> ITree:
    return alloc_node(Nat(1), lambda acc:
                      alloc_node(Nat(n), lambda ell:
                                 seq(fact_body(acc, ell, amb), read_node(acc, amb)),
                                 amb),
                      amb)


def fact_io(amb: Ambient = STORE_IO) -> ITree:
    """Read ``k`` from the input tape and write ``k!`` to the output tape."""
    return get_nat(get_nat(input_node(amb), lambda k: fact(k, amb)),
                   lambda n: output_node(n, amb))
