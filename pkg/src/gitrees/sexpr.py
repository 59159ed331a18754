"""A minimal s-expression reader.

Atoms are naturals (``int``) or symbols (``str``). ``;`` starts a comment
that runs to the end of the line.
"""

from __future__ import annotations

import re
from typing import List, Union

SExpr = Union[int, str, List["SExpr"]]

_TOKEN = re.compile(r"\s+|;[^\n]*|\(|\)|[^\s();]+")


class ParseError(Exception):
    pass


def tokenize(src: str) -> List[str]:
    tokens = []
    pos = 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:  # pragma: no cover - the pattern matches any character class
            raise ParseError(f"unexpected character at {pos}")
        tok = m.group()
        pos = m.end()
        if tok.isspace() or tok.startswith(";"):
            continue
        tokens.append(tok)
    return tokens


def _atom(tok: str) -> SExpr:
    if tok.isdigit():
        return int(tok)
    return tok


def parse_all(src: str) -> List[SExpr]:
    stack: List[List[SExpr]] = [[]]
    for tok in tokenize(src):
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if len(stack) == 1:
                raise ParseError("unbalanced ')'")
            done = stack.pop()
            stack[-1].append(done)
        else:
            stack[-1].append(_atom(tok))
    if len(stack) != 1:
        raise ParseError("list not closed")
    return stack[0]


def parse(src: str) -> SExpr:
    forms = parse_all(src)
    if len(forms) != 1:
        raise ParseError(f"expected exactly one form, found {len(forms)}")
    return forms[0]


def dump(x: SExpr) -> str:
    if isinstance(x, list):
        return "(" + " ".join(dump(y) for y in x) + ")"
    return str(x)
