import pytest
from hypothesis import given
from hypothesis import strategies as st

from gitrees.iolang import Arrow, TNat
from gitrees.sexpr import ParseError, dump, parse, parse_all, tokenize
from gitrees.unify import Subst, TVar, UnifyError

atoms = st.one_of(st.integers(0, 1000), st.sampled_from(["x", "rec", "+", "-o", "#t", "->"]))
sexprs = st.recursive(atoms, lambda sub: st.lists(sub, max_size=4), max_leaves=12)


@given(sexprs)
def test_dump_parse_roundtrip(x):
    assert parse(dump(x)) == x


def test_comments_and_whitespace():
    assert tokenize("; tape: 1\n(a  1) ; trailing") == ["(", "a", "1", ")"]
    assert parse_all("1 (2) x") == [1, [2], "x"]


@pytest.mark.parametrize("src", ["(", ")", "(a))", "", "1 2"])
def test_parse_errors(src):
    with pytest.raises(ParseError):
        parse(src)


def test_unify_binds_and_defaults():
    s = Subst()
    a, b = TVar.fresh(), TVar.fresh()
    s.unify(Arrow(a, b), Arrow(TNat(), a))
    assert s.apply(Arrow(a, b)) == Arrow(TNat(), TNat())
    c = TVar.fresh()
    assert s.default(Arrow(c, a), TNat()) == Arrow(TNat(), TNat())


def test_unify_occurs_check_and_clash():
    s = Subst()
    a = TVar.fresh()
    with pytest.raises(UnifyError):
        s.unify(a, Arrow(a, TNat()))
    with pytest.raises(UnifyError):
        s.unify(TNat(), Arrow(TNat(), TNat()))
