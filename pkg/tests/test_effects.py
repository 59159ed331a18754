import pytest

from gitrees.core import Nat, ShapeError, Vis, later
from gitrees.effects import (
    IO_ONLY, IO_SIG, STORE_IO, STORE_ONLY, STORE_SIG, UNIT, Ambient, Loc, Location,
    LocTree, Num, OpId, OpSpec, Shape, Signature, Tree, alloc_node, dealloc_node,
    embed_signature, expect, input_node, output_node, read_node, shape_of, write_node,
)


def test_shape_of_each_payload():
    assert shape_of(UNIT) is Shape.UNIT
    assert shape_of(Num(3)) is Shape.NUM
    assert shape_of(Loc(Location(0))) is Shape.LOC
    assert shape_of(Tree(later(Nat(0)))) is Shape.TREE
    assert shape_of(LocTree(Location(0), later(Nat(0)))) is Shape.LOC_TREE


def test_expect_raises_on_mismatch():
    with pytest.raises(ShapeError):
        expect(UNIT, Shape.NUM)


def test_location_nat_roundtrip():
    for i in range(5):
        assert Location.from_nat(i).to_nat() == i
    assert Location(0) < Location(1)


def test_signature_rejects_duplicate_ops():
    with pytest.raises(ValueError):
        Signature("bad", (OpSpec("a", Shape.UNIT, Shape.UNIT),) * 2)


def test_embedding_is_injective():
    ids = embed_signature(IO_SIG, [STORE_SIG, IO_SIG])
    ids2 = embed_signature(STORE_SIG, [STORE_SIG, IO_SIG])
    all_ids = list(ids.values()) + list(ids2.values())
    assert len(set(all_ids)) == len(all_ids)
    assert ids["input"] == OpId(1, "input")


def test_embedding_requires_membership():
    with pytest.raises(LookupError):
        embed_signature(IO_SIG, [STORE_SIG])


def test_ambient_lookup():
    assert STORE_IO.op("io", "output") == OpId(1, "output")
    assert IO_ONLY.op("io", "output") == OpId(0, "output")
    assert "store" in STORE_ONLY and "io" not in STORE_ONLY
    assert STORE_IO.spec(OpId(0, "read")).output is Shape.TREE
    assert STORE_IO.index("io") == 1
    with pytest.raises(LookupError):
        IO_ONLY.op("store", "alloc")


def test_node_payload_shapes_match_signature():
    nodes = [input_node(), output_node(3), alloc_node(Nat(0), read_node),
             read_node(Location(0)), write_node(Location(0), Nat(1)),
             dealloc_node(Location(0))]
    for v in nodes:
        assert isinstance(v, Vis)
        assert shape_of(v.payload) is STORE_IO.spec(v.op).input


def test_continuations_check_output_shape():
    with pytest.raises(ShapeError):
        input_node().k(UNIT)
    assert input_node().k(Num(4)).force() == Nat(4)
    assert output_node(1).k(UNIT).force() == Nat(0)
    t = read_node(Location(0)).k(Tree(later(Nat(6)))).force()
    assert t == Nat(6)


def test_alloc_continuation_receives_location():
    node = alloc_node(Nat(1), lambda loc: Nat(loc.index + 10))
    assert node.k(Loc(Location(2))).force() == Nat(12)


def test_io_only_ambient_uses_family_zero():
    assert input_node(IO_ONLY).op == OpId(0, "input")
    assert repr(Ambient([IO_SIG])) == "Ambient(['io'])"
