import pytest

from ccsp.graph import EdgeKind, EdgeLabeledGraph
from ccsp.model import Algebra, Instance, InvalidArgument, Relation
from ccsp.structure import (
    as_components,
    find_path,
    is_as_component,
    is_connected,
    is_linked,
    is_relation_consistent_collection,
    is_semilattice_free,
    lev,
    sa_digraph,
    strands_of_instance,
    strands_of_relation,
    tuple_edge,
)


def test_as_components(a3_graph: EdgeLabeledGraph) -> None:
    dg = sa_digraph([0, 1, 2], a3_graph)
    assert set(dg.edges) == {(0, 1), (1, 2), (2, 1)}

    assert as_components([0, 1, 2], a3_graph) == [frozenset({1, 2})]
    assert as_components([0, 2], a3_graph) == [frozenset({0}), frozenset({2})]
    assert as_components([0, 1], a3_graph) == [frozenset({1})]
    assert as_components([], a3_graph) == []

    assert is_as_component({1, 2}, [0, 1, 2], a3_graph)
    assert not is_as_component({0}, [0, 1, 2], a3_graph)


def test_semilattice_free(a3_algebra: Algebra, a3_graph: EdgeLabeledGraph) -> None:
    assert is_semilattice_free([0, 2], a3_graph)
    assert is_semilattice_free([1, 2], a3_graph)
    assert not is_semilattice_free([0, 1, 2], a3_graph)

    inst = Instance(a3_algebra, ["x", "y"], {"x": [0, 2], "y": [1, 2]})
    assert is_semilattice_free(inst, a3_graph)
    assert lev(inst, a3_graph) == 0

    inst = Instance(a3_algebra, ["x", "y"], {"x": [0, 1], "y": [0, 1, 2]})
    assert not is_semilattice_free(inst, a3_graph)
    assert lev(inst, a3_graph) == 3


def test_tuple_edge(a3_graph: EdgeLabeledGraph) -> None:
    assert tuple_edge((0, 0), (1, 0), a3_graph) is EdgeKind.semilattice
    assert tuple_edge((1, 0), (0, 0), a3_graph) is None
    assert tuple_edge((1, 2), (2, 1), a3_graph) is EdgeKind.affine
    assert tuple_edge((0, 2), (2, 0), a3_graph) is EdgeKind.majority
    assert tuple_edge((0, 1), (1, 2), a3_graph) is None
    assert tuple_edge((1, 1), (1, 1), a3_graph) is None
    with pytest.raises(InvalidArgument):
        tuple_edge((0,), (0, 1), a3_graph)


def test_find_path(a3_graph: EdgeLabeledGraph) -> None:
    full = Relation.full([[0, 1], [1, 2]])
    path = find_path(full, a3_graph, (0, 1), (1, 2))
    assert path is not None
    assert path[0] == (0, 1) and path[-1] == (1, 2)
    assert len(path) == 3
    for a, b in zip(path, path[1:]):
        assert tuple_edge(a, b, a3_graph) in (EdgeKind.semilattice, EdgeKind.affine)

    assert find_path(full, a3_graph, (1, 2), (0, 1)) is None
    assert find_path(full, a3_graph, (1, 1), (1, 1)) == [(1, 1)]

    with pytest.raises(InvalidArgument):
        find_path(full, a3_graph, (2, 2), (1, 1))
    with pytest.raises(InvalidArgument):
        find_path(full, a3_graph, (0, 1), (1, 2), within=[(0, 1)])


def test_connectivity(a3_graph: EdgeLabeledGraph) -> None:
    full = Relation.full([[0, 1], [1, 2]])
    assert not is_connected(full, a3_graph)
    assert is_connected(full, a3_graph, [(1, 1), (1, 2), (2, 1), (2, 2)])
    assert is_connected(full, a3_graph, [(0, 1)])
    # 0 and 2 only meet through a majority edge
    assert not is_connected(Relation([(0,), (2,)]), a3_graph)


def test_strands_of_relation() -> None:
    r = Relation([(1, 1), (1, 2)])
    assert strands_of_relation(r, [{1}, {1, 2}]) == [frozenset({0, 1})]
    assert strands_of_relation(r, [{1}, {2}]) == [frozenset({0}), frozenset({1})]

    eq = Relation([(1, 1, 0), (2, 2, 0), (0, 0, 2)])
    assert strands_of_relation(eq, [{1, 2}, {1, 2}, {0}]) == [frozenset({0, 1, 2})]
    assert strands_of_relation(eq, [{1, 2}, {1, 2}, {2}]) == [frozenset({0, 1}), frozenset({2})]

    with pytest.raises(InvalidArgument):
        strands_of_relation(r, [{1}])
    with pytest.raises(InvalidArgument):
        strands_of_relation(r, [{0}, {1}])


def test_strands_of_instance(a3_algebra: Algebra) -> None:
    eq = Relation([(1, 1), (2, 2)])
    inst = Instance(
        a3_algebra,
        ["x", "y", "z"],
        {"x": [1, 2], "y": [1, 2], "z": [1, 2]},
        [(("y", "x"), eq)],
    )
    collection = {"x": {1, 2}, "y": {1, 2}, "z": {1, 2}}
    assert strands_of_instance(inst, collection) == [frozenset({"x", "y"}), frozenset({"z"})]

    collection = {"x": {1}, "y": {1, 2}, "z": {2}}
    assert strands_of_instance(inst, collection) == [
        frozenset({"x"}),
        frozenset({"y"}),
        frozenset({"z"}),
    ]


def test_is_linked() -> None:
    assert is_linked(Relation([(0, 0), (0, 1), (1, 1)]))
    assert not is_linked(Relation([(0, 0), (1, 1)]))
    assert not is_linked(Relation([], arity=2))
    with pytest.raises(InvalidArgument):
        is_linked(Relation([(0, 0, 0)]))


def test_relation_consistent_collection() -> None:
    r = Relation([(0, 1), (1, 0)])
    assert is_relation_consistent_collection(r, [{0}, {1}])
    assert not is_relation_consistent_collection(r, [{0}, {0}])
    with pytest.raises(InvalidArgument):
        is_relation_consistent_collection(r, [{0}])
