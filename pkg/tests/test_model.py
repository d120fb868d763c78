from typing import Tuple

import numpy as np
import pytest

from ccsp.graph import EdgeLabeledGraph
from ccsp.model import (
    Algebra,
    Constraint,
    Instance,
    InvalidArgument,
    Relation,
    SolveResult,
    apply_componentwise,
    close_under_ops,
    closure_witness,
    is_subdirect,
    preserves,
    project,
    validate_instance,
)
from ccsp.structure import strands_of_relation


def test_relation_signature() -> None:
    r = Relation([(0, 1), (1, 1)])
    assert r.arity == 2
    assert r.signature == (frozenset({0, 1}), frozenset({1}))
    assert (0, 1) in r
    assert len(r) == 2
    assert is_subdirect(r)

    r = Relation([(0, 1)], signature=[[0, 1], [0, 1]])
    assert not r.is_subdirect()

    with pytest.raises(InvalidArgument):
        Relation([(0, 2)], signature=[[0, 1], [0, 1]])

    with pytest.raises(InvalidArgument):
        Relation([])

    with pytest.raises(InvalidArgument):
        Relation([(0, 1), (0,)])

    empty = Relation([], arity=3)
    assert empty.arity == 3
    assert empty.array.shape == (0, 3)


def test_relation_full_and_restrict() -> None:
    r = Relation.full([[0, 1], [2]])
    assert r.rows() == [(0, 2), (1, 2)]
    s = r.restrict([[1], [2]])
    assert s.rows() == [(1, 2)]
    assert s.signature == (frozenset({1}), frozenset({2}))
    with pytest.raises(InvalidArgument):
        r.restrict([[0]])


def test_project() -> None:
    r = Relation([(0, 0, 1), (0, 1, 0), (1, 0, 0)])
    assert project(r, [1, 2]).tuples == {(0, 0), (0, 1), (1, 0)}
    assert project(r, [0, 1]).tuples == {(0, 0), (0, 1), (1, 0)}
    assert project(r, [2, 0]).tuples == {(1, 0), (0, 0), (0, 1)}

    with pytest.raises(InvalidArgument):
        project(r, [])
    with pytest.raises(InvalidArgument):
        project(r, [0, 0])
    with pytest.raises(InvalidArgument):
        project(r, [3])


def test_apply_componentwise(
    a3_algebra: Algebra, affine2: Tuple[Algebra, EdgeLabeledGraph]
) -> None:
    f = a3_algebra.f
    assert apply_componentwise(f, (1, 2), (1, 2)) == (1, 2)
    assert apply_componentwise(f, (0, 2), (1, 0)) == (1, 2)

    algebra, _ = affine2
    for t in [(0, 1), (1, 1)]:
        for s in [(0, 0), (1, 0)]:
            assert apply_componentwise(algebra.h, t, t, s) == s

    with pytest.raises(InvalidArgument):
        apply_componentwise(f, (0, 1), (1,))
    with pytest.raises(InvalidArgument):
        apply_componentwise(f, (0, 1))


def test_close_under_ops(a3_algebra: Algebra) -> None:
    assert close_under_ops([(1, 1)], a3_algebra).tuples == {(1, 1)}

    full = Relation.full([[0, 2], [1, 2]])
    assert close_under_ops(full.rows(), a3_algebra) == full

    closed = close_under_ops([(1, 1), (2, 2), (1, 0)], a3_algebra)
    assert (1, 2) in closed
    for _, table in a3_algebra.items():
        assert preserves(table, closed)

    with pytest.raises(InvalidArgument):
        close_under_ops([], a3_algebra)
    with pytest.raises(InvalidArgument):
        close_under_ops([(0,), (0, 1)], a3_algebra)


def test_closure_witness(a3_algebra: Algebra) -> None:
    r = Relation([(0, 1), (1, 0)])
    witness = closure_witness(r, a3_algebra.f)
    assert witness is not None
    assert apply_componentwise(a3_algebra.f, *witness) not in r
    assert not preserves(a3_algebra.f, r)


def test_algebra_checks(a3_algebra: Algebra) -> None:
    assert a3_algebra.violations() == []
    assert Algebra.projections(4).violations() == []

    f = np.array(a3_algebra.f)
    f[0, 1] = 2
    with pytest.raises(InvalidArgument):
        Algebra(f, a3_algebra.p, a3_algebra.g, a3_algebra.h)

    bad = Algebra(f, a3_algebra.p, a3_algebra.g, a3_algebra.h, check=False)
    assert "conservative" in {v.law for v in bad.violations()}

    g = np.array(a3_algebra.g)
    g[1, 1, 1] = 0
    bad = Algebra(a3_algebra.f, a3_algebra.p, g, a3_algebra.h, check=False)
    assert "idempotent" in {v.law for v in bad.violations()}

    with pytest.raises(InvalidArgument):
        Algebra(a3_algebra.f, a3_algebra.p, a3_algebra.f, a3_algebra.h)

    assert not a3_algebra.f.flags.writeable
    assert a3_algebra.table("g") is a3_algebra.g
    with pytest.raises(InvalidArgument):
        a3_algebra.table("m")


def test_constraint_normalized() -> None:
    c = Constraint(("x", "x", "y"), Relation([(0, 0, 1), (0, 1, 1), (1, 1, 0)]))
    n = c.normalized()
    assert n.scope == ("x", "y")
    assert n.relation.tuples == {(0, 1), (1, 0)}
    assert n.is_satisfied({"x": 1, "y": 0})
    assert not n.is_satisfied({"x": 0, "y": 0})


def test_instance(a3_algebra: Algebra) -> None:
    neq = Relation([(0, 1), (1, 0)], signature=[[0, 1], [0, 1]])
    inst = Instance(a3_algebra, ["x", "y"], {"x": [0, 1], "y": [0, 1]}, [(("x", "y"), neq)])
    assert inst.summ == 4
    assert inst.is_solution({"x": 0, "y": 1})
    assert not inst.is_solution({"x": 0, "y": 0})
    assert not inst.is_solution({"x": 0})

    smaller = inst.restrict({"x": [0]})
    assert smaller.domains["x"] == {0}
    assert smaller.constraints[0].relation.tuples == {(0, 1)}
    assert smaller.summ == 3

    with pytest.raises(InvalidArgument):
        Instance(a3_algebra, ["x", "x"], {"x": [0]})
    with pytest.raises(InvalidArgument):
        Instance(a3_algebra, ["x"], {"x": [0]}, [(("x", "z"), neq)])
    with pytest.raises(InvalidArgument):
        Instance(a3_algebra, ["x"], {"x": [0]}, [(("x",), neq)])


def test_validate_instance(a3_algebra: Algebra) -> None:
    full = Relation.full([[0, 1, 2], [1, 2]])
    ok = Instance(a3_algebra, ["x", "y"], {"x": [0, 1, 2], "y": [1, 2]}, [(("x", "y"), full)])
    assert validate_instance(ok) == []

    swap = Relation([(0, 1), (1, 0)])
    not_closed = Instance(a3_algebra, ["x", "y"], {"x": [0, 1], "y": [0, 1]}, [(("x", "y"), swap)])
    assert {v.law for v in validate_instance(not_closed)} == {"closure"}

    outside = Instance(a3_algebra, ["x"], {"x": [0]}, [(("x",), Relation([(1,)]))])
    assert {v.law for v in validate_instance(outside)} == {"constraint"}

    empty = Instance(a3_algebra, ["x"], {"x": []})
    assert [v.law for v in validate_instance(empty)] == ["domain"]


def test_instance_signatures_follow_domains(a3_algebra: Algebra) -> None:
    inst = Instance(a3_algebra, ["z"], {"z": [1, 2]}, [(("z",), Relation([(2,)]))])
    relation = inst.constraints[0].relation
    assert relation.signature == (frozenset({1, 2}),)
    assert not relation.is_subdirect()
    assert validate_instance(inst) == []
    assert strands_of_relation(relation, [{1, 2}]) == [frozenset({0})]

    stray = Relation([(0, 2)])
    inst = Instance(a3_algebra, ["x", "y"], {"x": [0, 1], "y": [0, 1]}, [(("x", "y"), stray)])
    assert inst.constraints[0].relation.signature == (frozenset({0, 1}), frozenset({0, 1, 2}))
    assert [v.law for v in validate_instance(inst)] == ["constraint"]


def test_solve_result() -> None:
    assert SolveResult.sat({"x": 1}).status == "sat"
    assert SolveResult.unsat().status == "unsat"
    assert not SolveResult.unsat().satisfiable
    assert SolveResult.sat({}) == SolveResult({})
    assert SolveResult.sat({}) != SolveResult.unsat()
