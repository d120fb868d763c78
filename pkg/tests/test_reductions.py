from typing import List

import pytest

from ccsp.config import GeneratorConfig, LabelWeights
from ccsp.generate import gen_problem
from ccsp.graph import EdgeLabeledGraph
from ccsp.model import Algebra, Instance, InvalidArgument, InvariantViolation, Relation, SolveResult
from ccsp.oracle import brute_force_solve
from ccsp.reductions import (
    Solver,
    b_set,
    c_of,
    combine_solutions,
    exclude_components,
    find_consistent_collection,
    forced_candidates,
    idempotent_power,
    is_consistent_collection,
    is_permutational,
    maps_are_consistent,
    maps_from_solution,
    maroti_step,
    retract_instance,
    right_multiplication_injective,
    split_by_strands,
    t_of,
)

EQ3 = Relation([(0, 0), (1, 1), (2, 2)])


def test_b_set(a3_algebra: Algebra, a3_graph: EdgeLabeledGraph) -> None:
    assert b_set([0, 1, 2], a3_graph) == {0, 2}
    assert b_set([1, 2], a3_graph) == {1, 2}
    assert b_set([0, 1], a3_graph) == {0}

    assert right_multiplication_injective([0, 1, 2], a3_algebra.f, 0)
    assert not right_multiplication_injective([0, 1, 2], a3_algebra.f, 1)
    assert right_multiplication_injective([1, 2], a3_algebra.f, 1)


def test_c_of(a3_algebra: Algebra, a3_graph: EdgeLabeledGraph) -> None:
    rel = EQ3.restrict([[0, 1, 2], [0, 1]])
    inst = Instance(a3_algebra, ["x", "y"], {"x": [0, 1, 2], "y": [0, 1]}, [(("x", "y"), rel)])
    c = c_of(inst, a3_graph)
    assert c.domains == {"x": {0, 2}, "y": {0}}
    assert c.constraints[0].relation.tuples == {(0, 0)}


def test_consistent_collection(a3_algebra: Algebra, a3_graph: EdgeLabeledGraph) -> None:
    full = Relation.full([[0, 1, 2], [0, 1, 2]])
    inst = Instance(a3_algebra, ["x", "y"], {"x": [0, 1, 2], "y": [0, 1, 2]}, [(("x", "y"), full)])
    collection = find_consistent_collection(inst, a3_graph)
    assert collection == {"x": {1, 2}, "y": {1, 2}}
    assert is_consistent_collection(inst, collection)

    swap = Relation([(0, 2), (2, 0)])
    inst = Instance(a3_algebra, ["x", "y"], {"x": [0, 2], "y": [0, 2]}, [(("x", "y"), swap)])
    collection = find_consistent_collection(inst, a3_graph)
    assert collection == {"x": {0}, "y": {2}}
    assert is_consistent_collection(inst, collection)
    assert not is_consistent_collection(inst, {"x": {0}, "y": {0}})

    stray = Instance(a3_algebra, ["x"], {"x": [0, 2]}, [(("x",), Relation([(1,)]))])
    with pytest.raises(InvariantViolation):
        find_consistent_collection(stray, a3_graph)


def test_split_and_combine(a3_algebra: Algebra) -> None:
    eq = Relation([(1, 1), (2, 2)])
    inst = Instance(
        a3_algebra,
        ["x", "y", "z"],
        {"x": [0, 1, 2], "y": [1, 2], "z": [1, 2]},
        [(("x", "y"), EQ3.restrict([[0, 1, 2], [1, 2]])), (("z",), Relation([(2,)]))],
    )
    collection = {"x": {1, 2}, "y": {1, 2}, "z": {1, 2}}
    parts = split_by_strands(inst, collection)
    assert [p.variables for p in parts] == [("x", "y"), ("z",)]
    assert parts[0].domains == {"x": {1, 2}, "y": {1, 2}}
    assert parts[0].constraints[0].relation.tuples == eq.tuples
    assert parts[1].constraints[0].relation.tuples == {(2,)}

    solutions = [brute_force_solve(p).assignment for p in parts]
    combined = combine_solutions(inst, collection, solutions)  # type: ignore[arg-type]
    assert inst.is_solution(combined)

    with pytest.raises(InvariantViolation):
        combine_solutions(inst, collection, [{"x": 1, "y": 2}, {"z": 2}])


def test_exclude_components(a3_algebra: Algebra) -> None:
    inst = Instance(a3_algebra, ["x", "y"], {"x": [0, 1, 2], "y": [1, 2]})
    out = exclude_components(inst, {"x": {1, 2}, "y": {1, 2}}, ["x"])
    assert out is not None
    assert out.domains == {"x": {0}, "y": {1, 2}}
    assert exclude_components(inst, {"x": {1, 2}, "y": {1, 2}}, ["x", "y"]) is None


def test_t_of(a3_algebra: Algebra) -> None:
    inst = Instance(a3_algebra, ["x"], {"x": [0, 1, 2]})
    t = t_of(inst)
    assert t.variables == (("x", 0), ("x", 1), ("x", 2))
    assert t.domains == {("x", 0): {0, 1}, ("x", 1): {1}, ("x", 2): {2}}
    assert t.constraints[0].relation.tuples == {(0, 1, 2), (1, 1, 2)}

    forced = t_of(inst, ("x", 1))
    solution = brute_force_solve(forced).assignment
    assert solution is not None
    maps = maps_from_solution(inst, solution)
    assert maps == {"x": {0: 1, 1: 1, 2: 2}}
    assert not is_permutational(maps)

    with pytest.raises(InvalidArgument):
        t_of(inst, ("x", 3))
    with pytest.raises(InvalidArgument):
        t_of(inst, ("w", 0))


def test_t_of_solutions_are_consistent_maps(a3_algebra: Algebra) -> None:
    rel = Relation.full([[0, 1], [1, 2]])
    inst = Instance(a3_algebra, ["x", "y"], {"x": [0, 1], "y": [1, 2]}, [(("x", "y"), rel)])
    t = t_of(inst)
    solution = brute_force_solve(t).assignment
    assert solution is not None
    assert maps_are_consistent(inst, maps_from_solution(inst, solution))


@pytest.mark.parametrize("seed", range(12))
def test_t_of_solvable_when_instance_is(seed: int) -> None:
    cfg = GeneratorConfig(
        seed=seed,
        domain_size=3,
        variable_count=3,
        constraint_count=3,
        max_arity=2,
        weights=LabelWeights(semilattice=3, majority=1, affine=1),
        planted=1.0,
    )
    _, _, inst = gen_problem(cfg)
    found = brute_force_solve(inst).assignment
    assert found is not None
    t = t_of(inst)
    # x -> b·x along a solution solves t(P)
    lifted = {(v, b): int(inst.algebra.f[b, found[v]]) for v, b in t.variables}
    assert t.is_solution(lifted)
    assert brute_force_solve(t).satisfiable


def test_idempotent_power() -> None:
    maps = {"x": {0: 1, 1: 2, 2: 0, 3: 0}, "y": {0: 1, 1: 0}}
    assert idempotent_power(maps) == {"x": {0: 0, 1: 1, 2: 2, 3: 2}, "y": {0: 0, 1: 1}}

    already = {"x": {0: 1, 1: 1}}
    assert idempotent_power(already) == already
    assert not is_permutational(already)
    assert is_permutational({"x": {0: 1, 1: 0}})


def test_retract_instance(a3_algebra: Algebra) -> None:
    inst = Instance(a3_algebra, ["x", "y"], {"x": [0, 1, 2], "y": [0, 1, 2]}, [(("x", "y"), EQ3)])
    squash = {0: 1, 1: 1, 2: 2}
    maps = {"x": squash, "y": squash}
    assert maps_are_consistent(inst, maps)
    out = retract_instance(inst, maps)
    assert out.domains == {"x": {1, 2}, "y": {1, 2}}
    assert out.constraints[0].relation.tuples == {(1, 1), (2, 2)}
    assert out.summ < inst.summ

    with pytest.raises(InvalidArgument):
        retract_instance(inst, {"x": {0: 1, 1: 2, 2: 2}, "y": squash})
    ident = {0: 0, 1: 1, 2: 2}
    with pytest.raises(InvalidArgument):
        retract_instance(inst, {"x": ident, "y": ident})


def _recording_solver(tags: List[str]) -> Solver:
    def solve(instance: Instance, tag: str) -> SolveResult:
        tags.append(tag)
        return brute_force_solve(instance)

    return solve


def test_maroti_step(a3_algebra: Algebra, a3_graph: EdgeLabeledGraph) -> None:
    tags: List[str] = []
    free = Instance(a3_algebra, ["x"], {"x": [0, 1, 2]})
    outcome = maroti_step(free, a3_graph, _recording_solver(tags))
    assert outcome.solved
    assert tags == ["maroti-c"]

    tags.clear()
    rel = Relation([(0, 1), (1, 0), (1, 1)])
    inst = Instance(a3_algebra, ["x", "y"], {"x": [0, 1], "y": [0, 1]}, [(("x", "y"), rel)])
    assert forced_candidates(inst, a3_graph) == [("x", 1), ("y", 1)]
    outcome = maroti_step(inst, a3_graph, _recording_solver(tags))
    assert not outcome.solved and not outcome.unsatisfiable
    assert tags == ["maroti-c", "maroti-forced"]
    assert outcome.maps is not None
    assert maps_are_consistent(inst, outcome.maps)
    assert not is_permutational(outcome.maps)
    smaller = retract_instance(inst, outcome.maps)
    assert brute_force_solve(smaller).satisfiable

    tags.clear()
    neq = Relation([(0, 2), (2, 0)])
    scopes = [("x", "y"), ("y", "z"), ("x", "z")]
    triangle = Instance(a3_algebra, "xyz", {v: [0, 2] for v in "xyz"}, [(s, neq) for s in scopes])
    outcome = maroti_step(triangle, a3_graph, _recording_solver(tags))
    assert outcome.unsatisfiable
    assert tags == ["maroti-c"]


def test_maroti_step_probes_plain(a3_algebra: Algebra, a3_graph: EdgeLabeledGraph) -> None:
    tags: List[str] = []
    rel = Relation([(0, 1), (1, 0), (1, 1)])
    inst = Instance(a3_algebra, ["x", "y"], {"x": [0, 1], "y": [0, 1]}, [(("x", "y"), rel)])
    outcome = maroti_step(inst, a3_graph, _recording_solver(tags), probe_plain=True)
    assert tags[:2] == ["maroti-c", "maroti-plain"]
    assert outcome.maps is not None
