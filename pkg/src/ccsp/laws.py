"""Executable structural laws about relations over conservative algebras.

Each check verifies its hypotheses first and reports ``hypothesis-not-met``
when they fail; only then is the conclusion checked by enumeration. As
components are always taken from the projections of the relation.
"""
from enum import Enum
from itertools import product
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Sequence, Set

import numpy as np

from .graph import EdgeKind, EdgeLabeledGraph
from .model import Algebra, Domain, InvalidArgument, Relation, Row, apply_componentwise, project
from .structure import (
    as_components,
    is_connected,
    is_linked,
    is_relation_consistent_collection,
    strands_of_relation,
    tuple_edge,
)

_PATH_EDGES = (EdgeKind.semilattice, EdgeKind.affine)


class LawStatus(str, Enum):
    passed = "pass"
    failed = "fail"
    skipped = "hypothesis-not-met"


class LawOutcome(NamedTuple):
    status: LawStatus
    detail: str = ""
    counterexample: Any = None

    @classmethod
    def ok(cls) -> "LawOutcome":
        return cls(LawStatus.passed)

    @classmethod
    def skip(cls, why: str) -> "LawOutcome":
        return cls(LawStatus.skipped, why)

    @classmethod
    def fail(cls, why: str, counterexample: Any = None) -> "LawOutcome":
        return cls(LawStatus.failed, why, counterexample)


def _inside(relation: Relation, components: Sequence[Domain]) -> List[Row]:
    return [r for r in relation.rows() if all(x in c for x, c in zip(r, components))]


def _not_components(
    relation: Relation, graph: EdgeLabeledGraph, components: Sequence[Domain]
) -> Optional[str]:
    if len(components) != relation.arity:
        return "one component per position is needed"
    for i, comp in enumerate(components):
        if frozenset(comp) not in as_components(relation.column(i), graph):
            return f"{sorted(comp)} is not an as-component of position {i}"
    return None


def _is_path_edge(a: Sequence[int], b: Sequence[int], graph: EdgeLabeledGraph) -> bool:
    return tuple_edge(a, b, graph) in _PATH_EDGES


def check_path_extension(
    relation: Relation,
    graph: EdgeLabeledGraph,
    positions: Sequence[int],
    path: Sequence[Sequence[int]],
    **_: Any,
) -> LawOutcome:
    """A path in the projection on ``positions`` lifts to a path of the same length in R."""
    positions = list(positions)
    steps = [tuple(a) for a in path]
    if not steps:
        return LawOutcome.skip("empty path")
    shadow = project(relation, positions)
    for a in steps:
        if a not in shadow.tuples:
            return LawOutcome.skip(f"{a} is not in the projection")
    for a, b in zip(steps, steps[1:]):
        if not _is_path_edge(a, b, graph):
            return LawOutcome.skip(f"{a} -> {b} is not a semilattice or affine edge")

    def over(a: Row) -> List[Row]:
        return [r for r in relation.rows() if tuple(r[i] for i in positions) == a]

    reachable = over(steps[0])
    for b in steps[1:]:
        reachable = [r for r in over(b) if any(_is_path_edge(s, r, graph) for s in reachable)]
        if not reachable:
            return LawOutcome.fail(f"no lift of the path reaches {b}", steps)
    return LawOutcome.ok()


def check_path_step(
    relation: Relation, algebra: Algebra, graph: EdgeLabeledGraph, **_: Any
) -> LawOutcome:
    """b·p(c, b) is a semilattice step out of b; p(c, b)·b moves each coordinate along an arc."""
    rows = relation.rows()
    for b in rows:
        for c in rows:
            q = apply_componentwise(algebra.p, c, b)
            up = apply_componentwise(algebra.f, b, q)
            if up not in relation.tuples:
                return LawOutcome.fail(f"{up} is not in the relation", (b, c))
            if up != b and tuple_edge(b, up, graph) is not EdgeKind.semilattice:
                return LawOutcome.fail(f"{b} -> {up} is not a semilattice edge", (b, c))
            side = apply_componentwise(algebra.f, q, b)
            if side not in relation.tuples:
                return LawOutcome.fail(f"{side} is not in the relation", (b, c))
            for x, y in zip(b, side):
                if x != y and not (graph.arc(x, y) or graph.kind(x, y) is EdgeKind.affine):
                    return LawOutcome.fail(f"{x} -> {y} in {b} -> {side} is not an arc", (b, c))
    return LawOutcome.ok()


def check_subdirect(
    relation: Relation, graph: EdgeLabeledGraph, components: Sequence[Domain], **_: Any
) -> LawOutcome:
    """For binary R meeting A'×B', the intersection projects onto A' and onto B'."""
    if relation.arity != 2:
        return LawOutcome.skip("the intersection law is about binary relations")
    why = _not_components(relation, graph, components)
    if why:
        return LawOutcome.skip(why)
    inner = _inside(relation, components)
    if not inner:
        return LawOutcome.skip("relation misses A'×B'")
    for i in range(2):
        if {r[i] for r in inner} != set(components[i]):
            expected = sorted(components[i])
            return LawOutcome.fail(f"position {i} of the intersection is not {expected}", inner)
    return LawOutcome.ok()


def check_bucket(
    relation: Relation, graph: EdgeLabeledGraph, components: Sequence[Domain], **_: Any
) -> LawOutcome:
    """{a}×B' ⊆ R for some a in A' forces A'×B' ⊆ R."""
    if relation.arity != 2:
        return LawOutcome.skip("the bucket law is about binary relations")
    why = _not_components(relation, graph, components)
    if why:
        return LawOutcome.skip(why)
    left, right = sorted(components[0]), sorted(components[1])
    if not any(all((a, b) in relation.tuples for b in right) for a in left):
        return LawOutcome.skip("no a in A' with {a}×B' inside the relation")
    for pair in product(left, right):
        if pair not in relation.tuples:
            return LawOutcome.fail(f"{pair} is missing", pair)
    return LawOutcome.ok()


def check_linked_rectangularity(
    relation: Relation, graph: EdgeLabeledGraph, components: Sequence[Domain], **_: Any
) -> LawOutcome:
    """Linked binary R meeting A'×B' contains all of A'×B'."""
    if relation.arity != 2:
        return LawOutcome.skip("linked rectangularity is about binary relations")
    why = _not_components(relation, graph, components)
    if why:
        return LawOutcome.skip(why)
    if not is_linked(relation):
        return LawOutcome.skip("relation is not linked")
    if not _inside(relation, components):
        return LawOutcome.skip("relation misses A'×B'")
    for pair in product(sorted(components[0]), sorted(components[1])):
        if pair not in relation.tuples:
            return LawOutcome.fail(f"{pair} is missing", pair)
    return LawOutcome.ok()


def check_connectivity(
    relation: Relation, graph: EdgeLabeledGraph, components: Sequence[Domain], **_: Any
) -> LawOutcome:
    """R ∩ ∏A' is a connected subdirect product of the A' and an as-component of R."""
    why = _not_components(relation, graph, components)
    if why:
        return LawOutcome.skip(why)
    inner = _inside(relation, components)
    if not inner:
        return LawOutcome.skip("relation misses the product of the components")
    for i, comp in enumerate(components):
        if {r[i] for r in inner} != set(comp):
            return LawOutcome.fail(f"position {i} of the restriction is not {sorted(comp)}", inner)
    if not is_connected(relation, graph, inner):
        return LawOutcome.fail("restriction is not connected", inner)
    kept = set(inner)
    for a in inner:
        for b in relation.rows():
            if b not in kept and _is_path_edge(a, b, graph):
                return LawOutcome.fail(f"edge {a} -> {b} leaves the restriction", (a, b))
    return LawOutcome.ok()


def check_rectangularity(
    relation: Relation, graph: EdgeLabeledGraph, components: Sequence[Domain], **_: Any
) -> LawOutcome:
    """The product of the strand pieces pr_I R ∩ ∏A' lies inside R."""
    why = _not_components(relation, graph, components)
    if why:
        return LawOutcome.skip(why)
    if not _inside(relation, components):
        return LawOutcome.skip("relation misses the product of the components")
    strands = [sorted(s) for s in strands_of_relation(relation, components)]
    pieces = []
    for s in strands:
        piece: Set[Row] = set()
        for r in relation.tuples:
            part = tuple(r[i] for i in s)
            if all(x in components[i] for i, x in zip(s, part)):
                piece.add(part)
        pieces.append(sorted(piece))
    for choice in product(*pieces):
        row = [0] * relation.arity
        for s, part in zip(strands, choice):
            for i, x in zip(s, part):
                row[i] = x
        if tuple(row) not in relation.tuples:
            return LawOutcome.fail(f"{tuple(row)} is missing", tuple(row))
    return LawOutcome.ok()


def check_max_extension(
    relation: Relation,
    graph: EdgeLabeledGraph,
    positions: Sequence[int],
    head: Sequence[int],
    **_: Any,
) -> LawOutcome:
    """A projected tuple inside as-components extends to a tuple of R inside as-components."""
    positions = list(positions)
    head = tuple(head)
    covered = [
        frozenset().union(*as_components(relation.column(i), graph)) for i in range(relation.arity)
    ]
    if head not in project(relation, positions).tuples:
        return LawOutcome.skip(f"{head} is not in the projection")
    if not all(x in covered[i] for i, x in zip(positions, head)):
        return LawOutcome.skip(f"{head} leaves the as-components")
    for r in relation.rows():
        if tuple(r[i] for i in positions) == head and all(x in covered[i] for i, x in enumerate(r)):
            return LawOutcome.ok()
    return LawOutcome.fail(f"{head} has no extension inside as-components", head)


def check_crt(
    relation: Relation, graph: EdgeLabeledGraph, components: Sequence[Domain], **_: Any
) -> LawOutcome:
    """A pairwise consistent choice of as-components meets R."""
    why = _not_components(relation, graph, components)
    if why:
        return LawOutcome.skip(why)
    if not is_relation_consistent_collection(relation, components):
        return LawOutcome.skip("collection is not consistent with the relation")
    if not _inside(relation, components):
        return LawOutcome.fail("relation misses the product of the components", list(components))
    return LawOutcome.ok()


def check_collection_extension(
    relation: Relation, graph: EdgeLabeledGraph, components: Sequence[Domain], **_: Any
) -> LawOutcome:
    """A consistent choice on all but the last position extends to a consistent collection."""
    if relation.arity < 2 or len(components) != relation.arity - 1:
        return LawOutcome.skip("components for all positions but the last are needed")
    head = project(relation, list(range(relation.arity - 1)))
    why = _not_components(head, graph, components)
    if why:
        return LawOutcome.skip(why)
    if not is_relation_consistent_collection(head, components):
        return LawOutcome.skip("partial collection is not consistent")
    last = relation.arity - 1
    for comp in as_components(relation.column(last), graph):
        if is_relation_consistent_collection(relation, list(components) + [comp]):
            return LawOutcome.ok()
    return LawOutcome.fail(
        "no as-component of the last position completes the collection", list(components)
    )


LAWS: Dict[str, Callable[..., LawOutcome]] = {
    "path-extension": check_path_extension,
    "path-step": check_path_step,
    "subdirect": check_subdirect,
    "bucket": check_bucket,
    "linked-rectangularity": check_linked_rectangularity,
    "connectivity": check_connectivity,
    "rectangularity": check_rectangularity,
    "max-extension": check_max_extension,
    "crt": check_crt,
    "collection-extension": check_collection_extension,
}


def check_law(name: str, **inputs: Any) -> LawOutcome:
    """Run one law by name; ``inputs`` are the keyword arguments of its check."""
    if name not in LAWS:
        raise InvalidArgument(f"unknown law {name!r}; choose one of {sorted(LAWS)}")
    return LAWS[name](**inputs)


def random_components(
    relation: Relation,
    graph: EdgeLabeledGraph,
    rng: np.random.Generator,
    positions: Optional[Sequence[int]] = None,
) -> List[Domain]:
    """One as-component per position, chosen at random."""
    out = []
    for i in range(relation.arity) if positions is None else positions:
        comps = as_components(relation.column(i), graph)
        out.append(comps[int(rng.integers(len(comps)))])
    return out


def random_path(
    relation: Relation,
    graph: EdgeLabeledGraph,
    positions: Sequence[int],
    rng: np.random.Generator,
    steps: int = 4,
) -> List[Row]:
    """Random walk along semilattice/affine edges in a projection."""
    shadow = project(relation, positions).rows()
    current = shadow[int(rng.integers(len(shadow)))]
    path = [current]
    for _ in range(steps):
        nxt = [r for r in shadow if _is_path_edge(current, r, graph)]
        if not nxt:
            break
        current = nxt[int(rng.integers(len(nxt)))]
        path.append(current)
    return path
