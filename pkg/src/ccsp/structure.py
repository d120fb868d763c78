"""Semilattice/affine structure of domains and relations: as-components, paths and strands."""
from collections import deque
from typing import Deque, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Union

import networkx as nx
import numpy as np

from .graph import EdgeKind, EdgeLabeledGraph
from .model import Domain, InvalidArgument, Instance, Relation, Row, Variable

StrandPartition = List[FrozenSet[int]]


def sa_digraph(domain: Iterable[int], graph: EdgeLabeledGraph) -> nx.DiGraph:
    """Directed graph on ``domain``: semilattice arcs as oriented, affine edges both ways."""
    nodes = sorted(set(domain))
    dg = nx.DiGraph()
    dg.add_nodes_from(nodes)
    for i, a in enumerate(nodes):
        for b in nodes[i + 1 :]:
            kind = graph.kind(a, b)
            if kind is EdgeKind.affine:
                dg.add_edge(a, b)
                dg.add_edge(b, a)
            elif kind is EdgeKind.semilattice:
                u, v = graph.orientation[(a, b)]
                dg.add_edge(u, v)
    return dg


def as_components(domain: Iterable[int], graph: EdgeLabeledGraph) -> List[Domain]:
    """Sink strongly connected components of the SA digraph, ordered by least element."""
    dg = sa_digraph(domain, graph)
    if not dg:
        return []
    cond = nx.condensation(dg)
    sinks = [
        frozenset(cond.nodes[c]["members"]) for c in cond.nodes if cond.out_degree(c) == 0
    ]
    return sorted(sinks, key=min)


def is_as_component(subset: Iterable[int], domain: Iterable[int], graph: EdgeLabeledGraph) -> bool:
    return frozenset(subset) in as_components(domain, graph)


def is_semilattice_free(target: Union[Instance, Iterable[int]], graph: EdgeLabeledGraph) -> bool:
    """No semilattice edge inside the domain, or inside any domain of an instance."""
    if isinstance(target, Instance):
        return all(is_semilattice_free(d, graph) for d in target.domains.values())
    nodes = sorted(set(target))
    return not any(
        graph.kind(a, b) is EdgeKind.semilattice
        for i, a in enumerate(nodes)
        for b in nodes[i + 1 :]
    )


def tuple_edge(a: Sequence[int], b: Sequence[int], graph: EdgeLabeledGraph) -> Optional[EdgeKind]:
    """Kind of the edge from tuple a to tuple b in the graph of a relation.

    Semilattice edges are directed and take precedence over affine and
    majority ones.
    """
    if len(a) != len(b):
        raise InvalidArgument("tuples of different arity")
    moved = [(x, y) for x, y in zip(a, b) if x != y]
    if not moved:
        return None
    if all(graph.arc(x, y) for x, y in moved):
        return EdgeKind.semilattice
    kinds = {graph.kind(x, y) for x, y in moved}
    if kinds == {EdgeKind.affine}:
        return EdgeKind.affine
    if kinds == {EdgeKind.majority}:
        return EdgeKind.majority
    return None


class _StepMatrices:
    def __init__(self, graph: EdgeLabeledGraph) -> None:
        same = np.eye(graph.size, dtype=bool)
        self.semilattice = graph.matrix(EdgeKind.semilattice) | same
        self.affine = graph.matrix(EdgeKind.affine) | same

    def successors(self, row: np.ndarray, rows: np.ndarray) -> np.ndarray:
        cols = np.arange(rows.shape[1])
        sl = self.semilattice[row[cols], rows].all(axis=1)
        af = self.affine[row[cols], rows].all(axis=1)
        return np.flatnonzero(sl | af)


def find_path(
    relation: Relation,
    graph: EdgeLabeledGraph,
    start: Sequence[int],
    end: Sequence[int],
    within: Optional[Iterable[Sequence[int]]] = None,
) -> Optional[List[Row]]:
    """Shortest directed path of semilattice/affine tuple edges from start to end."""
    source, target = tuple(start), tuple(end)
    pool = relation.tuples if within is None else frozenset(tuple(r) for r in within)
    if source not in pool or target not in pool:
        raise InvalidArgument("path endpoints must be tuples of the relation")
    if source == target:
        return [source]
    rows = np.array(sorted(pool), dtype=np.intp)
    index = {tuple(r): i for i, r in enumerate(rows.tolist())}
    steps = _StepMatrices(graph)

    parent: Dict[int, int] = {index[source]: -1}
    queue: Deque[int] = deque([index[source]])
    goal = index[target]
    while queue:
        node = queue.popleft()
        for nxt in steps.successors(rows[node], rows).tolist():
            if nxt in parent:
                continue
            parent[nxt] = node
            if nxt == goal:
                path = [nxt]
                while parent[path[-1]] != -1:
                    path.append(parent[path[-1]])
                return [tuple(rows[i].tolist()) for i in reversed(path)]
            queue.append(nxt)
    return None


def is_connected(
    relation: Relation, graph: EdgeLabeledGraph, subset: Optional[Iterable[Sequence[int]]] = None
) -> bool:
    """Every two tuples of ``subset`` are joined by a path inside ``subset``."""
    pool = sorted(relation.tuples if subset is None else {tuple(r) for r in subset})
    if len(pool) < 2:
        return True
    rows = np.array(pool, dtype=np.intp)
    steps = _StepMatrices(graph)
    dg = nx.DiGraph()
    dg.add_nodes_from(range(len(rows)))
    for i, row in enumerate(rows):
        dg.add_edges_from((i, j) for j in steps.successors(row, rows).tolist() if j != i)
    return nx.is_strongly_connected(dg)


def strands_of_relation(relation: Relation, components: Sequence[Iterable[int]]) -> StrandPartition:
    """Positions grouped by equal membership pattern in the chosen components."""
    if len(components) != relation.arity:
        raise InvalidArgument("one component per position is needed")
    comps = [frozenset(c) for c in components]
    for i, comp in enumerate(comps):
        if not comp <= relation.signature[i]:
            raise InvalidArgument(f"component {sorted(comp)} is not inside position {i}")
    arr = relation.array
    member = np.zeros(arr.shape, dtype=bool)
    for i, comp in enumerate(comps):
        member[:, i] = np.isin(arr[:, i], sorted(comp))
    blocks: Dict[bytes, List[int]] = {}
    for i in range(relation.arity):
        blocks.setdefault(member[:, i].tobytes(), []).append(i)
    return sorted((frozenset(b) for b in blocks.values()), key=min)


def strands_of_instance(
    instance: Instance, collection: Mapping[Variable, Iterable[int]]
) -> List[FrozenSet[Variable]]:
    """Variables linked through strands of the constraint relations, in variable order."""
    ug = nx.Graph()
    ug.add_nodes_from(instance.variables)
    for c in instance.constraints:
        c = c.normalized()
        for block in strands_of_relation(c.relation, [collection[v] for v in c.scope]):
            members = [c.scope[i] for i in sorted(block)]
            ug.add_edges_from(zip(members, members[1:]))
    order = {v: i for i, v in enumerate(instance.variables)}
    blocks = [frozenset(cc) for cc in nx.connected_components(ug)]
    return sorted(blocks, key=lambda s: min(order[v] for v in s))


def is_linked(relation: Relation) -> bool:
    """Binary relation whose left and right tolerances are total.

    Equivalently its tuples form a connected bipartite graph.
    """
    if relation.arity != 2:
        raise InvalidArgument("linkedness is defined for binary relations")
    if not relation.tuples:
        return False
    bg = nx.Graph()
    bg.add_edges_from((("left", a), ("right", b)) for a, b in relation.tuples)
    return nx.is_connected(bg)


def is_relation_consistent_collection(
    relation: Relation, components: Sequence[Iterable[int]]
) -> bool:
    """Every two positions meet the chosen components in a common tuple."""
    comps = [frozenset(c) for c in components]
    if len(comps) != relation.arity:
        raise InvalidArgument("one component per position is needed")
    rows = relation.tuples
    for i in range(relation.arity):
        for j in range(i, relation.arity):
            if not any(r[i] in comps[i] and r[j] in comps[j] for r in rows):
                return False
    return True


def lev(instance: Instance, graph: EdgeLabeledGraph) -> int:
    """Largest domain that still contains a semilattice edge, 0 when there is none."""
    return max(
        (len(d) for d in instance.domains.values() if not is_semilattice_free(d, graph)),
        default=0,
    )
