"""Instance transformations: as-component collections, strands, exclusion and retraction."""
from typing import (
    Callable,
    Dict,
    FrozenSet,
    Iterable,
    List,
    Mapping,
    NamedTuple,
    Optional,
    Sequence,
    Tuple,
)

import numpy as np

from .consistency import MinimalityTables
from .graph import EdgeLabeledGraph
from .model import (
    Assignment,
    Constraint,
    Domain,
    InvalidArgument,
    Instance,
    InvariantViolation,
    Relation,
    SolveResult,
    Variable,
)
from .structure import as_components, strands_of_instance

ConsistentCollection = Dict[Variable, Domain]
ConsistentMaps = Dict[Variable, Dict[int, int]]
Solver = Callable[[Instance, str], SolveResult]


class _Indicator:
    """Membership of chosen components as boolean vectors over the universe."""

    def __init__(self, size: int) -> None:
        self.size = size
        self.chosen: Dict[Variable, np.ndarray] = {}

    def set(self, v: Variable, component: Iterable[int]) -> None:
        vec = np.zeros(self.size, dtype=bool)
        vec[sorted(component)] = True
        self.chosen[v] = vec

    def drop(self, v: Variable) -> None:
        del self.chosen[v]


def _rows_meeting(constraint: Constraint, indicator: _Indicator) -> bool:
    rows = constraint.relation.array
    keep = np.ones(len(rows), dtype=bool)
    for i, v in enumerate(constraint.scope):
        vec = indicator.chosen.get(v)
        if vec is not None:
            keep &= vec[rows[:, i]]
    return bool(keep.any())


def _tables_meeting(
    v: Variable, tables: MinimalityTables, indicator: _Indicator, triples: Mapping[int, List]
) -> bool:
    blocks = tables.blocks
    i = tables.index[v]
    mine = indicator.chosen[v]
    for u, vec in indicator.chosen.items():
        if u == v:
            continue
        j = tables.index[u]
        if not blocks[i][mine][:, j, :][:, vec].any():
            return False
    for key, cube in triples.get(i, ()):
        vecs = [indicator.chosen.get(tables.variables[k]) for k in key]
        if any(vec is None for vec in vecs):
            continue
        if not cube[np.ix_(*vecs)].any():
            return False
    return True


def find_consistent_collection(
    instance: Instance,
    graph: EdgeLabeledGraph,
    tables: Optional[MinimalityTables] = None,
) -> ConsistentCollection:
    """Choose one as-component per variable so every constraint meets the chosen product.

    Components are tried in canonical order; the first consistent extension
    wins. With ``tables`` the pair and three-variable tables must meet the
    choice as well.
    """
    constraints = [c.normalized() for c in instance.constraints]
    touching: Dict[Variable, List[Constraint]] = {v: [] for v in instance.variables}
    for c in constraints:
        for v in c.scope:
            touching[v].append(c)
    triples: Dict[int, List] = {}
    if tables is not None:
        for key, cube in tables.triples.items():
            for k in key:
                triples.setdefault(k, []).append((key, cube))

    indicator = _Indicator(instance.algebra.size)
    chosen: ConsistentCollection = {}
    for v in instance.variables:
        for comp in as_components(instance.domains[v], graph):
            indicator.set(v, comp)
            ok = all(_rows_meeting(c, indicator) for c in touching[v])
            if ok and tables is not None:
                ok = _tables_meeting(v, tables, indicator, triples)
            if ok:
                chosen[v] = comp
                break
            indicator.drop(v)
        else:
            raise InvariantViolation(
                f"no as-component of {v!r} extends the collection; the instance is not 3-minimal"
            )
    return chosen


def is_consistent_collection(
    instance: Instance, collection: Mapping[Variable, Iterable[int]]
) -> bool:
    """Every pair of positions of every constraint meets the chosen components."""
    for c in instance.constraints:
        c = c.normalized()
        comps = [frozenset(collection[v]) for v in c.scope]
        rows = c.relation.tuples
        for i in range(len(c.scope)):
            for j in range(i, len(c.scope)):
                if not any(r[i] in comps[i] and r[j] in comps[j] for r in rows):
                    return False
    return True


def split_by_strands(
    instance: Instance, collection: Mapping[Variable, Iterable[int]]
) -> List[Instance]:
    """One subinstance per strand class, over the chosen components."""
    comps = {v: frozenset(collection[v]) for v in instance.variables}
    out = []
    for block in strands_of_instance(instance, comps):
        variables = [v for v in instance.variables if v in block]
        constraints = []
        for c in instance.constraints:
            c = c.normalized()
            positions = [i for i, v in enumerate(c.scope) if v in block]
            if not positions:
                continue
            scope = tuple(c.scope[i] for i in positions)
            rows = {tuple(r[i] for i in positions) for r in c.relation.tuples}
            sig = [comps[v] for v in scope]
            relation = Relation(
                (r for r in rows if all(x in s for x, s in zip(r, sig))),
                signature=sig,
                arity=len(scope),
            )
            constraints.append((scope, relation))
        domains = {v: comps[v] for v in variables}
        out.append(Instance(instance.algebra, variables, domains, constraints))
    return out


def combine_solutions(
    instance: Instance,
    collection: Mapping[Variable, Iterable[int]],
    solutions: Sequence[Assignment],
) -> Assignment:
    combined: Assignment = {}
    for part in solutions:
        combined.update(part)
    if not instance.is_solution(combined):
        raise InvariantViolation("combined strand solutions do not satisfy the instance")
    return combined


def exclude_components(
    instance: Instance,
    collection: Mapping[Variable, Iterable[int]],
    strand: Iterable[Variable],
) -> Optional[Instance]:
    """Remove the chosen components from the domains of ``strand``; None if a domain empties."""
    domains = {v: instance.domains[v] - frozenset(collection[v]) for v in strand}
    if any(not d for d in domains.values()):
        return None
    out = instance.restrict(domains)
    if out.summ >= instance.summ:
        raise InvariantViolation("exclusion did not shrink the instance")
    return out


def b_set(domain: Iterable[int], graph: EdgeLabeledGraph) -> Domain:
    """Elements of ``domain`` with no incoming semilattice arc from inside it."""
    elems = frozenset(domain)
    return frozenset(b for b in elems if not any(graph.arc(a, b) for a in elems))


def right_multiplication_injective(domain: Iterable[int], f: np.ndarray, b: int) -> bool:
    elems = sorted(set(domain))
    return len({int(f[x, b]) for x in elems}) == len(elems)


def c_of(instance: Instance, graph: EdgeLabeledGraph) -> Instance:
    """Instance restricted to the B-sets; an empty B-set makes it trivially UNSAT."""
    return instance.restrict({v: b_set(d, graph) for v, d in instance.domains.items()})


def t_of(instance: Instance, forced: Optional[Tuple[Variable, int]] = None) -> Instance:
    """The instance over pairs (v, b) whose solutions are consistent maps x -> b·x."""
    f = instance.algebra.f
    variables = []
    domains: Dict[Tuple[Variable, int], FrozenSet[int]] = {}
    constraints: List[Tuple[Tuple, Relation]] = []

    for v in instance.variables:
        elems = sorted(instance.domains[v])
        scope = tuple((v, b) for b in elems)
        for b in elems:
            variables.append((v, b))
            domains[(v, b)] = frozenset(int(f[b, x]) for x in elems)
        if elems:
            rows = {tuple(int(f[b, c]) for b in elems) for c in elems}
            constraints.append((scope, Relation(rows, signature=[domains[t] for t in scope])))

    for c in instance.constraints:
        c = c.normalized()
        arr = c.relation.array
        for a in c.relation.rows():
            scope = tuple(zip(c.scope, a))
            image = f[np.array(a, dtype=np.intp)[None, :], arr]
            rows = {tuple(r) for r in np.unique(image, axis=0).tolist()}
            constraints.append((scope, Relation(rows, signature=[domains[t] for t in scope])))

    if forced is not None:
        w, d = forced
        if w not in instance.domains or d not in instance.domains[w]:
            raise InvalidArgument(f"cannot force {forced}: {d} is not in the domain of {w!r}")
        for b in sorted(instance.domains[w]):
            value = int(f[b, d])
            constraints.append((((w, b),), Relation([(value,)], signature=[domains[(w, b)]])))

    return Instance(instance.algebra, variables, domains, constraints)


def maps_from_solution(instance: Instance, solution: Mapping) -> ConsistentMaps:
    maps: ConsistentMaps = {
        v: {b: int(solution[(v, b)]) for b in sorted(instance.domains[v])}
        for v in instance.variables
    }
    if not maps_are_consistent(instance, maps):
        raise InvariantViolation("maps read from a solution of t(P) are not consistent")
    return maps


def maps_are_consistent(instance: Instance, maps: ConsistentMaps) -> bool:
    for v in instance.variables:
        if any(maps[v][b] not in instance.domains[v] for b in maps[v]):
            return False
    for c in instance.constraints:
        for a in c.relation.tuples:
            if tuple(maps[v][x] for v, x in zip(c.scope, a)) not in c.relation.tuples:
                return False
    return True


def is_permutational(maps: ConsistentMaps) -> bool:
    return all(len(set(m.values())) == len(m) for m in maps.values())


def _compose(outer: Dict[int, int], inner: Dict[int, int]) -> Dict[int, int]:
    return {x: outer[inner[x]] for x in inner}


def _idempotent(m: Dict[int, int]) -> bool:
    return all(m[y] == y for y in m.values())


def idempotent_power(maps: ConsistentMaps) -> ConsistentMaps:
    """The first common power p^k of all maps that is idempotent on every variable."""
    power = {v: dict(m) for v, m in maps.items()}
    bound = 1
    for m in maps.values():
        bound = max(bound, len(m))
    # any map on at most n points has an idempotent power with exponent below n! + n
    limit = 1
    for k in range(2, bound + 1):
        limit *= k
    limit += bound
    for _ in range(limit):
        if all(_idempotent(m) for m in power.values()):
            return power
        power = {v: _compose(maps[v], power[v]) for v in power}
    raise InvariantViolation("no idempotent power found")


def retract_instance(instance: Instance, maps: ConsistentMaps) -> Instance:
    """Image of the instance under a consistent family of idempotent maps."""
    if not all(_idempotent(m) for m in maps.values()):
        raise InvalidArgument("retraction needs idempotent maps")
    if is_permutational(maps):
        raise InvalidArgument("retraction needs a non-permutational family")
    domains = {v: frozenset(maps[v].values()) for v in instance.variables}
    constraints = []
    for c in instance.constraints:
        rows = {tuple(maps[v][x] for v, x in zip(c.scope, a)) for a in c.relation.tuples}
        sig = [domains[v] for v in c.scope]
        constraints.append((c.scope, Relation(rows, signature=sig, arity=len(c.scope))))
    out = Instance(instance.algebra, instance.variables, domains, constraints)
    if out.summ >= instance.summ:
        raise InvariantViolation("retraction did not shrink the instance")
    return out


class MarotiOutcome(NamedTuple):
    assignment: Optional[Assignment] = None
    maps: Optional[ConsistentMaps] = None

    @property
    def solved(self) -> bool:
        return self.assignment is not None

    @property
    def unsatisfiable(self) -> bool:
        return self.assignment is None and self.maps is None


def forced_candidates(instance: Instance, graph: EdgeLabeledGraph) -> List[Tuple[Variable, int]]:
    """Pairs (w, d) with d outside the B-set of w, in canonical order."""
    out = []
    for w in instance.variables:
        dom = instance.domains[w]
        out.extend((w, d) for d in sorted(dom - b_set(dom, graph)))
    return out


def maroti_step(
    instance: Instance,
    graph: EdgeLabeledGraph,
    solve: Solver,
    probe_plain: bool = False,
) -> MarotiOutcome:
    """Solve c(P) or find a consistent non-permutational family of maps.

    ``solve`` is called on strictly smaller instances with a tag naming the
    branch. An empty outcome means the instance has no solution.
    """
    result = solve(c_of(instance, graph), "maroti-c")
    if result.satisfiable:
        return MarotiOutcome(assignment=result.assignment)

    if probe_plain:
        result = solve(t_of(instance), "maroti-plain")
        if result.satisfiable:
            maps = maps_from_solution(instance, result.assignment or {})
            if not is_permutational(maps):
                return MarotiOutcome(maps=idempotent_power(maps))

    for forced in forced_candidates(instance, graph):
        result = solve(t_of(instance, forced), "maroti-forced")
        if result.satisfiable:
            maps = maps_from_solution(instance, result.assignment or {})
            if is_permutational(maps):
                raise InvariantViolation(f"forced map at {forced} is a permutation")
            return MarotiOutcome(maps=idempotent_power(maps))
    return MarotiOutcome()

