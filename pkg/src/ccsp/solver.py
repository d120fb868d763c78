"""The recursive solver for CSP(A) over a conservative algebra with a total edge labelling."""
from typing import Dict, List, NamedTuple, Optional, Tuple

from wasabi import msg

from .config import SolverConfig
from .consistency import establish_3_minimality
from .graph import EdgeKind, EdgeLabeledGraph
from .maltsev import solve_maltsev
from .model import (
    Instance,
    InvalidArgument,
    InvariantViolation,
    Relation,
    SolveResult,
    closure_witness,
)
from .oracle import brute_force_solve
from .polymorphism import ClassifierVerdict, ConstraintLanguage, classify_language, derive_m
from .reductions import (
    combine_solutions,
    exclude_components,
    find_consistent_collection,
    maroti_step,
    retract_instance,
    split_by_strands,
)
from .structure import as_components, is_semilattice_free, lev, strands_of_instance

Measure = Tuple[int, int]


class TraceEvent(NamedTuple):
    depth: int
    kind: str
    lev: int
    summ: int


class SolveTrace:
    events: List[TraceEvent]
    guideline: Optional[int]

    def __init__(self) -> None:
        self.events = []
        self.guideline = None

    def record(self, depth: int, kind: str, measure: Measure) -> None:
        self.events.append(TraceEvent(depth, kind, *measure))

    @property
    def node_count(self) -> int:
        return sum(1 for e in self.events if e.kind in _NODE_KINDS)

    @property
    def depth(self) -> int:
        return max((e.depth for e in self.events), default=0)

    def counts(self) -> Dict[str, int]:
        out: Dict[str, int] = {}
        for e in self.events:
            out[e.kind] = out.get(e.kind, 0) + 1
        return out

    def to_dict(self) -> Dict[str, object]:
        return {
            "depth": self.depth,
            "depth_guideline": self.guideline,
            "nodes": self.node_count,
            "branches": self.counts(),
        }


_NODE_KINDS = {"root", "exclusion", "maroti-c", "maroti-plain", "maroti-forced"}


def measure(instance: Instance, graph: EdgeLabeledGraph) -> Measure:
    return lev(instance, graph), instance.summ


def _edge_kinds(instance: Instance, graph: EdgeLabeledGraph) -> set:
    kinds = set()
    for dom in instance.domains.values():
        elems = sorted(dom)
        for i, a in enumerate(elems):
            for b in elems[i + 1 :]:
                kinds.add(graph.kind(a, b))
    return kinds


def _assignment_of(instance: Instance) -> Dict:
    return {v: next(iter(d)) for v, d in instance.domains.items()}


def _greedy(instance: Instance) -> Optional[Dict]:
    """Fix variables to their least value in order, re-establishing 3-minimality each time."""
    current = instance
    for v in instance.variables:
        dom = current.domains[v]
        if len(dom) == 1:
            continue
        fixed = establish_3_minimality(current.restrict({v: [min(dom)]}))
        if fixed is None:
            return None
        current = fixed[0]
    assignment = _assignment_of(current)
    return assignment if instance.is_solution(assignment) else None


def _backtrack(instance: Instance) -> Optional[Dict]:
    """Depth-first search maintaining 3-minimality, smallest domain first."""
    open_vars = [v for v in instance.variables if len(instance.domains[v]) > 1]
    if not open_vars:
        assignment = _assignment_of(instance)
        return assignment if instance.is_solution(assignment) else None
    v = min(open_vars, key=lambda u: len(instance.domains[u]))
    for value in sorted(instance.domains[v]):
        narrowed = establish_3_minimality(instance.restrict({v: [value]}))
        if narrowed is None:
            continue
        found = _backtrack(narrowed[0])
        if found is not None:
            return found
    return None


def solve_semilattice_free(
    instance: Instance, graph: EdgeLabeledGraph, config: Optional[SolverConfig] = None
) -> SolveResult:
    """Solve an instance whose domains carry only majority and affine edges."""
    config = config or SolverConfig()
    if not is_semilattice_free(instance, graph):
        raise InvalidArgument("instance has a semilattice edge inside a domain")
    est = establish_3_minimality(instance)
    if est is None:
        return SolveResult.unsat()
    current = est[0]
    kinds = _edge_kinds(current, graph)

    found: Optional[Dict] = None
    if kinds <= {EdgeKind.majority}:
        found = _greedy(current)
        if found is None:
            msg.warn("3-minimal majority instance hit a dead end; falling back to search")
            found = _backtrack(current)
    elif kinds == {EdgeKind.affine}:
        if config.greedy_first:
            found = _greedy(current)
        if found is None:
            m = derive_m(instance.algebra)
            found = solve_maltsev(current, m)
    else:
        if config.greedy_first:
            found = _greedy(current)
        if found is None:
            if not config.search_fallback:
                raise NotImplementedError(
                    "instances mixing majority and affine edges need search_fallback"
                )
            found = _backtrack(current)

    if found is None:
        return SolveResult.unsat()
    if not instance.is_solution(found):
        raise InvariantViolation("semilattice-free solver returned a non-solution")
    return SolveResult.sat(found)


def _is_closed(instance: Instance) -> bool:
    """Every constraint relation is a subuniverse of the algebra."""
    tables = [table for _, table in instance.algebra.items()]
    return all(
        closure_witness(c.relation, table) is None for c in instance.constraints for table in tables
    )


def _has_proper_component(instance: Instance, graph: EdgeLabeledGraph) -> bool:
    for v, dom in instance.domains.items():
        comps = as_components(dom, graph)
        if len(comps) != 1 or comps[0] != dom:
            return True
    return False


class _Driver:
    def __init__(self, graph: EdgeLabeledGraph, config: SolverConfig, trace: SolveTrace) -> None:
        self.graph = graph
        self.config = config
        self.trace = trace

    def _check(self, smaller: Measure, bound: Measure, what: str) -> None:
        if self.config.check_measures and not smaller < bound:
            raise InvariantViolation(f"{what}: measure {smaller} is not below {bound}")

    def solve(
        self, instance: Instance, depth: int, kind: str, bound: Optional[Measure]
    ) -> SolveResult:
        start = measure(instance, self.graph)
        if bound is not None:
            self._check(start, bound, f"{kind} subproblem")
        self.trace.record(depth, kind, start)

        current = instance
        while True:
            est = establish_3_minimality(current)
            if est is None:
                return SolveResult.unsat()
            current, tables = est
            here = measure(current, self.graph)

            if not _is_closed(current):
                # sub-instances of t(P) and retractions need not be closed under f and p
                self.trace.record(depth, "search", here)
                found = _backtrack(current)
                return SolveResult.unsat() if found is None else SolveResult.sat(found)

            if is_semilattice_free(current, self.graph):
                self.trace.record(depth, "sfree", here)
                return solve_semilattice_free(current, self.graph, self.config)

            if _has_proper_component(current, self.graph):
                collection = find_consistent_collection(current, self.graph, tables)
                strands = strands_of_instance(current, collection)
                parts = split_by_strands(current, collection)
                solutions = []
                failed = None
                for strand, part in zip(strands, parts):
                    result = self.solve(part, depth + 1, "exclusion", here)
                    if not result.satisfiable:
                        failed = strand
                        break
                    solutions.append(result.assignment or {})
                if failed is None:
                    return SolveResult.sat(combine_solutions(current, collection, solutions))
                reduced = exclude_components(current, collection, failed)
                if reduced is None:
                    return SolveResult.unsat()
                self._check(measure(reduced, self.graph), here, "exclusion")
                current = reduced
                continue

            outcome = maroti_step(
                current,
                self.graph,
                lambda sub, tag: self.solve(sub, depth + 1, tag, here),
                probe_plain=self.config.probe_plain_t,
            )
            if outcome.solved:
                return SolveResult.sat(outcome.assignment or {})
            if outcome.maps is None:
                return SolveResult.unsat()
            current = retract_instance(current, outcome.maps)
            self.trace.record(depth, "retract-loop", measure(current, self.graph))
            self._check(measure(current, self.graph), here, "retraction")


def solve(
    instance: Instance,
    graph: EdgeLabeledGraph,
    config: Optional[SolverConfig] = None,
    trace: Optional[SolveTrace] = None,
) -> SolveResult:
    """Decide the instance; a returned assignment is always a verified solution."""
    if not graph.is_total():
        raise InvalidArgument("the edge labelling has an unlabelled pair")
    config = config or SolverConfig()
    trace = trace if trace is not None else SolveTrace()
    # 2k, k the largest domain that still carries a semilattice edge
    trace.guideline = 2 * lev(instance, graph)
    result = _Driver(graph, config, trace).solve(instance, 0, "root", None)
    if trace.depth > trace.guideline:
        msg.warn(f"recursion depth {trace.depth} exceeds the guideline {trace.guideline}")
    if result.satisfiable and not instance.is_solution(result.assignment or {}):
        raise InvariantViolation("solver returned a non-solution")
    return result


def _drawn_from(relation: Relation, language: ConstraintLanguage) -> bool:
    if relation.arity == 1:
        return True
    for rel in language.relations:
        if rel.arity != relation.arity:
            continue
        if rel.restrict(relation.signature).tuples == relation.tuples:
            return True
    return False


class LanguageSolveResult(NamedTuple):
    verdict: ClassifierVerdict
    result: Optional[SolveResult]
    trace: SolveTrace

    @property
    def status(self) -> str:
        if self.result is None:
            return "np-complete"
        return self.result.status


def classify_and_solve(
    language: ConstraintLanguage,
    instance: Instance,
    config: Optional[SolverConfig] = None,
    force_oracle: bool = False,
    budget: Optional[int] = None,
) -> LanguageSolveResult:
    """Classify the language, then solve the instance or refuse it as NP-complete."""
    for n, c in enumerate(instance.constraints):
        if not _drawn_from(c.relation, language):
            raise InvalidArgument(f"constraint #{n} does not come from the language")
    verdict = classify_language(language)
    trace = SolveTrace()
    if not verdict.tractable:
        if not force_oracle:
            return LanguageSolveResult(verdict, None, trace)
        msg.warn(f"pair {verdict.witness} has no tractable label; using exhaustive search")
        return LanguageSolveResult(verdict, brute_force_solve(instance, budget), trace)
    assert verdict.algebra is not None and verdict.graph is not None
    result = solve(instance.with_algebra(verdict.algebra), verdict.graph, config, trace)
    return LanguageSolveResult(verdict, result, trace)
