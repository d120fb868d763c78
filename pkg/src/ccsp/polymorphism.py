"""Pair classification, synthesis of the uniform operations and the dichotomy verdict."""
from collections import deque
from itertools import combinations, product
from typing import (
    Callable,
    Deque,
    Dict,
    FrozenSet,
    Iterable,
    List,
    Mapping,
    NamedTuple,
    Optional,
    Sequence,
    Set,
    Tuple,
)

import numpy as np

from .graph import EdgeKind, EdgeLabeledGraph, Pair, PairLabel
from .model import Algebra, InvalidArgument, Relation, Violation, closure_witness

Key = Tuple[int, ...]


class SynthesisError(AssertionError):
    """No conservative tables with the uniform pair behaviour preserve the language."""

    def __init__(self, message: str, pair: Optional[Pair] = None) -> None:
        super().__init__(message)
        self.pair = pair


class ConstraintLanguage:
    """Finite set of relations over the universe ``0 .. size-1``."""

    size: int
    relations: Tuple[Relation, ...]

    def __init__(self, size: int, relations: Iterable[Relation] = ()) -> None:
        if size < 1:
            raise InvalidArgument("a constraint language needs a nonempty universe")
        self.size = size
        self.relations = tuple(relations)
        for rel in self.relations:
            for row in rel.tuples:
                if any(not 0 <= x < size for x in row):
                    raise InvalidArgument(f"tuple {row} leaves the universe of size {size}")

    @property
    def universe(self) -> Tuple[int, ...]:
        return tuple(range(self.size))

    def __repr__(self) -> str:
        return f"ConstraintLanguage(size={self.size}, relations={len(self.relations)})"


def _affine(x: int, y: int, z: int) -> int:
    if x == y:
        return z
    if y == z:
        return x
    return y


def _majority(x: int, y: int, z: int) -> int:
    return y if y == z else x


class OperationSearch:
    """Backtracking search for a conservative operation table preserving some relations.

    Each argument tuple is a variable whose candidates are its distinct
    arguments, first argument first. Fixed entries are never revisited.
    """

    def __init__(
        self,
        size: int,
        arity: int,
        relations: Sequence[Relation],
        fixed: Optional[Mapping[Key, int]] = None,
    ) -> None:
        self.size = size
        self.arity = arity
        self.keys: List[Key] = list(product(range(size), repeat=arity))
        self.domains: Dict[Key, Tuple[int, ...]] = {}
        fixed = fixed or {}
        for key in self.keys:
            if key in fixed:
                value = fixed[key]
                if value not in key:
                    raise InvalidArgument(f"fixed value {value} at {key} is not conservative")
                self.domains[key] = (value,)
            elif len(set(key)) == 1:
                self.domains[key] = (key[0],)
            else:
                self.domains[key] = tuple(dict.fromkeys(key))

        self.constraints: List[Tuple[List[Tuple[Key, Tuple[int, ...]]], List[Tuple[int, ...]]]] = []
        self.watch: Dict[Key, List[int]] = {key: [] for key in self.keys}
        self.infeasible = False
        self._build(relations)

    def _build(self, relations: Sequence[Relation]) -> None:
        seen: Set[Tuple[int, Tuple[Key, ...]]] = set()
        for ridx, rel in enumerate(relations):
            rows = rel.rows()
            allowed = rel.tuples
            for combo in product(rows, repeat=self.arity):
                keys = tuple(zip(*combo))
                if (ridx, keys) in seen:
                    continue
                seen.add((ridx, keys))
                if all(len(self.domains[k]) == 1 for k in keys):
                    if tuple(self.domains[k][0] for k in keys) not in allowed:
                        self.infeasible = True
                        return
                    continue
                groups: Dict[Key, List[int]] = {}
                for pos, k in enumerate(keys):
                    groups.setdefault(k, []).append(pos)
                cid = len(self.constraints)
                self.constraints.append(
                    ([(k, tuple(pos)) for k, pos in groups.items()], rows)
                )
                for k in groups:
                    if len(self.domains[k]) > 1:
                        self.watch[k].append(cid)

    def _propagate(self, domains: Dict[Key, FrozenSet[int]], queue: Iterable[int]) -> bool:
        pending: Deque[int] = deque(queue)
        queued = set(pending)
        while pending:
            cid = pending.popleft()
            queued.discard(cid)
            groups, allowed = self.constraints[cid]
            support = [
                row
                for row in allowed
                if all(
                    row[pos[0]] in domains[k] and all(row[p] == row[pos[0]] for p in pos[1:])
                    for k, pos in groups
                )
            ]
            if not support:
                return False
            for k, pos in groups:
                values = frozenset(row[pos[0]] for row in support)
                if values == domains[k]:
                    continue
                domains[k] = domains[k] & values
                if not domains[k]:
                    return False
                for other in self.watch[k]:
                    if other not in queued:
                        queued.add(other)
                        pending.append(other)
        return True

    def _search(self, domains: Dict[Key, FrozenSet[int]]) -> Optional[Dict[Key, int]]:
        for key in self.keys:
            if len(domains[key]) > 1:
                break
        else:
            return {key: next(iter(domains[key])) for key in self.keys}
        for value in self.domains[key]:
            if value not in domains[key]:
                continue
            trial = dict(domains)
            trial[key] = frozenset((value,))
            if self._propagate(trial, self.watch[key]):
                found = self._search(trial)
                if found is not None:
                    return found
        return None

    def solve(self) -> Optional[np.ndarray]:
        if self.infeasible:
            return None
        domains = {key: frozenset(values) for key, values in self.domains.items()}
        if not self._propagate(domains, range(len(self.constraints))):
            return None
        found = self._search(domains)
        if found is None:
            return None
        table = np.zeros((self.size,) * self.arity, dtype=np.intp)
        for key, value in found.items():
            table[key] = value
        return table


def _pair_entries(pair: Pair, arity: int, rule: Callable[..., int]) -> Dict[Key, int]:
    a, b = pair
    return {key: rule(*key) for key in product((a, b), repeat=arity) if len(set(key)) > 1}


def _exists(language: ConstraintLanguage, arity: int, fixed: Mapping[Key, int]) -> bool:
    search = OperationSearch(language.size, arity, language.relations, fixed)
    return search.solve() is not None


def classify_pair(language: ConstraintLanguage, pair: Pair) -> PairLabel:
    a, b = sorted(pair)
    if a == b or not (0 <= a and b < language.size):
        raise InvalidArgument(f"{pair} is not a pair of distinct elements of the universe")
    directions = []
    for low, top in ((a, b), (b, a)):
        if _exists(language, 2, {(a, b): top, (b, a): top}):
            directions.append((low, top))
    if directions:
        return PairLabel.semilattice(*directions)
    if _exists(language, 3, _pair_entries((a, b), 3, _majority)):
        return PairLabel.majority()
    if _exists(language, 3, _pair_entries((a, b), 3, _affine)):
        return PairLabel.affine()
    return PairLabel.none()


def uniform_binary_tables(graph: EdgeLabeledGraph) -> Tuple[np.ndarray, np.ndarray]:
    """Tables of f and p, fully determined by the labels and the orientation."""
    n = graph.size
    x, y = np.indices((n, n))
    f = x.copy()
    p = x.copy()
    for (a, b), label in graph.pairs():
        if label.kind is EdgeKind.none:
            raise SynthesisError(f"pair {(a, b)} has no tractable label", (a, b))
        if label.kind is EdgeKind.semilattice:
            top = graph.orientation[(a, b)][1]
            f[a, b] = f[b, a] = p[a, b] = p[b, a] = top
        elif label.kind is EdgeKind.majority:
            p[a, b], p[b, a] = b, a
    return f, p


def uniform_ternary_entries(
    graph: EdgeLabeledGraph, f: np.ndarray
) -> Tuple[Dict[Key, int], Dict[Key, int]]:
    """Entries of g and h on argument tuples with at most two distinct values."""
    g: Dict[Key, int] = {}
    h: Dict[Key, int] = {}
    for (a, b), label in graph.pairs():
        for key in product((a, b), repeat=3):
            if len(set(key)) == 1:
                continue
            x, y, z = key
            folded = int(f[f[x, y], z])
            if label.kind is EdgeKind.semilattice:
                g[key] = h[key] = folded
            elif label.kind is EdgeKind.majority:
                g[key], h[key] = _majority(x, y, z), x
            else:
                g[key], h[key] = folded, _affine(x, y, z)
    for e in range(graph.size):
        g[(e, e, e)] = h[(e, e, e)] = e
    return g, h


def _first_argument_fill(size: int, entries: Mapping[Key, int]) -> np.ndarray:
    table = np.indices((size,) * 3)[0].copy()
    for key, value in entries.items():
        table[key] = value
    return table


def canonical_algebra(graph: EdgeLabeledGraph) -> Algebra:
    """Uniform tables with the first argument on triples of distinct elements."""
    f, p = uniform_binary_tables(graph)
    g, h = uniform_ternary_entries(graph, f)
    return Algebra(f, p, _first_argument_fill(graph.size, g), _first_argument_fill(graph.size, h))


def _preserves_all(table: np.ndarray, relations: Sequence[Relation]) -> bool:
    return all(closure_witness(rel, table) is None for rel in relations)


def synthesize_uniform_ops(
    language: ConstraintLanguage, graph: EdgeLabeledGraph
) -> Algebra:
    """Tables of f, g, h and p polymorphic for the language and uniform on every pair.

    Doubly-directed semilattice pairs are tried in both orientations,
    towards the larger element first.
    """
    if graph.size != language.size:
        raise InvalidArgument("graph and language have different universes")
    bad = [pair for pair, label in graph.pairs() if label.kind is EdgeKind.none]
    if bad:
        raise SynthesisError(f"pair {bad[0]} has no tractable label", bad[0])

    free = []
    for pair, label in graph.pairs():
        if label.kind is EdgeKind.semilattice and len(label.directions) == 2:
            first = label.preferred
            second = next(d for d in label.directions if d != first)
            free.append((pair, (first, second)))

    relations = language.relations
    for choice in product(*(options for _, options in free)):
        oriented = graph.oriented({pair: d for (pair, _), d in zip(free, choice)})
        f, p = uniform_binary_tables(oriented)
        if not (_preserves_all(f, relations) and _preserves_all(p, relations)):
            continue
        g_fixed, h_fixed = uniform_ternary_entries(oriented, f)
        g = OperationSearch(language.size, 3, relations, g_fixed).solve()
        if g is None:
            continue
        h = OperationSearch(language.size, 3, relations, h_fixed).solve()
        if h is None:
            continue
        return Algebra(f, p, g, h)
    raise SynthesisError("no orientation of the semilattice pairs admits uniform operations")


def check_uniformity_laws(
    algebra: Algebra, graph: EdgeLabeledGraph, relations: Sequence[Relation] = ()
) -> List[Violation]:
    """Every law the tables must satisfy, reported as data."""
    out = list(algebra.violations())
    f, p, g, h = algebra.f, algebra.p, algebra.g, algebra.h

    def expect(law: str, table: np.ndarray, key: Key, want: int, pair: Pair) -> None:
        got = int(table[key])
        if got != want:
            out.append(
                Violation(law, f"expected {want} at {key} on pair {set(pair)}, found {got}", key)
            )

    for (a, b), label in graph.pairs():
        pair = (a, b)
        if label.kind is EdgeKind.none:
            out.append(Violation("label", f"pair {set(pair)} has no tractable label", pair))
            continue
        for x, y in product(pair, repeat=2):
            if x == y:
                continue
            if label.kind is EdgeKind.semilattice:
                top = graph.orientation[pair][1]
                expect("f-semilattice", f, (x, y), top, pair)
                expect("p-semilattice", p, (x, y), top, pair)
            else:
                expect("f-projection", f, (x, y), x, pair)
                if label.kind is EdgeKind.majority:
                    expect("p-majority", p, (x, y), y, pair)
                else:
                    expect("p-affine", p, (x, y), x, pair)
        for key in product(pair, repeat=3):
            if len(set(key)) == 1:
                continue
            x, y, z = key
            folded = int(f[f[x, y], z])
            if label.kind is EdgeKind.semilattice:
                expect("g-semilattice", g, key, folded, pair)
                expect("h-semilattice", h, key, folded, pair)
            elif label.kind is EdgeKind.majority:
                expect("g-majority", g, key, _majority(x, y, z), pair)
                expect("h-majority", h, key, x, pair)
            else:
                expect("g-affine", g, key, folded, pair)
                expect("h-affine", h, key, _affine(x, y, z), pair)

    for n, rel in enumerate(relations):
        for name, table in algebra.items():
            witness = closure_witness(rel, table)
            if witness is not None:
                out.append(
                    Violation("polymorphism", f"{name} does not preserve relation #{n}", witness)
                )
    return out


def derive_m(algebra: Algebra) -> np.ndarray:
    """m(x, y, z) = h(g(x, y, z), g(y, z, x), g(z, x, y))."""
    x, y, z = np.indices((algebra.size,) * 3)
    g = algebra.g
    return algebra.h[g[x, y, z], g[y, z, x], g[z, x, y]]


class ClassifierVerdict(NamedTuple):
    graph: Optional[EdgeLabeledGraph] = None
    algebra: Optional[Algebra] = None
    witness: Optional[Pair] = None

    @property
    def tractable(self) -> bool:
        return self.algebra is not None

    @property
    def status(self) -> str:
        return "tractable" if self.tractable else "np-complete"

    @classmethod
    def np_complete(cls, pair: Pair) -> "ClassifierVerdict":
        return cls(witness=pair)


def classify_language(language: ConstraintLanguage) -> ClassifierVerdict:
    labels = {}
    for pair in combinations(range(language.size), 2):
        label = classify_pair(language, pair)
        if label.kind is EdgeKind.none:
            return ClassifierVerdict.np_complete(pair)
        labels[pair] = label
    graph = EdgeLabeledGraph(language.size, labels)
    algebra = synthesize_uniform_ops(language, graph)
    return ClassifierVerdict(graph=graph.oriented_by(algebra), algebra=algebra)
