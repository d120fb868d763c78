"""Edge-labelled graph of a conservative algebra."""
from enum import Enum
from itertools import combinations
from typing import Dict, FrozenSet, Iterator, Mapping, NamedTuple, Optional, Tuple

import numpy as np

from .model import Algebra, InvalidArgument

Pair = Tuple[int, int]


class EdgeKind(str, Enum):
    semilattice = "semilattice"
    majority = "majority"
    affine = "affine"
    none = "none"


class PairLabel(NamedTuple):
    kind: EdgeKind
    # (a, b) means a semilattice term on {a, b} absorbs towards b
    directions: FrozenSet[Pair] = frozenset()

    @classmethod
    def semilattice(cls, *directions: Pair) -> "PairLabel":
        return cls(EdgeKind.semilattice, frozenset(directions))

    @classmethod
    def majority(cls) -> "PairLabel":
        return cls(EdgeKind.majority)

    @classmethod
    def affine(cls) -> "PairLabel":
        return cls(EdgeKind.affine)

    @classmethod
    def none(cls) -> "PairLabel":
        return cls(EdgeKind.none)

    @property
    def preferred(self) -> Optional[Pair]:
        """Direction used by default: towards the larger element when both are possible."""
        if not self.directions:
            return None
        return max(self.directions, key=lambda d: (d[1], d[0]))

    def __str__(self) -> str:
        if self.kind is EdgeKind.semilattice:
            arrows = ", ".join(f"{a}->{b}" for a, b in sorted(self.directions))
            return f"semilattice({arrows})"
        return self.kind.value


def _key(a: int, b: int) -> Pair:
    if a == b:
        raise InvalidArgument(f"pair labels need two distinct elements, got {a} twice")
    return (a, b) if a < b else (b, a)


class EdgeLabeledGraph:
    size: int
    labels: Dict[Pair, PairLabel]
    orientation: Dict[Pair, Pair]

    def __init__(
        self,
        size: int,
        labels: Mapping[Pair, PairLabel],
        orientation: Optional[Mapping[Pair, Pair]] = None,
    ) -> None:
        self.size = size
        self.labels = {}
        for (a, b), label in labels.items():
            if not (0 <= a < size and 0 <= b < size):
                raise InvalidArgument(f"pair {(a, b)} leaves a universe of size {size}")
            self.labels[_key(a, b)] = label
        for pair in combinations(range(size), 2):
            self.labels.setdefault(pair, PairLabel.none())

        self.orientation = {}
        given = dict(orientation or {})
        for pair, label in self.labels.items():
            if label.kind is not EdgeKind.semilattice:
                continue
            if not label.directions:
                raise InvalidArgument(f"semilattice pair {pair} has no direction")
            chosen = given.get(pair, label.preferred)
            if chosen not in label.directions:
                raise InvalidArgument(f"orientation {chosen} is not allowed on pair {pair}")
            self.orientation[pair] = chosen  # type: ignore

    @classmethod
    def from_algebra(cls, algebra: Algebra) -> "EdgeLabeledGraph":
        return graph_from_algebra(algebra)

    def label(self, a: int, b: int) -> PairLabel:
        return self.labels[_key(a, b)]

    def kind(self, a: int, b: int) -> EdgeKind:
        return self.label(a, b).kind

    def arc(self, a: int, b: int) -> bool:
        """True when the chosen semilattice orientation runs from a to b."""
        if a == b:
            return False
        return self.orientation.get(_key(a, b)) == (a, b)

    def pairs(self) -> Iterator[Tuple[Pair, PairLabel]]:
        for pair in sorted(self.labels):
            yield pair, self.labels[pair]

    def is_total(self) -> bool:
        return all(label.kind is not EdgeKind.none for label in self.labels.values())

    def oriented(self, orientation: Mapping[Pair, Pair]) -> "EdgeLabeledGraph":
        return EdgeLabeledGraph(self.size, self.labels, {**self.orientation, **orientation})

    def oriented_by(self, algebra: Algebra) -> "EdgeLabeledGraph":
        """Orient every semilattice pair the way the table of f does."""
        chosen = {}
        for pair, label in self.labels.items():
            if label.kind is EdgeKind.semilattice:
                a, b = pair
                top = int(algebra.f[a, b])
                chosen[pair] = (a, b) if top == b else (b, a)
        return self.oriented(chosen)

    def matrix(self, kind: EdgeKind) -> np.ndarray:
        """Boolean adjacency of one edge kind; semilattice arcs follow the orientation."""
        out = np.zeros((self.size, self.size), dtype=bool)
        for (a, b), label in self.labels.items():
            if label.kind is not kind:
                continue
            if kind is EdgeKind.semilattice:
                u, v = self.orientation[(a, b)]
                out[u, v] = True
            else:
                out[a, b] = out[b, a] = True
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EdgeLabeledGraph):
            return NotImplemented
        return (
            self.size == other.size
            and self.labels == other.labels
            and self.orientation == other.orientation
        )

    def __repr__(self) -> str:
        shown = ", ".join(f"{a}{b}:{label}" for (a, b), label in self.pairs())
        return f"EdgeLabeledGraph({shown})"


def graph_from_algebra(algebra: Algebra) -> EdgeLabeledGraph:
    """Recover pair labels from the tables of an algebra built by the uniform rules."""
    f, g, h = algebra.f, algebra.g, algebra.h
    labels = {}
    orientation = {}
    for a, b in combinations(range(algebra.size), 2):
        if f[a, b] == f[b, a]:
            top = int(f[a, b])
            low = a if top == b else b
            labels[(a, b)] = PairLabel.semilattice((low, top))
            orientation[(a, b)] = (low, top)
        elif g[a, a, b] == a and g[a, b, a] == a and g[b, a, a] == a and g[b, b, a] == b:
            labels[(a, b)] = PairLabel.majority()
        elif h[a, a, b] == b and h[b, a, a] == b and h[a, b, a] == b and h[b, b, a] == a:
            labels[(a, b)] = PairLabel.affine()
        else:
            labels[(a, b)] = PairLabel.none()
    return EdgeLabeledGraph(algebra.size, labels, orientation)
