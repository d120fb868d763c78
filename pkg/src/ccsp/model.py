"""Finite universes, operation tables, relations and CSP instances.

Elements are dense integer ids ``0 .. size-1`` of an algebra's universe.
Every value defined here is treated as immutable once constructed.
"""
from functools import cached_property
from itertools import product
from typing import (
    Dict,
    FrozenSet,
    Hashable,
    Iterable,
    Iterator,
    List,
    Mapping,
    NamedTuple,
    Optional,
    Sequence,
    Tuple,
)

import numpy as np

Element = int
Variable = Hashable
Domain = FrozenSet[int]
Row = Tuple[int, ...]
Assignment = Dict[Variable, int]

# upper bound on the number of argument combinations materialised at once
_CHUNK = 1 << 21


class InvalidArgument(ValueError):
    pass


class InvariantViolation(AssertionError):
    pass


class Violation(NamedTuple):
    law: str
    message: str
    witness: Tuple = ()

    def __str__(self) -> str:
        return f"[{self.law}] {self.message}"


def _freeze(values: Iterable[int]) -> Domain:
    return frozenset(int(x) for x in values)


class Relation:
    arity: int
    tuples: FrozenSet[Row]
    signature: Tuple[Domain, ...]

    def __init__(
        self,
        tuples: Iterable[Sequence[int]],
        signature: Optional[Sequence[Iterable[int]]] = None,
        arity: Optional[int] = None,
    ) -> None:
        rows = frozenset(tuple(int(x) for x in t) for t in tuples)
        if arity is None:
            if signature is not None:
                arity = len(signature)
            elif rows:
                arity = len(next(iter(rows)))
            else:
                raise InvalidArgument("arity of an empty relation must be given")
        if arity < 1:
            raise InvalidArgument(f"arity must be positive, got {arity}")
        if any(len(r) != arity for r in rows):
            raise InvalidArgument(f"tuples of a relation must all have arity {arity}")

        if signature is None:
            sig = tuple(_freeze(r[i] for r in rows) for i in range(arity))
        else:
            sig = tuple(_freeze(s) for s in signature)
        if len(sig) != arity:
            raise InvalidArgument(
                f"signature has {len(sig)} positions, relation arity is {arity}"
            )
        for r in rows:
            for i, x in enumerate(r):
                if x not in sig[i]:
                    raise InvalidArgument(
                        f"tuple {r} leaves the signature at position {i}"
                    )

        self.arity = arity
        self.tuples = rows
        self.signature = sig

    @classmethod
    def full(cls, signature: Sequence[Iterable[int]]) -> "Relation":
        sig = [sorted(_freeze(s)) for s in signature]
        return cls(product(*sig), signature=sig, arity=len(sig))

    def __len__(self) -> int:
        return len(self.tuples)

    def __iter__(self) -> Iterator[Row]:
        return iter(self.rows())

    def __contains__(self, row: object) -> bool:
        return row in self.tuples

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Relation):
            return NotImplemented
        return self.tuples == other.tuples and self.signature == other.signature

    def __hash__(self) -> int:
        return hash((self.tuples, self.signature))

    def __repr__(self) -> str:
        shown = self.rows()[:6]
        more = ", ..." if len(self.tuples) > 6 else ""
        return f"Relation(arity={self.arity}, tuples={shown}{more})"

    def rows(self) -> List[Row]:
        return sorted(self.tuples)

    @cached_property
    def array(self) -> np.ndarray:
        out = np.array(self.rows(), dtype=np.intp).reshape(len(self.tuples), self.arity)
        out.setflags(write=False)
        return out

    def restrict(self, signature: Sequence[Iterable[int]]) -> "Relation":
        """Intersect with the product of ``signature``, which becomes the new signature."""
        sig = [_freeze(s) for s in signature]
        if len(sig) != self.arity:
            raise InvalidArgument("restriction signature does not match the arity")
        rows = (r for r in self.tuples if all(x in s for x, s in zip(r, sig)))
        return Relation(rows, signature=sig, arity=self.arity)

    def column(self, i: int) -> Domain:
        return _freeze(r[i] for r in self.tuples)

    def is_subdirect(self) -> bool:
        return all(self.column(i) == self.signature[i] for i in range(self.arity))


def is_subdirect(relation: Relation) -> bool:
    return relation.is_subdirect()


def project(relation: Relation, positions: Sequence[int]) -> Relation:
    """Projection of ``relation`` on ``positions`` (0-based, kept in the given order)."""
    idx = [int(i) for i in positions]
    if not idx:
        raise InvalidArgument("projection needs a nonempty index set")
    if len(set(idx)) != len(idx):
        raise InvalidArgument(f"repeated index in projection {idx}")
    for i in idx:
        if not 0 <= i < relation.arity:
            raise InvalidArgument(
                f"index {i} out of range for a relation of arity {relation.arity}"
            )
    rows = {tuple(r[i] for i in idx) for r in relation.tuples}
    return Relation(rows, signature=[relation.signature[i] for i in idx], arity=len(idx))


class Algebra:
    """A conservative algebra given by the tables of f, p (binary) and g, h (ternary)."""

    size: int
    f: np.ndarray
    p: np.ndarray
    g: np.ndarray
    h: np.ndarray

    OPERATIONS = ("f", "p", "g", "h")

    def __init__(
        self,
        f: Sequence,
        p: Sequence,
        g: Sequence,
        h: Sequence,
        check: bool = True,
    ) -> None:
        tables = {}
        for name, table, arity in (("f", f, 2), ("p", p, 2), ("g", g, 3), ("h", h, 3)):
            arr = np.array(table, dtype=np.intp)
            if arr.ndim != arity:
                raise InvalidArgument(f"table {name} must have {arity} dimensions")
            tables[name] = arr
        size = tables["f"].shape[0]
        for name, arr in tables.items():
            if any(dim != size for dim in arr.shape):
                raise InvalidArgument(
                    f"table {name} has shape {arr.shape}, universe size is {size}"
                )
            arr.setflags(write=False)
        self.size = size
        self.f = tables["f"]
        self.p = tables["p"]
        self.g = tables["g"]
        self.h = tables["h"]
        if check:
            problems = self.violations()
            if problems:
                raise InvalidArgument(f"invalid algebra: {problems[0]}")

    @classmethod
    def projections(cls, size: int) -> "Algebra":
        """Every operation is the first projection; a neutral placeholder algebra."""
        x2 = np.indices((size, size))[0]
        x3 = np.indices((size, size, size))[0]
        return cls(x2, x2, x3, x3)

    @property
    def universe(self) -> Tuple[int, ...]:
        return tuple(range(self.size))

    def table(self, name: str) -> np.ndarray:
        if name not in self.OPERATIONS:
            raise InvalidArgument(f"unknown operation {name!r}")
        return getattr(self, name)

    def items(self) -> Iterator[Tuple[str, np.ndarray]]:
        for name in self.OPERATIONS:
            yield name, getattr(self, name)

    def violations(self) -> List[Violation]:
        """Conservativity, idempotency and x·(x·y) = x·y."""
        out: List[Violation] = []
        for name, table in self.items():
            args = np.indices(table.shape)
            conservative = np.zeros(table.shape, dtype=bool)
            for a in args:
                conservative |= table == a
            if not conservative.all():
                key = tuple(int(i) for i in np.argwhere(~conservative)[0])
                out.append(
                    Violation("conservative", f"{name}{key} = {table[key]} is not an argument", key)
                )
            diag = table[(np.arange(self.size),) * table.ndim]
            if not (diag == np.arange(self.size)).all():
                a = int(np.argwhere(diag != np.arange(self.size))[0][0])
                out.append(Violation("idempotent", f"{name} is not idempotent at {a}", (a,)))
        x, y = np.indices((self.size, self.size))
        bad = self.f[x, self.f] != self.f
        if bad.any():
            key = tuple(int(i) for i in np.argwhere(bad)[0])
            out.append(Violation("maroti", f"f(x, f(x, y)) != f(x, y) at {key}", key))
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Algebra):
            return NotImplemented
        return all(np.array_equal(a, b) for (_, a), (_, b) in zip(self.items(), other.items()))

    def __repr__(self) -> str:
        return f"Algebra(size={self.size})"


def apply_componentwise(table: np.ndarray, *rows: Sequence[int]) -> Row:
    """Apply an operation table to tuples coordinate by coordinate."""
    if len(rows) != table.ndim:
        raise InvalidArgument(f"operation takes {table.ndim} arguments, got {len(rows)}")
    lengths = {len(r) for r in rows}
    if len(lengths) != 1:
        raise InvalidArgument(f"argument tuples have different arities {sorted(lengths)}")
    return tuple(int(table[col]) for col in zip(*rows))


def _images(
    table: np.ndarray, frontier: np.ndarray, known: np.ndarray
) -> Iterator[np.ndarray]:
    """Images of ``table`` over argument tuples with at least one argument in ``frontier``."""
    k = table.ndim
    width = known.shape[1]
    per_row = len(known) ** (k - 1)
    step = max(1, _CHUNK // max(1, per_row * width))
    for slot in range(k):
        for start in range(0, len(frontier), step):
            chunk = frontier[start : start + step]
            args = []
            for j in range(k):
                src = chunk if j == slot else known
                shape = [1] * (k + 1)
                shape[j] = len(src)
                shape[k] = width
                args.append(src.reshape(shape))
            yield table[tuple(args)].reshape(-1, width)


def close_under_ops(
    seed: Iterable[Sequence[int]],
    algebra: Algebra,
    signature: Optional[Sequence[Iterable[int]]] = None,
) -> Relation:
    """Least relation containing ``seed`` closed under f, p, g and h componentwise."""
    rows = {tuple(int(x) for x in r) for r in seed}
    if not rows:
        raise InvalidArgument("closure needs a nonempty seed")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise InvalidArgument("seed tuples have different arities")
    width = widths.pop()

    frontier = np.array(sorted(rows), dtype=np.intp)
    while len(frontier):
        known = np.array(sorted(rows), dtype=np.intp)
        fresh = set()
        for _, table in algebra.items():
            for images in _images(table, frontier, known):
                for r in np.unique(images, axis=0).tolist():
                    t = tuple(r)
                    if t not in rows:
                        fresh.add(t)
        rows |= fresh
        frontier = np.array(sorted(fresh), dtype=np.intp).reshape(-1, width)

    if signature is None:
        return Relation(rows, arity=width)
    return Relation(rows, signature=signature, arity=width)


def closure_witness(relation: Relation, table: np.ndarray) -> Optional[Tuple[Row, ...]]:
    """Argument tuples of ``relation`` whose image under ``table`` leaves it, if any."""
    if not relation.tuples:
        return None
    arr = relation.array
    k = table.ndim
    for images in _images(table, arr, arr):
        for r in np.unique(images, axis=0).tolist():
            if tuple(r) in relation.tuples:
                continue
            # recover one argument combination producing r
            for combo in product(relation.rows(), repeat=k):
                if apply_componentwise(table, *combo) == tuple(r):
                    return combo
    return None


def preserves(table: np.ndarray, relation: Relation) -> bool:
    return closure_witness(relation, table) is None


class Constraint(NamedTuple):
    scope: Tuple[Variable, ...]
    relation: Relation

    def normalized(self) -> "Constraint":
        """Equivalent constraint whose scope has no repeated variables."""
        if len(set(self.scope)) == len(self.scope):
            return self
        first: Dict[Variable, int] = {}
        for i, v in enumerate(self.scope):
            first.setdefault(v, i)
        keep = list(first.values())
        rows = {
            tuple(r[i] for i in keep)
            for r in self.relation.tuples
            if all(r[i] == r[first[v]] for i, v in enumerate(self.scope))
        }
        sig = [
            frozenset.intersection(
                *(self.relation.signature[i] for i, w in enumerate(self.scope) if w == v)
            )
            for v in first
        ]
        return Constraint(tuple(first), Relation(rows, signature=sig, arity=len(sig)))

    def is_satisfied(self, assignment: Mapping[Variable, int]) -> bool:
        return tuple(assignment[v] for v in self.scope) in self.relation.tuples


def _over_domains(relation: Relation, domains: Sequence[Domain]) -> Relation:
    """``relation`` with the scope domains as its signature, widened only by values outside them."""
    sig = tuple(d | relation.column(i) for i, d in enumerate(domains))
    if sig == relation.signature:
        return relation
    return Relation(relation.tuples, signature=sig, arity=relation.arity)


class Instance:
    """A CSP instance (V, δ, C) over a conservative algebra."""

    algebra: Algebra
    variables: Tuple[Variable, ...]
    domains: Dict[Variable, Domain]
    constraints: Tuple[Constraint, ...]

    def __init__(
        self,
        algebra: Algebra,
        variables: Iterable[Variable],
        domains: Mapping[Variable, Iterable[int]],
        constraints: Iterable[Tuple[Sequence[Variable], Relation]] = (),
    ) -> None:
        self.algebra = algebra
        self.variables = tuple(variables)
        if len(set(self.variables)) != len(self.variables):
            raise InvalidArgument("instance variables must be distinct")
        self.domains = {v: _freeze(domains[v]) for v in self.variables}
        known = set(self.variables)
        out = []
        for scope, relation in constraints:
            scope = tuple(scope)
            unknown = [v for v in scope if v not in known]
            if unknown:
                raise InvalidArgument(f"constraint scope uses unknown variables {unknown}")
            if len(scope) != relation.arity:
                raise InvalidArgument(
                    f"scope {scope} has length {len(scope)}, relation arity is {relation.arity}"
                )
            out.append(Constraint(scope, _over_domains(relation, [self.domains[v] for v in scope])))
        self.constraints = tuple(out)

    @property
    def summ(self) -> int:
        return sum(len(d) for d in self.domains.values())

    def has_empty_domain(self) -> bool:
        return any(not d for d in self.domains.values())

    def is_solution(self, assignment: Mapping[Variable, int]) -> bool:
        if any(v not in assignment or assignment[v] not in self.domains[v] for v in self.variables):
            return False
        return all(c.is_satisfied(assignment) for c in self.constraints)

    def restrict(self, domains: Mapping[Variable, Iterable[int]]) -> "Instance":
        """Replace some domains and restrict every constraint relation to the new domains."""
        new = dict(self.domains)
        for v, d in domains.items():
            new[v] = _freeze(d)
        constraints = [
            (c.scope, c.relation.restrict([new[v] for v in c.scope])) for c in self.constraints
        ]
        return Instance(self.algebra, self.variables, new, constraints)

    def with_algebra(self, algebra: Algebra) -> "Instance":
        return Instance(algebra, self.variables, self.domains, self.constraints)

    def __repr__(self) -> str:
        return (
            f"Instance(variables={len(self.variables)}, constraints={len(self.constraints)},"
            f" summ={self.summ})"
        )


class SolveResult:
    assignment: Optional[Assignment]

    def __init__(self, assignment: Optional[Mapping[Variable, int]] = None) -> None:
        self.assignment = dict(assignment) if assignment is not None else None

    @classmethod
    def sat(cls, assignment: Mapping[Variable, int]) -> "SolveResult":
        return cls(assignment)

    @classmethod
    def unsat(cls) -> "SolveResult":
        return cls(None)

    @property
    def satisfiable(self) -> bool:
        return self.assignment is not None

    @property
    def status(self) -> str:
        return "sat" if self.satisfiable else "unsat"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SolveResult):
            return NotImplemented
        return self.assignment == other.assignment

    def __repr__(self) -> str:
        if self.assignment is None:
            return "SolveResult(UNSAT)"
        return f"SolveResult(SAT {self.assignment})"


def validate_instance(instance: Instance) -> List[Violation]:
    out: List[Violation] = []
    size = instance.algebra.size
    for v in instance.variables:
        dom = instance.domains[v]
        if not dom:
            out.append(Violation("domain", f"domain of {v!r} is empty", (v,)))
        outside = sorted(x for x in dom if not 0 <= x < size)
        if outside:
            out.append(Violation("domain", f"domain of {v!r} leaves the universe: {outside}", (v,)))

    for n, c in enumerate(instance.constraints):
        for row in c.relation.rows():
            for v, x in zip(c.scope, row):
                if x not in instance.domains[v]:
                    out.append(
                        Violation(
                            "constraint",
                            f"constraint #{n} on {c.scope} has tuple {row} outside δ({v!r})",
                            (n, row),
                        )
                    )
                    break
        if any(x >= size or x < 0 for row in c.relation.tuples for x in row):
            continue
        for name, table in instance.algebra.items():
            witness = closure_witness(c.relation, table)
            if witness is not None:
                image = apply_componentwise(table, *witness)
                out.append(
                    Violation(
                        "closure",
                        f"constraint #{n} is not closed under {name}: {name}{witness} = {image}",
                        (n, name) + tuple(witness),
                    )
                )
    return out
