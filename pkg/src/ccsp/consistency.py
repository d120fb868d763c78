"""3-minimality: partial-solution tables on every set of at most three variables.

Pair tables live in one boolean matrix indexed by (variable, value) on both
axes, with domains on the diagonal. Three-variable tables are kept only for
triples inside a constraint scope; for every other triple the table is the
join of its three pair tables.
"""
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .model import Domain, InvalidArgument, Instance, Relation, Variable

Triple = Tuple[int, int, int]


class MinimalityTables:
    """Partial-solution tables R°_W for |W| <= 3 of one instance."""

    variables: Tuple[Variable, ...]
    size: int
    pairs: np.ndarray
    triples: Dict[Triple, np.ndarray]

    def __init__(
        self,
        variables: Sequence[Variable],
        size: int,
        pairs: np.ndarray,
        triples: Dict[Triple, np.ndarray],
    ) -> None:
        self.variables = tuple(variables)
        self.index = {v: i for i, v in enumerate(self.variables)}
        self.size = size
        self.pairs = pairs
        self.triples = triples

    @classmethod
    def from_instance(cls, instance: Instance) -> "MinimalityTables":
        """Tables read directly off the domains and constraints, before any propagation."""
        return _Propagator(instance).tables()

    @property
    def blocks(self) -> np.ndarray:
        n, d = len(self.variables), self.size
        return self.pairs.reshape(n, d, n, d)

    def domain(self, v: Variable) -> Domain:
        i = self.index[v]
        return frozenset(np.flatnonzero(self.blocks[i, :, i, :].diagonal()).tolist())

    def is_empty(self) -> bool:
        n, d = len(self.variables), self.size
        if n == 0:
            return False
        diag = self.pairs.diagonal().reshape(n, d)
        return not diag.any(axis=1).all()

    def table(self, scope: Sequence[Variable]) -> Relation:
        """R°_W for a scope of one to three distinct variables, in the given order."""
        idx = [self.index[v] for v in scope]
        if not 1 <= len(idx) <= 3 or len(set(idx)) != len(idx):
            raise InvalidArgument(f"tables exist for one to three distinct variables, got {scope}")
        doms = [sorted(self.domain(v)) for v in scope]
        if len(idx) == 1:
            return Relation([(a,) for a in doms[0]], signature=doms, arity=1)
        if len(idx) == 2:
            block = self.blocks[idx[0], :, idx[1], :]
            rows = [tuple(r) for r in np.argwhere(block).tolist()]
            return Relation(rows, signature=doms, arity=2)
        cube = self._cube(idx)
        rows = [tuple(r) for r in np.argwhere(cube).tolist()]
        return Relation(rows, signature=doms, arity=3)

    def _cube(self, idx: Sequence[int]) -> np.ndarray:
        b = self.blocks
        x, y, z = idx
        cube = b[x, :, y, :][:, :, None] & b[x, :, z, :][:, None, :] & b[y, :, z, :][None, :, :]
        key = tuple(sorted(idx))
        if key in self.triples:
            order = np.argsort(np.argsort(idx))
            # reorder the stored table (sorted axes) into the requested axis order
            stored = np.transpose(self.triples[key], axes=[int(o) for o in order])
            cube = cube & stored
        return cube

    def is_within(self, other: "MinimalityTables") -> bool:
        """Every table is contained in the corresponding table of ``other``."""
        if self.variables != other.variables or self.size != other.size:
            return False
        if (self.pairs & ~other.pairs).any():
            return False
        for key, cube in self.triples.items():
            if key in other.triples and (cube & ~other.triples[key]).any():
                return False
        return True

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MinimalityTables):
            return NotImplemented
        return (
            self.variables == other.variables
            and np.array_equal(self.pairs, other.pairs)
            and self.triples.keys() == other.triples.keys()
            and all(np.array_equal(self.triples[k], other.triples[k]) for k in self.triples)
        )


class _Propagator:
    """Mutable working state of the propagation over one instance."""

    def __init__(self, instance: Instance, tables: Optional[MinimalityTables] = None) -> None:
        self.instance = instance
        self.variables = instance.variables
        self.index = {v: i for i, v in enumerate(self.variables)}
        self.n = n = len(self.variables)
        self.d = d = instance.algebra.size

        if tables is not None:
            self.pairs = tables.pairs.copy()
            self.triples = {k: t.copy() for k, t in tables.triples.items()}
        else:
            dom = np.zeros((n, d), dtype=bool)
            for i, v in enumerate(self.variables):
                dom[i, sorted(instance.domains[v])] = True
            flat = dom.reshape(-1)
            self.pairs = flat[:, None] & flat[None, :]
            off_diagonal = np.kron(np.eye(n, dtype=bool), ~np.eye(d, dtype=bool))
            self.pairs &= ~off_diagonal
            self.triples = {}
        self.blocks = self.pairs.reshape(n, d, n, d)

        self.constraints: List[Tuple[Tuple[int, ...], np.ndarray]] = []
        for c in instance.constraints:
            c = c.normalized()
            idx = tuple(self.index[v] for v in c.scope)
            self.constraints.append((idx, c.relation.array.copy()))
        if tables is None:
            for idx, rows in self.constraints:
                self._meet_constraint(idx, rows)

    def tables(self) -> MinimalityTables:
        triples = {k: t.copy() for k, t in self.triples.items()}
        return MinimalityTables(self.variables, self.d, self.pairs.copy(), triples)

    def _domains(self) -> np.ndarray:
        return self.pairs.diagonal().reshape(self.n, self.d)

    def _set_domains(self, dom: np.ndarray) -> None:
        flat = dom.reshape(-1)
        self.pairs &= flat[:, None]
        self.pairs &= flat[None, :]

    def _meet_constraint(self, idx: Tuple[int, ...], rows: np.ndarray) -> None:
        k = len(idx)
        if k == 1:
            keep = np.zeros((self.n, self.d), dtype=bool)
            keep[:] = True
            keep[idx[0]] = False
            keep[idx[0], rows[:, 0]] = True
            self._set_domains(keep & self._domains())
            return
        for i, j in combinations(range(k), 2):
            mat = np.zeros((self.d, self.d), dtype=bool)
            mat[rows[:, i], rows[:, j]] = True
            self.blocks[idx[i], :, idx[j], :] &= mat
            self.blocks[idx[j], :, idx[i], :] &= mat.T
        for pos in combinations(range(k), 3):
            order = sorted(pos, key=lambda p: idx[p])
            key = tuple(idx[p] for p in order)
            cube = np.zeros((self.d,) * 3, dtype=bool)
            cube[rows[:, order[0]], rows[:, order[1]], rows[:, order[2]]] = True
            if key in self.triples:
                self.triples[key] &= cube
            else:
                self.triples[key] = cube

    def _measure(self) -> int:
        return (
            int(self.pairs.sum())
            + sum(int(t.sum()) for t in self.triples.values())
            + sum(len(rows) for _, rows in self.constraints)
        )

    def run(self) -> bool:
        """Propagate to the fixpoint; False when some table becomes empty."""
        if self.n == 0:
            return all(len(rows) for _, rows in self.constraints)
        while True:
            before = self._measure()
            if not self._path_consistency():
                return False
            if not (self._filter_triples() and self._filter_constraints()):
                return False
            if self._measure() == before:
                return True

    def _path_consistency(self) -> bool:
        n, d = self.n, self.d
        while True:
            dom = self._domains()
            if not dom.any(axis=1).all():
                return False
            support = self.blocks.any(axis=3).all(axis=2)
            self._set_domains(dom & support)
            current = self.pairs.astype(np.float32)
            ok = self.pairs.copy()
            for w in range(n):
                cols = slice(w * d, (w + 1) * d)
                ok &= (current[:, cols] @ current[cols, :]) > 0
            if np.array_equal(ok, self.pairs):
                return bool(self._domains().any(axis=1).all())
            self.pairs[...] = ok

    def _filter_triples(self) -> bool:
        b = self.blocks
        for (x, y, z), cube in self.triples.items():
            cube &= b[x, :, y, :][:, :, None]
            cube &= b[x, :, z, :][:, None, :]
            cube &= b[y, :, z, :][None, :, :]
            if not cube.any():
                return False
            b[x, :, y, :] &= cube.any(axis=2)
            b[x, :, z, :] &= cube.any(axis=1)
            b[y, :, z, :] &= cube.any(axis=0)
            b[y, :, x, :] &= b[x, :, y, :].T
            b[z, :, x, :] &= b[x, :, z, :].T
            b[z, :, y, :] &= b[y, :, z, :].T
        return True

    def _filter_constraints(self) -> bool:
        b = self.blocks
        for n, (idx, rows) in enumerate(self.constraints):
            k = len(idx)
            keep = np.ones(len(rows), dtype=bool)
            for i in range(k):
                keep &= b[idx[i], rows[:, i], idx[i], rows[:, i]]
            for i, j in combinations(range(k), 2):
                keep &= b[idx[i], rows[:, i], idx[j], rows[:, j]]
            for pos in combinations(range(k), 3):
                order = sorted(pos, key=lambda p: idx[p])
                key = tuple(idx[p] for p in order)
                cube = self.triples.get(key)
                if cube is None:
                    continue
                keep &= cube[rows[:, order[0]], rows[:, order[1]], rows[:, order[2]]]
            if not keep.any():
                return False
            if keep.all():
                continue
            rows = rows[keep]
            self.constraints[n] = (idx, rows)
            self._meet_constraint(idx, rows)
        return True

    def result(self) -> Instance:
        """The instance with pruned domains and constraint relations."""
        dom = self._domains()
        domains = {
            v: frozenset(np.flatnonzero(dom[i]).tolist()) for i, v in enumerate(self.variables)
        }
        constraints = []
        for idx, rows in self.constraints:
            scope = tuple(self.variables[i] for i in idx)
            sig = [domains[v] for v in scope]
            rel = Relation((tuple(r) for r in rows.tolist()), signature=sig, arity=len(scope))
            constraints.append((scope, rel))
        return Instance(self.instance.algebra, self.variables, domains, constraints)


def establish_3_minimality(
    instance: Instance,
) -> Optional[Tuple[Instance, MinimalityTables]]:
    """Prune the instance to a 3-minimal one with the same solutions; None when it is UNSAT."""
    if instance.has_empty_domain():
        return None
    state = _Propagator(instance)
    if not state.run():
        return None
    return state.result(), state.tables()


def is_3_minimal(instance: Instance, tables: MinimalityTables) -> bool:
    """True when propagation would change neither ``tables`` nor the instance."""
    if tables.variables != instance.variables or tables.size != instance.algebra.size:
        return False
    if tables.is_empty():
        return False
    if any(tables.domain(v) != instance.domains[v] for v in instance.variables):
        return False
    state = _Propagator(instance, tables)
    before = [len(rows) for _, rows in state.constraints]
    if not state.run():
        return False
    after = [len(rows) for _, rows in state.constraints]
    return before == after and state.tables() == tables
