"""Exhaustive reference solver."""
from typing import Iterator, Optional

import numpy as np

from .model import Instance, InvalidArgument, SolveResult

_CHUNK = 1 << 16


class BudgetExceeded(InvalidArgument):
    def __init__(self, size: int, budget: int) -> None:
        super().__init__(f"{size} assignments exceed the enumeration budget of {budget}")
        self.size = size
        self.budget = budget


def search_space(instance: Instance) -> int:
    size = 1
    for d in instance.domains.values():
        size *= len(d)
    return size


def _chunks(instance: Instance) -> Iterator[np.ndarray]:
    """All assignments as rows of values, in variable order, a chunk at a time."""
    doms = [np.array(sorted(instance.domains[v]), dtype=np.intp) for v in instance.variables]
    sizes = [len(d) for d in doms]
    if not sizes:
        yield np.zeros((1, 0), dtype=np.intp)
        return
    total = search_space(instance)
    for start in range(0, total, _CHUNK):
        digits = np.unravel_index(np.arange(start, min(total, start + _CHUNK)), sizes)
        yield np.stack([d[i] for d, i in zip(doms, digits)], axis=1)


def all_solutions(instance: Instance, budget: Optional[int] = None) -> np.ndarray:
    """Every solution as a row of values in variable order."""
    found = list(_solutions(instance, budget, first=False))
    if not found:
        return np.zeros((0, len(instance.variables)), dtype=np.intp)
    return np.concatenate(found)


def _solutions(instance: Instance, budget: Optional[int], first: bool) -> Iterator[np.ndarray]:
    total = search_space(instance)
    if budget is not None and total > budget:
        raise BudgetExceeded(total, budget)
    index = {v: i for i, v in enumerate(instance.variables)}
    d = instance.algebra.size
    checks = []
    for c in instance.constraints:
        table = np.zeros((d,) * c.relation.arity, dtype=bool)
        if len(c.relation):
            table[tuple(c.relation.array.T)] = True
        checks.append(([index[v] for v in c.scope], table))
    for rows in _chunks(instance):
        keep = np.ones(len(rows), dtype=bool)
        for cols, table in checks:
            keep &= table[tuple(rows[:, i] for i in cols)]
        if keep.any():
            found = rows[keep]
            yield found[:1] if first else found
            if first:
                return


def brute_force_solve(instance: Instance, budget: Optional[int] = None) -> SolveResult:
    """Exact verdict by enumerating the assignments in variable order."""
    for found in _solutions(instance, budget, first=True):
        return SolveResult.sat(
            {v: int(x) for v, x in zip(instance.variables, found[0].tolist())}
        )
    return SolveResult.unsat()
