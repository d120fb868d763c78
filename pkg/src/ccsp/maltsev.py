"""Compact-representation solver for instances with a Maltsev polymorphism.

A relation over ``n`` ordered variables is represented by a small set of its
tuples that witnesses every fork (i, a, b): two tuples agreeing before
position i and carrying a and b at position i. The whole relation is the
closure of the representation under m.
"""
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .model import Assignment, Instance, InvariantViolation

Fork = Tuple[int, int, int]

_CHUNK = 1 << 21


class _Representation:
    def __init__(self, m: np.ndarray, rows: np.ndarray) -> None:
        self.m = m
        self.rows = np.unique(rows, axis=0) if len(rows) else rows

    def __len__(self) -> int:
        return len(self.rows)

    def forks(self) -> Dict[Fork, Tuple[np.ndarray, np.ndarray]]:
        """Every fork witnessed by the representation, with one witnessing pair."""
        rows = self.rows
        out: Dict[Fork, Tuple[np.ndarray, np.ndarray]] = {}
        if not len(rows):
            return out
        groups = np.zeros(len(rows), dtype=np.intp)
        for i in range(rows.shape[1]):
            firsts: Dict[Tuple[int, int], int] = {}
            for r, key in enumerate(zip(groups.tolist(), rows[:, i].tolist())):
                firsts.setdefault(key, r)
            by_group: Dict[int, List[Tuple[int, int]]] = {}
            for (grp, value), r in firsts.items():
                by_group.setdefault(grp, []).append((value, r))
            for members in by_group.values():
                for a, ra in members:
                    for b, rb in members:
                        out.setdefault((i, a, b), (rows[ra], rows[rb]))
            keys = np.stack([groups, rows[:, i]], axis=1)
            _, groups = np.unique(keys, axis=0, return_inverse=True)
            groups = groups.reshape(-1)
        return out

    def project_closure(self, positions: Sequence[int]) -> Dict[Tuple[int, ...], np.ndarray]:
        """Closure of the projection on ``positions`` with a full tuple representing each value."""
        cols = list(positions)
        reps: Dict[Tuple[int, ...], np.ndarray] = {}
        for row in self.rows:
            reps.setdefault(tuple(row[cols].tolist()), row)
        frontier = list(reps)
        while frontier:
            keys = list(reps)
            known = np.array(keys, dtype=np.intp)
            fresh = np.array(frontier, dtype=np.intp)
            full_known = np.array([reps[k] for k in keys], dtype=np.intp)
            full_fresh = np.array([reps[k] for k in frontier], dtype=np.intp)
            step = max(1, _CHUNK // max(1, len(known) ** 2 * len(cols)))
            new: Dict[Tuple[int, ...], np.ndarray] = {}
            for slot in range(3):
                for start in range(0, len(fresh), step):
                    part = slice(start, start + step)
                    proj = [known, known, known]
                    full = [full_known, full_known, full_known]
                    proj[slot] = fresh[part]
                    full[slot] = full_fresh[part]
                    image = self.m[
                        proj[0][:, None, None, :],
                        proj[1][None, :, None, :],
                        proj[2][None, None, :, :],
                    ]
                    shape = image.shape[:3]
                    uniq, first = np.unique(image.reshape(-1, len(cols)), axis=0, return_index=True)
                    for value, n in zip(map(tuple, uniq.tolist()), first.tolist()):
                        if value in reps or value in new:
                            continue
                        i, j, k = np.unravel_index(n, shape)
                        new[value] = self.m[full[0][i], full[1][j], full[2][k]]
            reps.update(new)
            frontier = list(new)
        return reps

    def fix_values(self, prefix: Sequence[int]) -> "_Representation":
        """Representation of the subrelation whose first positions equal ``prefix``."""
        current = self
        for j, value in enumerate(prefix):
            if not len(current):
                return current
            forks = current.forks()
            base = current.project_closure([j]).get((value,))
            if base is None:
                return _Representation(self.m, current.rows[:0])
            rows = [base]
            cache: Dict[int, Dict[Tuple[int, ...], np.ndarray]] = {}
            for (i, a, b), (t2, t3) in forks.items():
                if i <= j:
                    continue
                if i not in cache:
                    cache[i] = current.project_closure([j, i])
                t1 = cache[i].get((value, a))
                if t1 is None:
                    continue
                rows.append(t1)
                rows.append(self.m[t1, t2, t3])
            current = _Representation(self.m, np.array(rows, dtype=np.intp))
        return current


def _product_representation(m: np.ndarray, domains: Sequence[Sequence[int]]) -> _Representation:
    base = [min(d) for d in domains]
    rows = [list(base)]
    for i, dom in enumerate(domains):
        for a in dom:
            row = list(base)
            row[i] = a
            rows.append(row)
    return _Representation(m, np.array(rows, dtype=np.intp).reshape(-1, len(domains)))


def _next(rep: _Representation, positions: Sequence[int], allowed: set) -> _Representation:
    """Representation of the intersection with a constraint on ``positions``."""
    m = rep.m
    rows: List[np.ndarray] = []
    cache: Dict[int, Dict[Tuple[int, ...], np.ndarray]] = {}
    last = max(positions)
    for (i, a, b), (t2, t3) in rep.forks().items():
        if i not in cache:
            cache[i] = rep.project_closure(list(positions) + [i])
        closure = cache[i]
        t = next((closure[s + (a,)] for s in sorted(allowed) if s + (a,) in closure), None)
        if t is None:
            continue
        if i > last:
            t_prime: Optional[np.ndarray] = m[t, t2, t3]
        else:
            narrowed = rep.fix_values(t[:i].tolist()).project_closure(list(positions) + [i])
            t_prime = next(
                (narrowed[s + (b,)] for s in sorted(allowed) if s + (b,) in narrowed), None
            )
        if t_prime is None:
            continue
        rows.append(t)
        rows.append(t_prime)
    if not rows:
        return _Representation(m, rep.rows[:0])
    return _Representation(m, np.array(rows, dtype=np.intp))


def solve_maltsev(instance: Instance, m: np.ndarray) -> Optional[Assignment]:
    """Exact solver for instances whose every domain carries m as a Maltsev operation."""
    constraints = [c.normalized() for c in instance.constraints]
    # order of first appearance in a scope
    seen = [v for c in constraints for v in c.scope]
    variables = list(dict.fromkeys(seen + list(instance.variables)))
    if not variables:
        return {}
    if instance.has_empty_domain():
        return None
    index = {v: i for i, v in enumerate(variables)}
    rep = _product_representation(m, [sorted(instance.domains[v]) for v in variables])
    for c in constraints:
        positions = [index[v] for v in c.scope]
        allowed = set(c.relation.tuples)
        if not allowed:
            return None
        rep = _next(rep, positions, allowed)
        if not len(rep):
            return None
    solution = {v: int(x) for v, x in zip(variables, rep.rows[0].tolist())}
    if not instance.is_solution(solution):
        raise InvariantViolation("compact representation produced a non-solution")
    return solution
