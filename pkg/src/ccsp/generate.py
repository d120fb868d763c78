"""Seeded random algebras, relations and instances."""
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import GeneratorConfig
from .graph import EdgeLabeledGraph, PairLabel
from .model import Algebra, Constraint, Instance, Relation, close_under_ops
from .polymorphism import ConstraintLanguage, canonical_algebra


def make_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def canonical_a3() -> Tuple[Algebra, EdgeLabeledGraph]:
    """Three elements: 0->1 semilattice, {0, 2} majority, {1, 2} affine."""
    graph = EdgeLabeledGraph(
        3,
        {
            (0, 1): PairLabel.semilattice((0, 1)),
            (0, 2): PairLabel.majority(),
            (1, 2): PairLabel.affine(),
        },
    )
    return canonical_algebra(graph), graph


def gen_graph(cfg: GeneratorConfig, rng: np.random.Generator) -> EdgeLabeledGraph:
    w = cfg.weights
    weights = np.array([w.semilattice, w.majority, w.affine], dtype=float)
    weights /= weights.sum()
    labels = {}
    for a, b in combinations(range(cfg.domain_size), 2):
        kind = int(rng.choice(3, p=weights))
        if kind == 0:
            labels[(a, b)] = PairLabel.semilattice((a, b) if rng.random() < 0.5 else (b, a))
        elif kind == 1:
            labels[(a, b)] = PairLabel.majority()
        else:
            labels[(a, b)] = PairLabel.affine()
    return EdgeLabeledGraph(cfg.domain_size, labels)


def gen_algebra(
    cfg: GeneratorConfig, rng: Optional[np.random.Generator] = None
) -> Tuple[Algebra, EdgeLabeledGraph]:
    rng = rng if rng is not None else make_rng(cfg.seed)
    graph = gen_graph(cfg, rng)
    return canonical_algebra(graph), graph


def gen_domain(size: int, rng: np.random.Generator) -> List[int]:
    """Nonempty random subset of the universe, the whole universe a third of the time."""
    if rng.random() < 1 / 3:
        return list(range(size))
    mask = rng.random(size) < 0.5
    if not mask.any():
        mask[rng.integers(size)] = True
    return np.flatnonzero(mask).tolist()


def gen_relation(
    algebra: Algebra,
    signature: Sequence[Sequence[int]],
    rng: np.random.Generator,
    seed_tuples: int = 2,
    planted: Optional[Sequence[int]] = None,
) -> Relation:
    """Closure of a few random tuples of the signature product, plus ``planted`` if given."""
    seed = [
        tuple(int(rng.choice(sorted(dom))) for dom in signature) for _ in range(seed_tuples)
    ]
    if planted is not None:
        seed.append(tuple(int(x) for x in planted))
    return close_under_ops(seed, algebra, signature=signature)


def gen_instance(
    algebra: Algebra,
    cfg: GeneratorConfig,
    rng: Optional[np.random.Generator] = None,
) -> Instance:
    rng = rng if rng is not None else make_rng(cfg.seed)
    variables = [f"v{i}" for i in range(cfg.variable_count)]
    domains = {v: gen_domain(algebra.size, rng) for v in variables}
    # with probability cfg.planted every relation contains one fixed assignment
    hidden: Optional[Dict[str, int]] = None
    if variables and rng.random() < cfg.planted:
        hidden = {v: int(rng.choice(domains[v])) for v in variables}
    constraints: List[Constraint] = []
    if variables:
        for _ in range(cfg.constraint_count):
            arity = int(rng.integers(1, min(cfg.max_arity, len(variables)) + 1))
            picked = rng.choice(len(variables), size=arity, replace=False)
            scope = tuple(variables[i] for i in picked.tolist())
            row = None if hidden is None else [hidden[v] for v in scope]
            relation = gen_relation(
                algebra, [domains[v] for v in scope], rng, cfg.seed_tuples, planted=row
            )
            constraints.append(Constraint(scope, relation))
    return Instance(algebra, variables, domains, constraints)


def gen_problem(cfg: GeneratorConfig) -> Tuple[Algebra, EdgeLabeledGraph, Instance]:
    """Algebra and instance from one seed, drawn from independent streams."""
    algebra_rng, instance_rng = make_rng(cfg.seed).spawn(2)
    algebra, graph = gen_algebra(cfg, algebra_rng)
    return algebra, graph, gen_instance(algebra, cfg, instance_rng)


def gen_language(
    algebra: Algebra, cfg: GeneratorConfig, rng: Optional[np.random.Generator] = None
) -> ConstraintLanguage:
    """Relations over the whole universe closed under the algebra."""
    rng = rng if rng is not None else make_rng(cfg.seed)
    universe = list(range(algebra.size))
    relations = []
    for _ in range(cfg.constraint_count):
        arity = int(rng.integers(1, cfg.max_arity + 1))
        relations.append(gen_relation(algebra, [universe] * arity, rng, cfg.seed_tuples))
    return ConstraintLanguage(algebra.size, relations)
