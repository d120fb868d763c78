"""Batch runs: oracle comparison, the structural law suite and the benchmark."""
import time
from functools import partial
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas
import rich.progress
from wasabi import msg

from .config import GeneratorConfig, SolverConfig
from .executor import map_problems
from .generate import gen_algebra, gen_domain, gen_problem, gen_relation
from .graph import EdgeLabeledGraph
from .laws import LAWS, LawStatus, check_law, random_components, random_path
from .model import Algebra, Relation, project
from .oracle import brute_force_solve
from .solver import SolveTrace, solve

LAW_COLUMNS = ["sample", "law", "arity", "status", "detail"]


def _progress(items: Sequence[Any], description: str, show: bool) -> Iterable[Any]:
    if not show:
        return items
    return rich.progress.track(items, description=description, total=len(items))


def _seeds(cfg: GeneratorConfig, count: int) -> List[GeneratorConfig]:
    return [cfg.copy(update={"seed": (cfg.seed + i) % 2 ** 64}) for i in range(count)]


def _compare_one(
    cfg: GeneratorConfig, solver_config: SolverConfig, budget: Optional[int]
) -> Dict[str, Any]:
    _, graph, instance = gen_problem(cfg)
    trace = SolveTrace()
    start = time.perf_counter()
    result = solve(instance, graph, solver_config, trace)
    seconds = time.perf_counter() - start
    expected = brute_force_solve(instance, budget)
    return {
        "seed": cfg.seed,
        "variables": len(instance.variables),
        "constraints": len(instance.constraints),
        "summ": instance.summ,
        "solver": result.status,
        "oracle": expected.status,
        "agree": result.status == expected.status,
        "verified": result.assignment is None or instance.is_solution(result.assignment),
        "nodes": trace.node_count,
        "depth": trace.depth,
        "guideline": trace.guideline,
        "seconds": seconds,
    }


def compare_with_oracle(
    cfg: GeneratorConfig,
    count: int,
    solver_config: Optional[SolverConfig] = None,
    budget: Optional[int] = None,
    jobs: int = 1,
    progress: bool = False,
) -> pandas.DataFrame:
    """Solve ``count`` generated problems with consecutive seeds, checking each with the oracle."""
    run = partial(_compare_one, solver_config=solver_config or SolverConfig(), budget=budget)
    configs = _seeds(cfg, count)
    if progress and jobs == 1:
        rows = [run(c) for c in _progress(configs, "Comparing with oracle", progress)]
    else:
        rows = map_problems(run, configs, jobs)
    df = pandas.DataFrame.from_records(rows)
    if count and not df.agree.all():
        msg.fail(f"{int((~df.agree).sum())} of {count} verdicts disagree with the oracle")
    return df


class LawSuiteReport:
    def __init__(self, frame: pandas.DataFrame) -> None:
        self.frame = frame

    def counts(self) -> pandas.DataFrame:
        """Outcome counts per law, one column per status."""
        if self.frame.empty:
            return pandas.DataFrame(columns=[s.value for s in LawStatus])
        table = self.frame.groupby(["law", "status"]).size().unstack(fill_value=0)
        return table.reindex(columns=[s.value for s in LawStatus], fill_value=0)

    @property
    def failures(self) -> pandas.DataFrame:
        return self.frame[self.frame.status == LawStatus.failed.value]

    @property
    def ok(self) -> bool:
        return self.failures.empty

    def __len__(self) -> int:
        return len(self.frame)


def _law_inputs(
    name: str,
    relation: Relation,
    algebra: Algebra,
    graph: EdgeLabeledGraph,
    rng: np.random.Generator,
) -> Optional[Dict[str, Any]]:
    """Random inputs for one law, None when the relation cannot host it."""
    n = relation.arity
    if name == "path-step":
        return {"relation": relation, "algebra": algebra, "graph": graph}
    if name in ("subdirect", "bucket", "linked-rectangularity"):
        if n < 2:
            return None
        pair = sorted(rng.choice(n, size=2, replace=False).tolist())
        binary = project(relation, pair)
        components = random_components(binary, graph, rng)
        return {"relation": binary, "graph": graph, "components": components}
    if name in ("connectivity", "rectangularity", "crt"):
        components = random_components(relation, graph, rng)
        return {"relation": relation, "graph": graph, "components": components}
    if name == "collection-extension":
        if n < 2:
            return None
        components = random_components(relation, graph, rng, positions=range(n - 1))
        return {"relation": relation, "graph": graph, "components": components}
    width = int(rng.integers(1, n + 1))
    positions = sorted(rng.choice(n, size=width, replace=False).tolist())
    path = random_path(relation, graph, positions, rng, steps=int(rng.integers(1, 5)))
    if name == "max-extension":
        return {"relation": relation, "graph": graph, "positions": positions, "head": path[0]}
    return {"relation": relation, "graph": graph, "positions": positions, "path": path}


def _sample(
    cfg: GeneratorConfig,
    rng: np.random.Generator,
    algebra: Optional[Algebra],
    graph: Optional[EdgeLabeledGraph],
) -> Tuple[Algebra, EdgeLabeledGraph, Relation]:
    if algebra is None or graph is None:
        algebra, graph = gen_algebra(cfg, rng)
    arity = int(rng.integers(1, cfg.max_arity + 1))
    signature = [gen_domain(algebra.size, rng) for _ in range(arity)]
    relation = gen_relation(algebra, signature, rng, cfg.seed_tuples)
    return algebra, graph, relation


def run_law_suite(
    cfg: GeneratorConfig,
    algebra: Optional[Algebra] = None,
    graph: Optional[EdgeLabeledGraph] = None,
    laws: Optional[Sequence[str]] = None,
    progress: bool = False,
) -> LawSuiteReport:
    """Check every law on ``cfg.samples`` random closed relations.

    Without an algebra each sample draws its own from the generator.
    """
    names = list(laws) if laws is not None else list(LAWS)
    rng = np.random.default_rng(cfg.seed)
    streams = rng.spawn(cfg.samples) if cfg.samples else []
    rows = []
    for sample, stream in enumerate(_progress(streams, "Checking laws", progress)):
        alg, g, relation = _sample(cfg, stream, algebra, graph)
        for name in names:
            inputs = _law_inputs(name, relation, alg, g, stream)
            if inputs is None:
                continue
            outcome = check_law(name, **inputs)
            rows.append(
                {
                    "sample": sample,
                    "law": name,
                    "arity": inputs["relation"].arity,
                    "status": outcome.status.value,
                    "detail": outcome.detail,
                }
            )
    return LawSuiteReport(pandas.DataFrame.from_records(rows, columns=LAW_COLUMNS))


def _bench_one(cfg: GeneratorConfig, solver_config: SolverConfig) -> Dict[str, Any]:
    _, graph, instance = gen_problem(cfg)
    trace = SolveTrace()
    start = time.perf_counter()
    result = solve(instance, graph, solver_config, trace)
    return {
        "variables": cfg.variable_count,
        "constraints": cfg.constraint_count,
        "seed": cfg.seed,
        "status": result.status,
        "seconds": time.perf_counter() - start,
        "nodes": trace.node_count,
        "depth": trace.depth,
        "guideline": trace.guideline,
    }


def run_bench(
    sizes: Sequence[int],
    cfg: GeneratorConfig,
    repeats: int = 1,
    solver_config: Optional[SolverConfig] = None,
    jobs: int = 1,
    constraint_ratio: float = 1.5,
) -> pandas.DataFrame:
    """Solve generated instances of growing variable count.

    The constraint count is ``constraint_ratio`` times the variable count.
    """
    solver_config = solver_config or SolverConfig()
    configs = []
    for size in sizes:
        sized = cfg.copy(
            update={"variable_count": size, "constraint_count": int(round(size * constraint_ratio))}
        )
        configs.extend(_seeds(sized, repeats))
    run = partial(_bench_one, solver_config=solver_config)
    return pandas.DataFrame.from_records(map_problems(run, configs, jobs))
