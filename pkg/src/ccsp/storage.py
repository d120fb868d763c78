"""Reading and writing algebra, language, instance and result files."""
import json
from pathlib import Path
from typing import Any, Dict, Hashable, List, NamedTuple, Optional, Tuple, Union

from .graph import EdgeKind, EdgeLabeledGraph, PairLabel, graph_from_algebra
from .model import Algebra, Instance, InvalidArgument, Relation, SolveResult, Variable
from .polymorphism import (
    ConstraintLanguage,
    SynthesisError,
    canonical_algebra,
    classify_language,
    synthesize_uniform_ops,
)
from .schema import (
    AlgebraModel,
    ConstraintModel,
    InstanceModel,
    LabelKind,
    LabelModel,
    LanguageModel,
    RelationModel,
    ResultModel,
    ResultStatus,
)

PathLike = Union[str, Path]


def variable_name(v: Variable) -> str:
    """Variables of t(P) are pairs (v, b) and are written as ``v@b``."""
    if isinstance(v, tuple) and len(v) == 2:
        return f"{variable_name(v[0])}@{v[1]}"
    return str(v)


def parse_variable(name: str) -> Hashable:
    head, sep, tail = name.rpartition("@")
    if sep and head and tail.isdigit():
        return (parse_variable(head), int(tail))
    return name


def _graph_from_labels(size: int, labels: List[LabelModel]) -> EdgeLabeledGraph:
    out = {}
    orientation = {}
    for label in labels:
        a, b = label.pair
        if not (0 <= a < size and 0 <= b < size):
            raise InvalidArgument(f"labelled pair {(a, b)} leaves the universe")
        key = (min(a, b), max(a, b))
        if label.label == LabelKind.Majority:
            out[key] = PairLabel.majority()
        elif label.label == LabelKind.Affine:
            out[key] = PairLabel.affine()
        elif label.direction is None:
            out[key] = PairLabel.semilattice((a, b), (b, a))
        else:
            d = (label.direction[0], label.direction[1])
            out[key] = PairLabel.semilattice(d)
            orientation[key] = d
    return EdgeLabeledGraph(size, out, orientation)


def _relation(model: RelationModel) -> Relation:
    return Relation(model.tuples, arity=model.arity)


def language_from_model(model: LanguageModel) -> ConstraintLanguage:
    return ConstraintLanguage(len(model.universe), [_relation(r) for r in model.relations])


def language_to_model(language: ConstraintLanguage) -> LanguageModel:
    return LanguageModel(
        universe=list(language.universe),
        relations=[
            RelationModel(arity=r.arity, tuples=[list(t) for t in r.rows()])
            for r in language.relations
        ],
    )


def algebra_from_model(model: AlgebraModel) -> Tuple[Algebra, EdgeLabeledGraph]:
    size = len(model.universe)
    if model.has_tables:
        algebra = Algebra(model.f, model.p, model.g, model.h)
        if model.labels:
            return algebra, _graph_from_labels(size, model.labels).oriented_by(algebra)
        return algebra, graph_from_algebra(algebra)

    if model.relations is not None:
        language = ConstraintLanguage(size, [_relation(r) for r in model.relations])
        if model.labels:
            graph = _graph_from_labels(size, model.labels)
            algebra = synthesize_uniform_ops(language, graph)
            return algebra, graph.oriented_by(algebra)
        verdict = classify_language(language)
        if not verdict.tractable:
            raise SynthesisError(f"pair {verdict.witness} has no tractable label", verdict.witness)
        assert verdict.algebra is not None and verdict.graph is not None
        return verdict.algebra, verdict.graph

    graph = _graph_from_labels(size, model.labels)
    return canonical_algebra(graph), graph


def algebra_to_model(algebra: Algebra, graph: EdgeLabeledGraph) -> AlgebraModel:
    labels = []
    for (a, b), label in graph.pairs():
        if label.kind is EdgeKind.none:
            continue
        direction = None
        if label.kind is EdgeKind.semilattice:
            direction = list(graph.orientation[(a, b)])
        labels.append(LabelModel(pair=[a, b], label=label.kind.value, direction=direction))
    return AlgebraModel(
        universe=list(algebra.universe),
        labels=labels,
        f=algebra.f.tolist(),
        p=algebra.p.tolist(),
        g=algebra.g.tolist(),
        h=algebra.h.tolist(),
    )


def instance_from_model(
    model: InstanceModel, base_dir: Optional[Path] = None
) -> Tuple[Instance, EdgeLabeledGraph]:
    if isinstance(model.algebra, str):
        path = Path(model.algebra)
        if not path.is_absolute() and base_dir is not None:
            path = base_dir / path
        algebra, graph = load_algebra(path)
    else:
        algebra, graph = algebra_from_model(model.algebra)
    return _instance_over(model, algebra), graph


def _instance_over(model: InstanceModel, algebra: Algebra) -> Instance:
    variables = [parse_variable(v) for v in model.variables]
    names = dict(zip(model.variables, variables))
    domains = {names[v]: d for v, d in model.domains.items()}
    constraints = [
        (tuple(names[v] for v in c.scope), Relation(c.tuples, arity=len(c.scope)))
        for c in model.constraints
    ]
    return Instance(algebra, variables, domains, constraints)


def instance_to_model(
    instance: Instance, graph: EdgeLabeledGraph, algebra_path: Optional[str] = None
) -> InstanceModel:
    algebra: Union[str, AlgebraModel] = (
        algebra_path if algebra_path is not None else algebra_to_model(instance.algebra, graph)
    )
    return InstanceModel(
        algebra=algebra,
        variables=[variable_name(v) for v in instance.variables],
        domains={variable_name(v): sorted(d) for v, d in instance.domains.items()},
        constraints=[
            ConstraintModel(
                scope=[variable_name(v) for v in c.scope],
                tuples=[list(t) for t in c.relation.rows()],
            )
            for c in instance.constraints
        ],
    )


def result_to_model(
    result: Optional[SolveResult],
    witness: Optional[Tuple[int, int]] = None,
    trace: Optional[Dict[str, Any]] = None,
) -> ResultModel:
    """``result`` is None for a refused np-complete instance."""
    if result is None:
        return ResultModel(
            status=ResultStatus.NPComplete,
            witness_pair=list(witness) if witness is not None else None,
            trace=trace or {},
        )
    assignment = None
    if result.assignment is not None:
        assignment = {variable_name(v): int(x) for v, x in result.assignment.items()}
    return ResultModel(status=result.status, assignment=assignment, trace=trace or {})


def result_from_model(model: ResultModel) -> Optional[SolveResult]:
    if model.status == ResultStatus.NPComplete:
        return None
    if model.assignment is None:
        return SolveResult.unsat()
    return SolveResult.sat({parse_variable(v): x for v, x in model.assignment.items()})


def _read(path: PathLike) -> Any:
    with Path(path).open("r", encoding="utf-8") as fh:
        return json.load(fh)


def _write(path: PathLike, model: Any) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        fh.write(model.json(indent=2, exclude_none=True))


def load_algebra(path: PathLike) -> Tuple[Algebra, EdgeLabeledGraph]:
    return algebra_from_model(AlgebraModel(**_read(path)))


def dump_algebra(path: PathLike, algebra: Algebra, graph: EdgeLabeledGraph) -> None:
    _write(path, algebra_to_model(algebra, graph))


def load_language(path: PathLike) -> ConstraintLanguage:
    return language_from_model(LanguageModel(**_read(path)))


def dump_language(path: PathLike, language: ConstraintLanguage) -> None:
    _write(path, language_to_model(language))


def load_instance(path: PathLike) -> Tuple[Instance, EdgeLabeledGraph]:
    return instance_from_model(InstanceModel(**_read(path)), Path(path).parent)


def dump_instance(path: PathLike, instance: Instance, graph: EdgeLabeledGraph) -> None:
    _write(path, instance_to_model(instance, graph))


def load_result(path: PathLike) -> ResultModel:
    return ResultModel(**_read(path))


def dump_result(path: PathLike, model: ResultModel) -> None:
    _write(path, model)


class Problem(NamedTuple):
    """An instance with either its edge labelling or the language its algebra must come from."""

    instance: Instance
    graph: Optional[EdgeLabeledGraph] = None
    language: Optional[ConstraintLanguage] = None


def load_problem(path: PathLike, algebra_path: Optional[PathLike] = None) -> Problem:
    """Read an instance; an algebra given only by relations is left to classification."""
    model = InstanceModel(**_read(path))
    source = model.algebra
    if algebra_path is not None:
        source = AlgebraModel(**_read(algebra_path))
    elif isinstance(source, str):
        target = Path(source)
        if not target.is_absolute():
            target = Path(path).parent / target
        source = AlgebraModel(**_read(target))
    assert isinstance(source, AlgebraModel)
    if source.has_tables or source.relations is None or source.labels:
        algebra, graph = algebra_from_model(source)
        return Problem(_instance_over(model, algebra), graph=graph)
    size = len(source.universe)
    language = ConstraintLanguage(size, [_relation(r) for r in source.relations])
    return Problem(_instance_over(model, Algebra.projections(size)), language=language)
