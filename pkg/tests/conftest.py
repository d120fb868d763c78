from typing import Tuple

import pytest

from ccsp.config import GeneratorConfig
from ccsp.generate import canonical_a3
from ccsp.graph import EdgeLabeledGraph, PairLabel
from ccsp.model import Algebra, Relation
from ccsp.polymorphism import ConstraintLanguage, canonical_algebra


def pytest_addoption(parser: pytest.Parser) -> None:
    parser.addoption("--runslow", action="store_true", default=False, help="run slow tests")


def pytest_collection_modifyitems(config: pytest.Config, items: list) -> None:
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def a3() -> Tuple[Algebra, EdgeLabeledGraph]:
    return canonical_a3()


@pytest.fixture
def a3_algebra(a3: Tuple[Algebra, EdgeLabeledGraph]) -> Algebra:
    return a3[0]


@pytest.fixture
def a3_graph(a3: Tuple[Algebra, EdgeLabeledGraph]) -> EdgeLabeledGraph:
    return a3[1]


def _two_element(label: PairLabel) -> Tuple[Algebra, EdgeLabeledGraph]:
    graph = EdgeLabeledGraph(2, {(0, 1): label})
    return canonical_algebra(graph), graph


@pytest.fixture
def majority2() -> Tuple[Algebra, EdgeLabeledGraph]:
    return _two_element(PairLabel.majority())


@pytest.fixture
def affine2() -> Tuple[Algebra, EdgeLabeledGraph]:
    return _two_element(PairLabel.affine())


@pytest.fixture
def semilattice2() -> Tuple[Algebra, EdgeLabeledGraph]:
    return _two_element(PairLabel.semilattice((0, 1)))


@pytest.fixture
def order_language() -> ConstraintLanguage:
    return ConstraintLanguage(2, [Relation([(0, 0), (0, 1), (1, 1)])])


@pytest.fixture
def neq_language() -> ConstraintLanguage:
    return ConstraintLanguage(2, [Relation([(0, 1), (1, 0)])])


@pytest.fixture
def parity_language() -> ConstraintLanguage:
    return ConstraintLanguage(2, [Relation([(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)])])


@pytest.fixture
def one_in_three_language() -> ConstraintLanguage:
    return ConstraintLanguage(2, [Relation([(0, 0, 1), (0, 1, 0), (1, 0, 0)])])


@pytest.fixture
def small_cfg() -> GeneratorConfig:
    return GeneratorConfig(seed=7, domain_size=3, variable_count=5, constraint_count=6, max_arity=3)
