from enum import Enum
from typing import Any, Dict, List, Optional, Union

import pydantic
from pydantic import BaseModel, Field, root_validator, validator


class LabelKind(str, Enum):
    Semilattice = "semilattice"
    Majority = "majority"
    Affine = "affine"


class LabelModel(BaseModel):
    pair: List[int] = Field(..., min_items=2, max_items=2)
    label: LabelKind
    direction: Optional[List[int]] = Field(None, min_items=2, max_items=2)

    class Config:
        extra = "forbid"

    @validator("pair")
    def _(cls, v: List[int], **kwargs: Any) -> List[int]:
        assert v[0] != v[1], "A pair needs two distinct elements"
        return v

    @root_validator
    def direction_matches_pair(cls, values: Dict[str, Any]) -> Dict[str, Any]:
        direction = values.get("direction")
        pair = values.get("pair")
        if direction is not None and pair is not None:
            semilattice = values.get("label") == LabelKind.Semilattice
            assert semilattice, "Only semilattice pairs have a direction"
            assert sorted(direction) == sorted(pair), "Direction must use the elements of the pair"
        return values


class RelationModel(BaseModel):
    arity: int = Field(..., ge=1)
    tuples: List[List[int]]

    class Config:
        extra = "forbid"

    @root_validator
    def rows_have_arity(cls, values: Dict[str, Any]) -> Dict[str, Any]:
        arity = values.get("arity")
        for row in values.get("tuples", []):
            assert len(row) == arity, f"Tuple {row} does not have arity {arity}"
        return values


def _universe(v: List[int]) -> List[int]:
    assert v == list(range(len(v))), "Universe must be 0, 1, ..., n-1"
    assert len(v) > 0, "Universe cannot be empty"
    return v


class AlgebraModel(BaseModel):
    universe: List[int]
    labels: List[LabelModel] = []
    f: Optional[List[List[int]]] = None
    p: Optional[List[List[int]]] = None
    g: Optional[List[List[List[int]]]] = None
    h: Optional[List[List[List[int]]]] = None
    relations: Optional[List[RelationModel]] = None

    class Config:
        extra = "forbid"

    _check_universe = validator("universe", allow_reuse=True)(_universe)

    @root_validator
    def tables_or_source(cls, values: Dict[str, Any]) -> Dict[str, Any]:
        given = [values.get(k) is not None for k in ("f", "p", "g", "h")]
        assert all(given) or not any(given), "Give all four tables or none"
        if not any(given):
            assert values.get("labels") or values.get("relations"), (
                "An algebra without tables needs labels or relations"
            )
        return values

    @property
    def has_tables(self) -> bool:
        return self.f is not None


class LanguageModel(BaseModel):
    universe: List[int]
    relations: List[RelationModel]

    class Config:
        extra = "forbid"

    _check_universe = validator("universe", allow_reuse=True)(_universe)


class ConstraintModel(BaseModel):
    scope: List[str] = Field(..., min_items=1)
    tuples: List[List[int]]

    class Config:
        extra = "forbid"

    @root_validator
    def rows_match_scope(cls, values: Dict[str, Any]) -> Dict[str, Any]:
        scope = values.get("scope", [])
        for row in values.get("tuples", []):
            assert len(row) == len(scope), f"Tuple {row} does not match scope {scope}"
        return values


class InstanceModel(BaseModel):
    # inline algebra or a path relative to the instance file
    algebra: Union[AlgebraModel, str]
    variables: List[str]
    domains: Dict[str, List[int]]
    constraints: List[ConstraintModel] = []

    class Config:
        extra = "forbid"

    @validator("variables")
    def _(cls, v: List[str], **kwargs: Any) -> List[str]:
        assert len(set(v)) == len(v), "Variables have duplicate names"
        return v

    @root_validator
    def known_variables(cls, values: Dict[str, Any]) -> Dict[str, Any]:
        variables = set(values.get("variables", []))
        domains = values.get("domains", {})
        assert set(domains) == variables, "Every variable needs exactly one domain"
        for c in values.get("constraints", []):
            unknown = set(c.scope) - variables
            assert not unknown, f"Constraint uses unknown variables {sorted(unknown)}"
        return values


class ResultStatus(str, Enum):
    Sat = "sat"
    Unsat = "unsat"
    NPComplete = "np-complete"


class ResultModel(BaseModel):
    status: ResultStatus
    assignment: Optional[Dict[str, int]] = None
    witness_pair: Optional[List[int]] = Field(None, min_items=2, max_items=2)
    trace: Dict[str, Any] = {}

    class Config:
        extra = "forbid"

    @root_validator
    def assignment_iff_sat(cls, values: Dict[str, Any]) -> Dict[str, Any]:
        status = values.get("status")
        has = values.get("assignment") is not None
        assert has == (status == ResultStatus.Sat), "Exactly the sat results carry an assignment"
        if values.get("witness_pair") is not None:
            refused = status == ResultStatus.NPComplete
            assert refused, "Only np-complete results carry a witness pair"
        return values


SchemaValidationError = pydantic.error_wrappers.ValidationError
