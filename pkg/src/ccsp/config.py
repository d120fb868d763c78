from pathlib import Path
from typing import Any, Dict, IO, Optional

import pydantic
import yaml
from pydantic import BaseModel, BaseSettings, root_validator, validator


class Settings(BaseSettings):
    budget: int = 2_000_000
    jobs: int = 1

    class Config:
        env_prefix = "CCSP_"

    @validator("budget", "jobs")
    def _(cls, v: int, **kwargs: Any) -> int:
        assert v >= 1, "must be at least 1"
        return v


class SolverConfig(BaseModel):
    """Switches of the recursive solver.

    probe_plain_t: try the plain t(P) instance before the forced ones.
    search_fallback: when a 3-minimal instance mixes majority and affine edges and greedy fixing
        fails, finish it by backtracking search. When off, such instances raise
        NotImplementedError, which the command line reports with exit code 2.
    greedy_first: try greedy fixing before Maltsev elimination or search.
    check_measures: raise InvariantViolation when a recursive call does not shrink (lev, summ).
    """

    probe_plain_t: bool = False
    search_fallback: bool = True
    greedy_first: bool = True
    check_measures: bool = True

    class Config:
        extra = "forbid"


class LabelWeights(BaseModel):
    semilattice: float = 1.0
    majority: float = 1.0
    affine: float = 1.0

    class Config:
        extra = "forbid"

    @root_validator
    def some_weight(cls, values: Dict[str, Any]) -> Dict[str, Any]:
        weights = [values.get(k, 0.0) for k in ("semilattice", "majority", "affine")]
        assert all(w >= 0 for w in weights), "Label weights cannot be negative"
        assert sum(weights) > 0, "At least one label weight must be positive"
        return values


class GeneratorConfig(BaseModel):
    seed: int = 0
    domain_size: int = 3
    variable_count: int = 5
    constraint_count: int = 5
    max_arity: int = 3
    weights: LabelWeights = LabelWeights()
    seed_tuples: int = 2
    samples: int = 100
    planted: float = 0.5

    class Config:
        extra = "forbid"

    @validator("seed")
    def seed_range(cls, v: int, **kwargs: Any) -> int:
        assert 0 <= v < 2 ** 64, "seed must fit in 64 unsigned bits"
        return v

    @validator("domain_size", "variable_count", "constraint_count", "max_arity", "seed_tuples")
    def positive(cls, v: int, **kwargs: Any) -> int:
        assert v >= 1, "must be positive"
        return v

    @validator("planted")
    def probability(cls, v: float, **kwargs: Any) -> float:
        assert 0.0 <= v <= 1.0, "must lie between 0 and 1"
        return v

    @validator("samples")
    def non_negative(cls, v: int, **kwargs: Any) -> int:
        assert v >= 0, "cannot be negative"
        return v


class RunConfig(BaseModel):
    solver: SolverConfig = SolverConfig()
    generator: GeneratorConfig = GeneratorConfig()
    config_file: Optional[Path] = None

    class Config:
        extra = "forbid"


ConfigValidationError = pydantic.error_wrappers.ValidationError


def load_config(file: IO[str]) -> RunConfig:
    values = yaml.safe_load(file)
    if values is None:
        values = {}
    if not isinstance(values, dict):
        raise ValueError("Invalid config")
    values["config_file"] = getattr(file, "name", None)
    return RunConfig(**values)


def get_settings() -> Settings:
    return Settings()
