"""
Experiment configuration documents.

하나의 JSON 문서가 실험 하나를 기술한다. 행렬 원소는 [re, im] 쌍으로 적는다.
"""
import hashlib
import json
from pathlib import Path
from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .alignment_chaining import BIN_SET_CONSISTENT
from .auxiliary import AuxiliaryStructure, BroadcastChannelSpec
from .channel_synthesis import CLASSICAL, QUANTUM, SynthesisBudget
from .channels import build_channel
from .exceptions import ConfigError
from .polarized_sets import METHOD_AUTO, Threshold
from .quantum_core import DensityMatrix
from .rate_region import CORNER_PRINTED

MODE_ANALYZE = "analyze"
MODE_POLARIZE = "polarize"
MODE_REGION = "region"
MODE_SIMULATE = "simulate"
MODES = (MODE_ANALYZE, MODE_POLARIZE, MODE_REGION, MODE_SIMULATE)

Mode = Literal["analyze", "polarize", "region", "simulate"]
Pair = Tuple[float, float]


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ChannelConfig(StrictModel):
    """Either a built-in `name` with `params`, an inline `table`, or inline `states` with `dims`."""

    name: Optional[str] = None
    params: List[float] = Field(default_factory=list)
    table: Optional[List[List[List[float]]]] = None
    states: Optional[List[List[List[Pair]]]] = None
    dims: Optional[Tuple[int, int]] = None

    @model_validator(mode="after")
    def one_source(self):
        given = [self.name is not None, self.table is not None, self.states is not None]
        if sum(given) != 1:
            raise ValueError("channel needs exactly one of name, table or states")
        if self.states is not None and self.dims is None:
            raise ValueError("inline states need dims")
        if self.params and self.name is None:
            raise ValueError("params only apply to a built-in channel name")
        return self

    def build(self) -> BroadcastChannelSpec:
        if self.name is not None:
            return build_channel(self.name, self.params)
        if self.table is not None:
            return BroadcastChannelSpec(CLASSICAL, table=self.table, name="inline-table")
        states = tuple(DensityMatrix.from_pairs(rows) for rows in self.states)
        return BroadcastChannelSpec(QUANTUM, states=states, dims=tuple(self.dims), name="inline-states")


class AuxConfig(StrictModel):
    p_v: float = Field(ge=0.0, le=1.0)
    p_v2_given_v: Tuple[float, float]
    p_v1_given_v_v2: Tuple[Tuple[float, float], Tuple[float, float]]
    phi: Tuple[int, int, int, int, int, int, int, int]

    def build(self) -> AuxiliaryStructure:
        return AuxiliaryStructure(self.p_v, self.p_v2_given_v, self.p_v1_given_v_v2, self.phi)


class ThresholdConfig(StrictModel):
    low: float = 0.01
    high: float = 0.99

    def build(self) -> Threshold:
        return Threshold(self.low, self.high)


class SeedConfig(StrictModel):
    construction: int = Field(default=0, ge=0)
    shared: int = Field(default=0, ge=0)
    noise: int = Field(default=0, ge=0)


class SearchConfig(StrictModel):
    weights: Tuple[float, float] = (1.0, 1.0)
    resolution: Optional[int] = Field(default=None, ge=2)


class BudgetConfig(StrictModel):
    max_dimension: int = Field(default=4096, ge=1)
    max_branches: int = Field(default=4096, ge=1)

    def build(self) -> SynthesisBudget:
        return SynthesisBudget(self.max_dimension, self.max_branches)


class ExperimentConfig(StrictModel):
    mode: Optional[Mode] = None
    channel: ChannelConfig
    aux: Optional[AuxConfig] = None
    n: int = 256
    k: int = Field(default=2, ge=1)
    thresholds: ThresholdConfig = Field(default_factory=ThresholdConfig)
    seeds: SeedConfig = Field(default_factory=SeedConfig)
    trials: int = Field(default=100, ge=1)
    common_bits: int = Field(default=0, ge=0)
    backoff: float = Field(default=1.0, gt=0.0, le=1.0)
    swap_roles: Optional[bool] = None
    bin_set_variant: Literal["consistent", "printed"] = BIN_SET_CONSISTENT
    corner_variant: Literal["printed", "offset"] = CORNER_PRINTED
    profile_method: Literal["auto", "exact", "monte-carlo"] = METHOD_AUTO
    mc_samples: Optional[int] = Field(default=None, ge=1)
    search: Optional[SearchConfig] = None
    budget: BudgetConfig = Field(default_factory=BudgetConfig)
    outputs: Optional[str] = None

    @field_validator("n")
    @classmethod
    def power_of_two(cls, value: int) -> int:
        if value < 1 or value & (value - 1):
            raise ValueError(f"n must be a power of two, got {value}")
        return value

    @model_validator(mode="after")
    def mode_requirements(self):
        if self.mode in (MODE_ANALYZE, MODE_SIMULATE) and self.aux is None:
            raise ValueError(f"mode '{self.mode}' needs an aux structure")
        if self.mode == MODE_REGION and self.aux is None and self.search is None:
            raise ValueError("mode 'region' needs an aux structure or a search block")
        return self

    def config_hash(self) -> str:
        canonical = json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def with_overrides(self, mode: Optional[str] = None, seed: Optional[int] = None) -> "ExperimentConfig":
        data = self.model_dump()
        if mode is not None:
            data["mode"] = mode
        if seed is not None:
            data["seeds"] = {"construction": seed, "shared": seed, "noise": seed}
        try:
            return type(self).model_validate(data)
        except ValidationError as exc:
            raise ConfigError(_describe(exc)) from exc

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        try:
            return cls.model_validate_json(text)
        except ValidationError as exc:
            raise ConfigError(_describe(exc)) from exc


def _describe(exc: ValidationError) -> str:
    parts = []
    for error in exc.errors():
        where = ".".join(str(p) for p in error["loc"]) or "config"
        parts.append(f"{where}: {error['msg']}")
    return "invalid config: " + "; ".join(parts)

