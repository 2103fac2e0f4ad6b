"""ERASIM — Experiment Models (Versioned)."""

from datetime import datetime, timezone
from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, field_validator, model_validator
from pydantic import Field as PydanticField
from sqlmodel import Field, SQLModel

from app.core.strategy_registry import get_strategy


# ─────────────────────────────────────────────
# DATABASE MODEL — Stores versioned experiment runs
# ─────────────────────────────────────────────


class ExperimentRun(SQLModel, table=True):
    """One finished experiment, stored with its config and summary."""

    __tablename__ = "experiment_runs"

    id: Optional[int] = Field(default=None, primary_key=True)
    created_at: datetime = Field(default_factory=lambda: datetime.now(timezone.utc))
    schema_version: str = Field(description="CSV/summary schema version")
    kind: str = Field(index=True, description="simulate | attack")
    output_path: str = Field(default="", description="Records CSV, if written")
    config_json: str = Field(description="ExperimentConfig as JSON")
    summary_json: str = Field(description="ExperimentSummary as JSON")


# ─────────────────────────────────────────────
# CONFIG
# ─────────────────────────────────────────────


class ExperimentKind(str, Enum):
    SIMULATE = "simulate"
    ATTACK = "attack"


class EncoderKind(str, Enum):
    STOCHASTIC = "stochastic"
    DETERMINISTIC = "deterministic"


class ExperimentConfig(BaseModel):
    """Everything a run needs; records are a pure function of this."""

    model_config = ConfigDict(extra="forbid")

    kind: ExperimentKind = ExperimentKind.SIMULATE
    n: int = PydanticField(1024, ge=1)
    p: float = PydanticField(0.25, gt=0.0, lt=1.0)
    epsilon: Optional[float] = PydanticField(0.15, gt=0.0)
    delta: Optional[float] = PydanticField(None, gt=0.0)
    num_messages: Optional[int] = PydanticField(None, ge=2)
    trials: int = PydanticField(100, ge=1)
    seed: int = PydanticField(0, ge=0)
    code_seed: Optional[int] = PydanticField(None, ge=0)
    strategy: str = "prefix"
    strategy_params: Dict[str, float] = {}
    delay: int = PydanticField(1, ge=0, description="Baseline strategy delay")
    encoder_kind: EncoderKind = EncoderKind.STOCHASTIC
    output_path: Optional[str] = None
    workers: int = PydanticField(1, ge=1)
    zero_noise: bool = False
    decode: bool = True

    @field_validator("strategy")
    @classmethod
    def _registered(cls, v: str) -> str:
        if get_strategy(v) is None:
            raise ValueError(f"unknown strategy {v!r}")
        return v

    @model_validator(mode="after")
    def _check(self) -> "ExperimentConfig":
        definition = get_strategy(self.strategy)
        unknown = set(self.strategy_params) - set(definition.params)
        if unknown:
            raise ValueError(
                f"strategy {self.strategy!r} does not take {', '.join(sorted(unknown))}"
            )
        if self.strategy == "random" and "q" not in self.strategy_params:
            raise ValueError("random strategy needs strategy_params.q")
        if self.kind == ExperimentKind.ATTACK or self.strategy == "wait_push":
            if self.delta is None:
                raise ValueError("attack experiments need delta")
            if self.kind == ExperimentKind.ATTACK and self.delta >= self.p:
                raise ValueError(f"delta {self.delta} must be below p {self.p}")
        elif self.epsilon is None:
            raise ValueError("simulate experiments need epsilon")
        return self

    @property
    def effective_code_seed(self) -> int:
        return self.seed if self.code_seed is None else self.code_seed

    def code_epsilon(self) -> float:
        """Rate slack of the code: epsilon, or p - delta for rate 1 - 2p + delta."""
        if self.kind == ExperimentKind.ATTACK:
            return self.p - self.delta
        return self.epsilon


# ─────────────────────────────────────────────
# RECORDS
# ─────────────────────────────────────────────


class TrialRecord(BaseModel):
    """One trial; field order is the CSV column order."""

    trial_id: int
    message: int
    noise_weight: Optional[int] = None
    erasures_used: int
    budget_overrides: int = 0
    tau: Optional[int] = None
    list_size: Optional[int] = None
    outcome: str
    attack_phase_reached: str = ""
    attack_success: bool = False
    wall_time: Optional[float] = None
    suffix_unerased: Optional[int] = None
    consistent_codewords: int = 0
    plausible_message: Optional[int] = None

    @property
    def decoded_correctly(self) -> bool:
        return self.outcome == str(self.message)

    def to_row(self) -> List[str]:
        row = []
        for name in type(self).model_fields:
            value = getattr(self, name)
            if value is None:
                row.append("")
            elif isinstance(value, bool):
                row.append("1" if value else "0")
            elif isinstance(value, float):
                row.append(f"{value:.6f}")
            else:
                row.append(str(value))
        return row

    @classmethod
    def from_row(cls, row: Dict[str, str]) -> "TrialRecord":
        data = {}
        for name, field in cls.model_fields.items():
            raw = row.get(name, "")
            if raw == "" and not field.is_required():
                data[name] = field.default
            elif field.annotation is bool:
                data[name] = raw == "1"
            else:
                data[name] = raw
        return cls(**data)


CSV_COLUMNS = tuple(TrialRecord.model_fields)


# ─────────────────────────────────────────────
# SUMMARIES
# ─────────────────────────────────────────────


class ExperimentSummary(BaseModel):
    """Aggregates recomputable from the records alone (plus n, p, eps)."""

    schema_version: str = "1"
    kind: str
    n: int
    p: float
    epsilon: float
    num_messages: int
    budget: int
    trials: int

    decoded_trials: int = 0
    successes: int = 0
    success_rate: Optional[float] = None
    success_se: Optional[float] = None
    outcome_counts: Dict[str, int] = {}

    mean_list_size: float = 0.0
    max_list_size: int = 0
    list_size_bound: float = 0.0

    mean_erasures: float = 0.0
    max_erasures: int = 0
    overrides: int = 0

    mean_noise_weight: Optional[float] = None
    weight_threshold: int = 0
    weight_violations: int = 0
    noise_tail_bound: float = 0.0
    prefix_suffix_violations: int = 0

    attack_successes: int = 0
    attack_success_rate: float = 0.0
    attack_success_se: float = 0.0
    phase_histogram: Dict[str, int] = {}
    push_soundness_violations: int = 0


class SweepPoint(BaseModel):
    axis: str
    value: float
    seed: int
    summary: ExperimentSummary


class ContrastReport(BaseModel):
    """Wait-push success on the full-rate code vs the reduced-rate code."""

    full_messages: int
    reduced_messages: int
    full: ExperimentSummary
    reduced: ExperimentSummary
    separation_se: Optional[float] = None


# ─────────────────────────────────────────────
# PILOT — committed reference runs for calibrated thresholds
# ─────────────────────────────────────────────


class PilotCell(BaseModel):
    strategy: str
    strategy_params: Dict[str, float] = {}
    n: int
    trials: int = PydanticField(ge=1)
    successes: int = PydanticField(ge=0)

    @property
    def success_rate(self) -> float:
        return self.successes / self.trials


class PilotRun(BaseModel):
    """Decode successes per (strategy, n) at fixed p, epsilon and M."""

    p: float
    epsilon: float
    num_messages: int
    source: str = ""
    cells: List[PilotCell]

    def cell(self, strategy: str, n: int) -> PilotCell:
        for c in self.cells:
            if c.strategy == strategy and c.n == n:
                return c
        raise KeyError(f"no pilot cell for {strategy} at n={n}")
