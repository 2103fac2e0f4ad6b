"""ERASIM — Code Parameter & Validation Report Models."""

from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.core.rounding import ceil_g, floor_g


class CodeParams(BaseModel):
    """Parameters governing construction and decoding of a stochastic code.

    Only structural invariants are enforced here; the parameter equations
    (K, q_k, M) are applied by ``derive_params`` so that hand-built fixture
    codes can use other noise levels.
    """

    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=1, description="Blocklength")
    p: float = Field(ge=0.0, lt=1.0, description="Adversary erasure fraction")
    epsilon: float = Field(gt=0.0, description="Rate slack")
    rate: float = Field(gt=0.0, lt=1.0, description="R = 1 - p - epsilon")
    num_messages: int = Field(ge=1, description="M")
    K: int = Field(ge=2, description="Number of noise levels")
    noise_levels: Tuple[float, ...] = Field(description="q_1..q_K")
    list_threshold: int = Field(ge=0, description="ceil(n^{3/4})")
    disambig_threshold: int = Field(ge=1, description="ceil(eps n / 4(K^2-K))")

    @model_validator(mode="after")
    def _check_levels(self) -> "CodeParams":
        if len(self.noise_levels) != self.K:
            raise ValueError(
                f"expected {self.K} noise levels, got {len(self.noise_levels)}"
            )
        for q in self.noise_levels:
            if not 0.0 <= q < 1.0:
                raise ValueError(f"noise level {q} outside [0, 1)")
        return self

    @property
    def budget(self) -> int:
        """Erasure budget floor(p n)."""
        return floor_g(self.p * self.n)

    @property
    def tau_target(self) -> int:
        """Unerased symbols the prefix must hold: ceil((R + eps/2) n)."""
        return ceil_g((self.rate + self.epsilon / 2) * self.n)


class CoherenceReport(BaseModel):
    """Coherence statistic of one message pair over one index set."""

    pair: Tuple[int, int]
    set: List[int]
    stat: int
    bound: float
    coherent: bool


class CoherenceValidation(BaseModel):
    """Outcome of a coherence validation run."""

    mode: str
    eta1: float
    eta2: float
    checked: int = 0
    reports: List[CoherenceReport] = []

    @property
    def passed(self) -> bool:
        return all(r.coherent for r in self.reports)

    @property
    def violations(self) -> List[CoherenceReport]:
        return [r for r in self.reports if not r.coherent]


class ListDecodabilityReport(BaseModel):
    """Verdict of a brute-force (w_u, w_e, s)-list-decodability check."""

    w_u: int
    w_e: int
    s: int
    checked: int = 0
    passed: bool = True
    witness_set: Optional[List[int]] = None
    witness_center: Optional[str] = None
    witness_messages: Optional[List[int]] = None
