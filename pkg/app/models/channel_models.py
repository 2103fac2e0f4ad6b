"""ERASIM — Channel & Adversary Models.

Adversary context, wait-and-push state, and the per-position trace rows
written by ``--trace`` (columns in TRACE_COLUMNS order).
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

import numpy as np


class WaitPushPhase(str, Enum):
    """Phases of the wait-and-push attack, in the order they can occur."""

    WAIT1 = "wait1"
    WAIT2 = "wait2"
    PUSH = "push"
    ERROR1 = "error1"
    DONE = "done"


@dataclass(frozen=True, slots=True)
class AdversaryContext:
    """What a delay-Δ adversary may look at when deciding position ``t``."""

    t: int
    observed_prefix: np.ndarray  # x_1..x_{t-Δ}
    prior_decisions: np.ndarray  # own effective decisions at 1..t-1
    budget_remaining: int
    delay: int


@dataclass(frozen=True, slots=True)
class ConsistencySets:
    """Split of the surviving messages by their bit at position ell."""

    phi0: np.ndarray
    phi1: np.ndarray

    @property
    def A(self) -> int:
        return max(len(self.phi0), len(self.phi1))

    @property
    def a(self) -> int:
        return min(len(self.phi0), len(self.phi1))

    @property
    def is_branch_point(self) -> bool:
        return len(self.phi0) > 0 and len(self.phi1) > 0


@dataclass
class WaitPushState:
    """Mutable per-trial state of the wait-and-push strategy."""

    phase: WaitPushPhase
    surviving: np.ndarray
    delta: float
    delta_prime: float
    c: float
    transition_time: Optional[int] = None
    surviving_at_transition: Optional[int] = None
    plausible: Optional[int] = None  # message id of X'
    branch_erasures: int = 0
    disambiguating_erasures: int = 0
    reached_phase: Optional[WaitPushPhase] = None


@dataclass(frozen=True, slots=True)
class TraceRow:
    """One position of a channel run. Column names are stable."""

    t: int
    observed: int  # number of transmitted bits visible to the adversary
    decision: str  # "erase" | "pass"
    phase: str
    surviving: Optional[int]
    budget_remaining: int
    overridden: bool


TRACE_COLUMNS = (
    "t",
    "observed",
    "decision",
    "phase",
    "surviving",
    "budget_remaining",
    "overridden",
)


@dataclass
class ChannelResult:
    """Output of one pass through the adversarial channel."""

    received: np.ndarray
    erasures_used: int
    overrides: int
    trace: List[TraceRow] = field(default_factory=list)
