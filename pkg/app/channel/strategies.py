"""ERASIM — Erasing Strategies.

A strategy is a stateful per-trial object queried once per position. At
time t it sees only x_1..x_{t-Δ}, its own earlier decisions and the budget
left; the channel enforces the budget, so a strategy may ask to erase at
any time.
"""

from abc import ABC, abstractmethod
from typing import Optional

import numpy as np

from app.core.errors import ParamsError
from app.models.channel_models import AdversaryContext


class AdversaryStrategy(ABC):
    """Abstract base for delay-Δ erasing strategies."""

    name: str = "abstract"

    def __init__(self, delay: int = 1):
        if delay < 0:
            raise ParamsError(f"delay must be >= 0, got {delay}")
        self.delay = delay
        self.n = 0
        self.budget = 0
        self.rng: Optional[np.random.Generator] = None

    def reset(self, n: int, budget: int, rng: Optional[np.random.Generator]) -> None:
        """Start a new transmission of length n."""
        self.n = n
        self.budget = budget
        self.rng = rng

    @abstractmethod
    def decide(self, ctx: AdversaryContext) -> bool:
        """Return True to erase position ctx.t."""
        ...

    def finish(self) -> None:
        """Called once after position n."""

    @property
    def phase(self) -> str:
        return ""

    @property
    def surviving_count(self) -> Optional[int]:
        return None

    def __repr__(self) -> str:
        return f"<{type(self).__name__} delay={self.delay}>"


class NullStrategy(AdversaryStrategy):
    name = "null"

    def decide(self, ctx: AdversaryContext) -> bool:
        return False


class RandomStrategy(AdversaryStrategy):
    """Erase each position independently with probability q.

    One uniform draw is consumed per position whatever the budget, so the
    decision at t depends only on t and the stream.
    """

    name = "random"

    def __init__(self, q: float, delay: int = 1):
        super().__init__(delay)
        if not 0.0 <= q <= 1.0:
            raise ParamsError(f"erase probability {q} outside [0, 1]")
        self.q = q

    def decide(self, ctx: AdversaryContext) -> bool:
        if self.rng is None:
            raise ParamsError("random strategy needs an adversary stream")
        draw = self.rng.random()
        return ctx.budget_remaining > 0 and draw < self.q


class PrefixStrategy(AdversaryStrategy):
    """Erase positions 1..budget."""

    name = "prefix"

    def decide(self, ctx: AdversaryContext) -> bool:
        return ctx.t <= self.budget


def strategy_null(delay: int = 1) -> AdversaryStrategy:
    return NullStrategy(delay)


def strategy_random(q: float, delay: int = 1) -> AdversaryStrategy:
    return RandomStrategy(q, delay)


def strategy_prefix(delay: int = 1) -> AdversaryStrategy:
    return PrefixStrategy(delay)
