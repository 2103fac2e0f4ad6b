"""ERASIM — Adversary Strategy Registry.

Canonical set of erasing strategies the harness may name. When adding a new
strategy, register it here so configs, the CLI and the channel factory treat
it uniformly.
"""

from enum import Enum
from typing import Dict, Tuple


class StrategyKind(str, Enum):
    """How a strategy decides."""

    BASELINE = "baseline"  # Ignores the transmitted prefix
    CODE_AWARE = "code_aware"  # Reads the codebook and the observed prefix


class StrategyDefinition:
    """Describes a single strategy and the parameters it accepts."""

    def __init__(
        self,
        name: str,
        kind: StrategyKind,
        params: Tuple[str, ...] = (),
        description: str = "",
    ):
        self.name = name
        self.kind = kind
        self.params = params
        self.description = description

    def __repr__(self) -> str:
        return f"<Strategy {self.name} ({self.kind.value})>"


# ─────────────────────────────────────────────
# STRATEGIES
# ─────────────────────────────────────────────

STRATEGIES: Dict[str, StrategyDefinition] = {
    "null": StrategyDefinition("null", StrategyKind.BASELINE, (), "Never erases"),
    "random": StrategyDefinition(
        "random",
        StrategyKind.BASELINE,
        ("q",),
        "Erases each position with probability q until the budget is spent",
    ),
    "prefix": StrategyDefinition(
        "prefix", StrategyKind.BASELINE, (), "Erases positions 1..budget"
    ),
    "wait_push": StrategyDefinition(
        "wait_push",
        StrategyKind.CODE_AWARE,
        ("c", "wait1_length", "upper", "lower", "forced_plausible"),
        "One-bit-delayed wait-and-push attack on a deterministic code",
    ),
}


# ─────────────────────────────────────────────
# HELPERS
# ─────────────────────────────────────────────


def get_strategy(name: str) -> StrategyDefinition | None:
    """Look up a strategy by name."""
    return STRATEGIES.get(name)
