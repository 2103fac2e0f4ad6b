"""ERASIM — Adversarial Erasure Channel.

Drives a strategy across one transmission: at time t the strategy sees
x_1..x_{t-Δ}, its own effective decisions so far and the budget left. An
erase request with no budget left is turned into a pass and recorded.
"""

from typing import Optional

import numpy as np

from app.core.logging import get_logger
from app.core.words import ERASED, ReceivedWord, Word, as_received
from app.coding.codebook import Codebook
from app.channel.strategies import AdversaryStrategy
from app.models.channel_models import AdversaryContext, ChannelResult, TraceRow

logger = get_logger("channel")


def apply_channel(
    x: Word,
    strategy: AdversaryStrategy,
    budget: int,
    rng: Optional[np.random.Generator] = None,
    trace: bool = True,
) -> ChannelResult:
    """Pass ``x`` through the channel under ``strategy`` with a hard erasure budget."""
    x = np.array(x, dtype=np.uint8)
    n = len(x)
    x.setflags(write=False)
    strategy.reset(n, budget, rng)

    y = x.copy()
    decisions = np.zeros(n, dtype=bool)
    remaining = budget
    overrides = 0
    rows: list[TraceRow] = []

    for t in range(1, n + 1):
        visible = max(0, t - strategy.delay)
        ctx = AdversaryContext(
            t=t,
            observed_prefix=x[:visible],
            prior_decisions=decisions[: t - 1],
            budget_remaining=remaining,
            delay=strategy.delay,
        )
        wants = strategy.decide(ctx)
        overridden = wants and remaining == 0
        if overridden:
            overrides += 1
            logger.warning(
                f"Budget exhausted: erase at t={t} overridden to pass",
                extra={"phase": strategy.phase},
            )
        erase = wants and not overridden
        if erase:
            y[t - 1] = ERASED
            decisions[t - 1] = True
            remaining -= 1
        if trace:
            rows.append(
                TraceRow(
                    t=t,
                    observed=visible,
                    decision="erase" if erase else "pass",
                    phase=strategy.phase,
                    surviving=strategy.surviving_count,
                    budget_remaining=remaining,
                    overridden=overridden,
                )
            )

    strategy.finish()
    return ChannelResult(
        received=as_received(y),
        erasures_used=budget - remaining,
        overrides=overrides,
        trace=rows,
    )


def count_consistent(cb: Codebook, y: ReceivedWord) -> int:
    """Codewords agreeing with ``y`` on every unerased position."""
    y = np.asarray(y)
    mask = y != ERASED
    agree = (cb.base_codewords[:, mask] == y[mask]).all(axis=1)
    return int(np.count_nonzero(agree))


def consistent_messages(cb: Codebook, y: ReceivedWord) -> np.ndarray:
    y = np.asarray(y)
    mask = y != ERASED
    return cb.message_ids[(cb.base_codewords[:, mask] == y[mask]).all(axis=1)]
