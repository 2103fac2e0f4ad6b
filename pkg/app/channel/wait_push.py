"""ERASIM — Wait-and-Push Attack.

One-bit-delayed attack on a deterministic code. The strategy tracks the
surviving set Φ_{ℓ-1}: codewords agreeing with everything observed so far.

  Wait-1  pass the first floor((1 - 2p + δ) n) + 1 positions.
  Wait-2  while |Φ| >= δ'n keep passing; once c/δ <= |Φ| < δ'n pick a
          plausible X' uniformly from Φ and push; below c/δ give up (Error1).
  Push    erase branch points (both bit values still possible), erase where
          the bit is certain and differs from X', pass where it matches X'.

Every threshold can be overridden, which desk-scale codes need: with the
default formulas the window [c/δ, δ'n) is empty for small n.
"""

from typing import Optional

import numpy as np

from app.config import settings
from app.core.errors import ParamsError
from app.core.logging import get_logger
from app.core.rounding import floor_g
from app.coding.codebook import Codebook
from app.channel.strategies import AdversaryStrategy
from app.models.channel_models import (
    AdversaryContext,
    ConsistencySets,
    WaitPushPhase,
    WaitPushState,
)

logger = get_logger("channel.wait_push")


def consistency_split(cb: Codebook, surviving: np.ndarray, ell: int) -> ConsistencySets:
    """Split ``surviving`` by each codeword's bit at position ``ell``."""
    surviving = np.asarray(surviving, dtype=np.int64)
    bits = cb.base_codewords[surviving - 1, ell - 1]
    return ConsistencySets(phi0=surviving[bits == 0], phi1=surviving[bits == 1])


def wait1_default(p: float, delta: float, n: int) -> int:
    return floor_g((1.0 - 2.0 * p + delta) * n) + 1


class WaitPushStrategy(AdversaryStrategy):
    name = "wait_push"

    def __init__(
        self,
        cb: Codebook,
        delta: float,
        c: Optional[float] = None,
        wait1_length: Optional[int] = None,
        upper: Optional[float] = None,
        lower: Optional[float] = None,
        forced_plausible: Optional[int] = None,
    ):
        super().__init__(delay=1)
        if delta <= 0.0:
            raise ParamsError(f"delta must be positive, got {delta}")
        self.cb = cb
        self.delta = delta
        self.c = settings.attack_c if c is None else c
        self.delta_prime = delta / 4
        n = cb.n
        self.wait1_length = (
            wait1_default(cb.params.p, delta, n) if wait1_length is None else wait1_length
        )
        self.upper = self.delta_prime * n if upper is None else upper
        self.lower = self.c / delta if lower is None else lower
        if forced_plausible is not None and not 1 <= forced_plausible <= cb.M:
            raise ParamsError(f"forced plausible message {forced_plausible} not in 1..{cb.M}")
        self.forced_plausible = forced_plausible
        self.state = self._fresh_state()
        self._filtered = 0

    def _fresh_state(self) -> WaitPushState:
        return WaitPushState(
            phase=WaitPushPhase.WAIT1,
            surviving=self.cb.message_ids,
            delta=self.delta,
            delta_prime=self.delta_prime,
            c=self.c,
        )

    def reset(self, n: int, budget: int, rng: Optional[np.random.Generator]) -> None:
        if n != self.cb.n:
            raise ParamsError(f"transmission length {n} != code length {self.cb.n}")
        super().reset(n, budget, rng)
        self.state = self._fresh_state()
        self._filtered = 0

    # ── surviving set ──

    def _observe(self, prefix: np.ndarray) -> None:
        """Filter the surviving set by every newly visible bit."""
        s = self.state
        for j in range(self._filtered + 1, len(prefix) + 1):
            keep = self.cb.base_codewords[s.surviving - 1, j - 1] == prefix[j - 1]
            s.surviving = s.surviving[keep]
        self._filtered = len(prefix)

    def _pick_plausible(self) -> int:
        s = self.state
        if self.forced_plausible is not None:
            if self.forced_plausible in s.surviving:
                return self.forced_plausible
            logger.warning(
                f"Forced X' {self.forced_plausible} not surviving at ℓ*={s.transition_time}; drawing"
            )
        if self.rng is None:
            raise ParamsError("wait-push needs an adversary stream to draw X'")
        return int(s.surviving[self.rng.integers(len(s.surviving))])

    # ── decision ──

    def decide(self, ctx: AdversaryContext) -> bool:
        self._observe(ctx.observed_prefix)
        s = self.state
        ell = ctx.t

        if s.phase == WaitPushPhase.WAIT1:
            if ell <= self.wait1_length:
                return False
            s.phase = WaitPushPhase.WAIT2

        if s.phase == WaitPushPhase.WAIT2:
            split = consistency_split(self.cb, s.surviving, ell)
            total = split.A + split.a
            if total >= self.upper:
                return False
            if total == 0 or total < self.lower:
                s.phase = WaitPushPhase.ERROR1
                s.transition_time = ell
                s.surviving_at_transition = total
                logger.debug(f"Error1 at ℓ={ell}: |Φ|={total} below {self.lower:g}")
                return False
            s.phase = WaitPushPhase.PUSH
            s.transition_time = ell
            s.surviving_at_transition = total
            s.plausible = self._pick_plausible()
            logger.debug(f"Push at ℓ*={ell}: |Φ|={total}, X'=message {s.plausible}")

        if s.phase == WaitPushPhase.PUSH:
            return self._push(ell)
        return False

    def _push(self, ell: int) -> bool:
        s = self.state
        if len(s.surviving) == 0:
            return False
        split = consistency_split(self.cb, s.surviving, ell)
        if split.is_branch_point:
            s.branch_erasures += 1
            return True
        certain_bit = 0 if len(split.phi0) else 1
        if int(self.cb.base_codewords[s.plausible - 1, ell - 1]) != certain_bit:
            s.disambiguating_erasures += 1
            return True
        return False

    def finish(self) -> None:
        self.state.reached_phase = self.state.phase
        self.state.phase = WaitPushPhase.DONE

    @property
    def phase(self) -> str:
        return self.state.phase.value

    @property
    def surviving_count(self) -> Optional[int]:
        return len(self.state.surviving)


def strategy_wait_push(
    cb: Codebook,
    delta: float,
    c: Optional[float] = None,
    wait1_length: Optional[int] = None,
    upper: Optional[float] = None,
    lower: Optional[float] = None,
    forced_plausible: Optional[int] = None,
) -> WaitPushStrategy:
    return WaitPushStrategy(
        cb,
        delta,
        c=c,
        wait1_length=wait1_length,
        upper=upper,
        lower=lower,
        forced_plausible=forced_plausible,
    )
