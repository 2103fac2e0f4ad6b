"""ERASIM — Single Trial.

encode → apply_channel → decode → record. Each trial draws from three
disjoint sub-streams of the experiment seed (message, encoder, adversary),
so any trial can be replayed on its own.
"""

import time
from typing import List, Tuple

import numpy as np

from app.config import settings
from app.core.errors import ErasimError
from app.core.logging import get_logger
from app.core.rng import Role, trial_stream
from app.coding.codebook import Codebook, derive_params, generate_codebook
from app.coding.decoder import compute_tau, decode, suffix_unerased
from app.coding.encoder import encode_deterministic, encode_stochastic
from app.channel.channel import apply_channel, count_consistent
from app.channel.factory import build_strategy
from app.channel.wait_push import WaitPushStrategy
from app.models.channel_models import TraceRow
from app.models.experiment_models import EncoderKind, ExperimentConfig, TrialRecord

logger = get_logger("harness.trial")

SKIPPED = "skipped"


def build_codebook_for(config: ExperimentConfig) -> Codebook:
    params = derive_params(
        config.n, config.p, config.code_epsilon(), config.num_messages
    )
    return generate_codebook(params, config.effective_code_seed)


def run_trial(cb: Codebook, config: ExperimentConfig, trial_id: int) -> TrialRecord:
    """Run one trial; deterministic given (cb, config, trial_id)."""
    return _execute(cb, config, trial_id, trace=False)[0]


def trace_trial(
    cb: Codebook, config: ExperimentConfig, trial_id: int
) -> Tuple[TrialRecord, List[TraceRow]]:
    """Replay one trial and keep its per-position channel trace."""
    return _execute(cb, config, trial_id, trace=True)


def _execute(
    cb: Codebook, config: ExperimentConfig, trial_id: int, trace: bool
) -> Tuple[TrialRecord, List[TraceRow]]:
    start = time.perf_counter()
    seed = config.seed
    message = int(trial_stream(seed, trial_id, Role.MESSAGE).integers(1, cb.M + 1))

    noise_weight = None
    if config.encoder_kind == EncoderKind.STOCHASTIC:
        forced = np.zeros(cb.n, dtype=np.uint8) if config.zero_noise else None
        x, realization = encode_stochastic(
            cb, message, trial_stream(seed, trial_id, Role.ENCODER), noise=forced
        )
        noise_weight = realization.weight
    else:
        x = encode_deterministic(cb, message)

    strategy = build_strategy(config, cb)
    budget = cb.params.budget
    channel = apply_channel(
        x,
        strategy,
        budget,
        rng=trial_stream(seed, trial_id, Role.ADVERSARY),
        trace=trace,
    )
    if channel.erasures_used > budget:
        raise ErasimError(
            f"trial {trial_id}: {channel.erasures_used} erasures over budget {budget}"
        )
    y = channel.received

    tau = compute_tau(y, cb.params.tau_target)
    list_size = None
    if config.decode:
        result = decode(cb, y)
        outcome = result.label
        if result.tau is not None:
            list_size = len(result.list)
    else:
        outcome = SKIPPED

    phase, plausible = "", None
    if isinstance(strategy, WaitPushStrategy):
        reached = strategy.state.reached_phase
        phase = reached.value if reached is not None else ""
        plausible = strategy.state.plausible

    consistent = count_consistent(cb, y)
    record = TrialRecord(
        trial_id=trial_id,
        message=message,
        noise_weight=noise_weight,
        erasures_used=channel.erasures_used,
        budget_overrides=channel.overrides,
        tau=tau,
        list_size=list_size,
        outcome=outcome,
        attack_phase_reached=phase,
        attack_success=consistent >= 2,
        wall_time=time.perf_counter() - start if settings.record_wall_time else None,
        suffix_unerased=suffix_unerased(y, tau) if tau is not None else None,
        consistent_codewords=consistent,
        plausible_message=plausible,
    )
    logger.debug(
        f"Trial {trial_id}: m={message} outcome={outcome} erasures={channel.erasures_used}",
        extra={"trial_id": trial_id},
    )
    return record, channel.trace
