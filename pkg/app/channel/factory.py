"""ERASIM — Strategy construction from experiment configs."""

from app.core.errors import ConfigError
from app.coding.codebook import Codebook
from app.channel.strategies import (
    AdversaryStrategy,
    strategy_null,
    strategy_prefix,
    strategy_random,
)
from app.channel.wait_push import strategy_wait_push
from app.models.experiment_models import ExperimentConfig

_INT_PARAMS = ("wait1_length", "forced_plausible")


def build_strategy(config: ExperimentConfig, cb: Codebook) -> AdversaryStrategy:
    """Fresh, unshared strategy instance for one trial."""
    params = dict(config.strategy_params)
    for key in _INT_PARAMS:
        if key in params:
            params[key] = int(params[key])

    if config.strategy == "null":
        return strategy_null(config.delay)
    if config.strategy == "random":
        return strategy_random(params["q"], config.delay)
    if config.strategy == "prefix":
        return strategy_prefix(config.delay)
    if config.strategy == "wait_push":
        return strategy_wait_push(cb, config.delta, **params)
    raise ConfigError(f"no factory for strategy {config.strategy!r}")
