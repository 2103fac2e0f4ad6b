"""ERASIM — Experiment config files and layered merging.

Config files are ``key=value`` text; ``#`` starts a comment. Strategy
parameters use a ``strategy.`` prefix::

    # attack.conf
    kind=attack
    n=64
    p=0.35
    delta=0.1
    strategy=wait_push
    strategy.c=4
    strategy.lower=2

Layers merge preset < file < flags, later layers winning key by key.
"""

from pathlib import Path
from typing import Any, Dict

from pydantic import ValidationError

from app.core.errors import ConfigError
from app.core.logging import get_logger
from app.models.experiment_models import ExperimentConfig

logger = get_logger("harness.config")

ALIASES = {"messages": "num_messages", "out": "output_path"}
STRATEGY_PREFIX = "strategy."


def parse_config_text(text: str, source: str = "<config>") -> Dict[str, Any]:
    values: Dict[str, Any] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{line_no}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not key:
            raise ConfigError(f"{source}:{line_no}: empty key")
        if key.startswith(STRATEGY_PREFIX):
            values.setdefault("strategy_params", {})[key[len(STRATEGY_PREFIX) :]] = value
        else:
            values[ALIASES.get(key, key)] = value
    return values


def parse_config_file(path: str | Path) -> Dict[str, Any]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from e
    return parse_config_text(text, str(path))


def merge_layers(*layers: Dict[str, Any]) -> Dict[str, Any]:
    merged: Dict[str, Any] = {}
    for layer in layers:
        # switching strategy discards parameters meant for the old one
        new_strategy = layer.get("strategy")
        if new_strategy is not None and new_strategy != merged.get("strategy"):
            merged.pop("strategy_params", None)
        for key, value in layer.items():
            if value is None:
                continue
            if key == "strategy_params":
                merged.setdefault("strategy_params", {}).update(value)
            else:
                merged[key] = value
    return merged


def build_config(*layers: Dict[str, Any]) -> ExperimentConfig:
    """Merge layers and validate; failures become ConfigError."""
    merged = merge_layers(*layers)
    try:
        return ExperimentConfig(**merged)
    except ValidationError as e:
        logger.error(f"Invalid experiment config: {e.error_count()} error(s)")
        raise ConfigError(f"invalid experiment config: {e}") from e
