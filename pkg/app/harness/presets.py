"""ERASIM — Desk-Scale Experiment Presets.

``attack`` carries threshold overrides: at n=64 with M capped at 4096 the
default Wait-1 length (26) outlasts the surviving set, and the default
window [c/δ, δ'n) = [40, 1.6) is empty.
"""

from typing import Any, Dict

from app.core.errors import ConfigError

PRESETS: Dict[str, Dict[str, Any]] = {
    "stochastic": {
        "kind": "simulate",
        "n": 1024,
        "p": 0.25,
        "epsilon": 0.15,
        "num_messages": 64,
        "strategy": "prefix",
        "encoder_kind": "stochastic",
        "trials": 500,
    },
    "attack": {
        "kind": "attack",
        "n": 64,
        "p": 0.35,
        "delta": 0.1,
        "num_messages": 4096,
        "strategy": "wait_push",
        "strategy_params": {"c": 4.0, "wait1_length": 8, "upper": 8, "lower": 2},
        "encoder_kind": "deterministic",
        "decode": False,
        "trials": 1000,
    },
}


def preset(name: str) -> Dict[str, Any]:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r} (known: {', '.join(PRESETS)})")
    values = dict(PRESETS[name])
    if "strategy_params" in values:
        values["strategy_params"] = dict(values["strategy_params"])
    return values
