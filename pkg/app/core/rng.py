"""ERASIM — Seeded random sub-streams.

Every random draw in the system comes from a ``numpy.random.Generator`` built
from ``SeedSequence(entropy=seed, spawn_key=...)``, so any single trial can be
replayed from (seed, trial id, role) without running the trials before it.
"""

from enum import IntEnum

import numpy as np


class Role(IntEnum):
    """Consumers of per-trial randomness; each gets a disjoint stream."""

    MESSAGE = 0
    ENCODER = 1
    ADVERSARY = 2


# Top-level stream labels; per-trial streams live under TRIAL_KEY
BASE_WORDS_KEY = 0
PARTITION_KEY = 1
TRIAL_KEY = 2
VALIDATION_KEY = 3


def stream(seed: int, *key: int) -> np.random.Generator:
    """Generator for the sub-stream ``key`` of ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=key))


def trial_stream(seed: int, trial_id: int, role: Role) -> np.random.Generator:
    return stream(seed, TRIAL_KEY, trial_id, int(role))
