import os

# Settings are read at import time; keep tests off the local run store and .env
os.environ["ERASIM_ENV_FILE"] = os.devnull
os.environ.setdefault("ERASIM_DATABASE_URL", "sqlite://")
os.environ.setdefault("ERASIM_PERSIST_RUNS", "false")
os.environ.setdefault("ERASIM_LOG_LEVEL", "WARNING")

from pathlib import Path  # noqa: E402
from typing import Optional, Sequence  # noqa: E402

import pytest  # noqa: E402

from app.coding.codebook import Codebook, codebook_from_words, load_codebook  # noqa: E402
from app.core.words import parse_word  # noqa: E402
from app.models.code_models import CodeParams  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"

# Noise level of each position 1..25 for the two messages of the
# five-level coherence example.
FIVE_LEVEL_M1 = [1, 2, 2, 3, 4, 5, 1, 1, 2, 3, 4, 3, 5, 1, 2, 3, 4, 5, 3, 1, 4, 5, 2, 5, 1]
FIVE_LEVEL_M2 = [2, 1, 3, 1, 5, 4, 3, 1, 4, 5, 1, 3, 2, 4, 5, 3, 2, 5, 4, 2, 3, 1, 3, 3, 5]


def classes_from_levels(levels: Sequence[int], K: int) -> list[list[int]]:
    return [[i + 1 for i, lv in enumerate(levels) if lv == k] for k in range(1, K + 1)]


def build_code(
    words: Sequence[str],
    levels: Optional[Sequence[Sequence[int]]] = None,
    noise_levels: Sequence[float] = (0.1, 0.3),
    list_threshold: int = 1,
    disambig_threshold: int = 1,
    p: float = 0.25,
    epsilon: float = 0.25,
    rate: float = 0.5,
    seed: int = 0,
) -> Codebook:
    """Hand-built codebook with explicit thresholds."""
    n = len(words[0])
    K = len(noise_levels)
    params = CodeParams(
        n=n,
        p=p,
        epsilon=epsilon,
        rate=rate,
        num_messages=len(words),
        K=K,
        noise_levels=tuple(noise_levels),
        list_threshold=list_threshold,
        disambig_threshold=disambig_threshold,
    )
    partitions = None
    if levels is not None:
        partitions = [classes_from_levels(lv, K) for lv in levels]
    return codebook_from_words(
        [parse_word(w) for w in words], params, partitions=partitions, seed=seed
    )


@pytest.fixture
def make_code():
    return build_code


@pytest.fixture
def push_code() -> Codebook:
    return load_codebook(FIXTURES / "push_example_code.txt")


@pytest.fixture
def five_level_code() -> Codebook:
    return build_code(
        ["0" * 25, "01" * 12 + "0"],
        levels=[FIVE_LEVEL_M1, FIVE_LEVEL_M2],
        noise_levels=(0.05, 0.1, 0.15, 0.2, 0.25),
        list_threshold=12,
        disambig_threshold=2,
        p=0.2,
        epsilon=0.3,
        rate=0.5,
    )
