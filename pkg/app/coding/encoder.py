"""ERASIM — Stochastic & Deterministic Encoders.

Stochastic encoding transmits X = u(m) XOR Z where Z_i ~ Bernoulli(q_k) for
the class S(m,k) holding position i. The randomness is private to the
encoder: callers pass an encoder-role stream that nothing else reads.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from app.core.rounding import ceil_g
from app.core.words import Word, as_word, hamming_weight, xor_words
from app.coding.codebook import Codebook


@dataclass(frozen=True)
class NoiseRealization:
    """Additive noise vector Z and its Hamming weight."""

    z: Word
    weight: int


def sample_noise(cb: Codebook, m: int, rng: np.random.Generator) -> NoiseRealization:
    """Independent Bernoulli draws, position i using q_k of its class."""
    z = as_word(rng.random(cb.n) < cb.noise_probabilities(m))
    return NoiseRealization(z=z, weight=hamming_weight(z))


def encode_stochastic(
    cb: Codebook,
    m: int,
    rng: np.random.Generator,
    noise: Optional[Word] = None,
) -> tuple[Word, NoiseRealization]:
    """Return (X, Z). ``noise`` forces Z instead of sampling it."""
    if noise is None:
        realization = sample_noise(cb, m, rng)
    else:
        z = as_word(noise)
        realization = NoiseRealization(z=z, weight=hamming_weight(z))
    return xor_words(cb.word(m), realization.z), realization


def encode_deterministic(cb: Codebook, m: int) -> Word:
    return cb.word(m)


def weight_threshold(n: int) -> int:
    """ceil(n^{3/4}): the noise weight the list decoder tolerates."""
    return ceil_g(n**0.75)


def noise_tail_bound(n: int) -> float:
    """exp(-sqrt(n)/2): tail probability of wt(Z) exceeding n^{3/4}."""
    return math.exp(-math.sqrt(n) / 2)
