"""ERASIM — Omniscient Confusability Oracle.

An adversary that sees the whole codeword in advance confuses m and m2 by
erasing every position where their base codewords differ.
"""

from app.core.errors import ParamsError
from app.core.words import hamming_distance
from app.coding.codebook import Codebook


def omniscient_confusable(cb: Codebook, m: int, m2: int, budget: int) -> bool:
    if m == m2:
        raise ParamsError("confusability needs two distinct messages")
    return hamming_distance(cb.word(m), cb.word(m2)) <= budget
