"""ERASIM — Guarded rounding for real-valued thresholds.

Products like ``0.3 * 10`` land a hair above or below the integer they
denote; the guard keeps floor/ceil on the intended side.
"""

import math

GUARD = 1e-9


def floor_g(x: float) -> int:
    return math.floor(x + GUARD)


def ceil_g(x: float) -> int:
    return math.ceil(x - GUARD)
