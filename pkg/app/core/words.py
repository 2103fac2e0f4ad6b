"""ERASIM — Core Word Utilities.

Binary words, ternary received words and 1-based index sets shared by every
other module. Words are dense numpy ``uint8`` arrays; everything handed out
by this module is read-only so it can be shared between trial workers.

Text fixture format: a string over ``{0,1}`` for a Word and over ``{0,1,e}``
for a ReceivedWord, position 1 leftmost.
"""

from enum import IntEnum
from typing import Iterable, Literal, Optional

import numpy as np
import numpy.typing as npt

from app.core.errors import WordError


class ChannelSymbol(IntEnum):
    """Channel output alphabet; ERASED is the erasure symbol."""

    ZERO = 0
    ONE = 1
    ERASED = 2


ERASED = int(ChannelSymbol.ERASED)
ERASED_CHAR = "e"

Bit = Literal[0, 1]
Word = npt.NDArray[np.uint8]
ReceivedWord = npt.NDArray[np.uint8]
IndexSet = npt.NDArray[np.int64]  # strictly increasing, 1-based


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


# ─────────────────────────────────────────────
# CONSTRUCTION
# ─────────────────────────────────────────────


def as_word(bits: Iterable[int] | np.ndarray) -> Word:
    """Return a read-only binary word, rejecting anything outside {0,1}."""
    arr = np.array(bits, dtype=np.int64).reshape(-1)
    if arr.size and (arr.min() < 0 or arr.max() > 1):
        raise WordError("word symbols must be 0 or 1")
    return _frozen(arr.astype(np.uint8))


def as_received(symbols: Iterable[int] | np.ndarray) -> ReceivedWord:
    """Return a read-only received word over {0, 1, ERASED}."""
    arr = np.array(symbols, dtype=np.int64).reshape(-1)
    if arr.size and (arr.min() < 0 or arr.max() > ERASED):
        raise WordError("received symbols must be 0, 1 or erased")
    return _frozen(arr.astype(np.uint8))


def make_index_set(indices: Iterable[int], n: Optional[int] = None) -> IndexSet:
    """Validate and freeze a strictly increasing set of 1-based positions."""
    arr = np.array(list(indices), dtype=np.int64)
    if arr.size:
        if arr[0] < 1:
            raise WordError(f"index {int(arr[0])} below 1")
        if np.any(np.diff(arr) <= 0):
            raise WordError("index set must be strictly increasing")
        if n is not None and arr[-1] > n:
            raise WordError(f"index {int(arr[-1])} beyond length {n}")
    return _frozen(arr)


def index_range(lo: int, hi: int) -> IndexSet:
    """Positions lo..hi inclusive (empty when hi < lo)."""
    return _frozen(np.arange(lo, hi + 1, dtype=np.int64))


# ─────────────────────────────────────────────
# OPERATIONS
# ─────────────────────────────────────────────


def hamming_distance(a: np.ndarray, b: np.ndarray) -> int:
    """Number of positions where two equal-length words differ."""
    if len(a) != len(b):
        raise WordError(f"length mismatch: {len(a)} vs {len(b)}")
    return int(np.count_nonzero(np.asarray(a) != np.asarray(b)))


def hamming_weight(w: np.ndarray) -> int:
    return int(np.count_nonzero(w))


def xor_words(a: Word, b: Word) -> Word:
    if len(a) != len(b):
        raise WordError(f"length mismatch: {len(a)} vs {len(b)}")
    return _frozen(np.bitwise_xor(a, b).astype(np.uint8))


def restrict(w: np.ndarray, t: IndexSet) -> np.ndarray:
    """Entries of ``w`` at the 1-based positions ``t``, in increasing order."""
    t = np.asarray(t, dtype=np.int64)
    if t.size and (t.min() < 1 or t.max() > len(w)):
        raise WordError(f"index out of range for word of length {len(w)}")
    return _frozen(np.asarray(w)[t - 1].copy())


def unerased_positions(
    y: ReceivedWord, lo: int = 1, hi: Optional[int] = None
) -> IndexSet:
    """Positions in [lo..hi] whose symbol is 0 or 1."""
    hi = len(y) if hi is None else hi
    if lo > hi:
        return make_index_set([])
    window = np.asarray(y)[lo - 1 : hi]
    return _frozen(np.flatnonzero(window != ERASED).astype(np.int64) + lo)


def erasure_count(y: ReceivedWord) -> int:
    return int(np.count_nonzero(np.asarray(y) == ERASED))


def is_consistent(word: Word, y: ReceivedWord) -> bool:
    """True iff ``word`` agrees with ``y`` on every unerased position."""
    if len(word) != len(y):
        raise WordError(f"length mismatch: {len(word)} vs {len(y)}")
    y = np.asarray(y)
    mask = y != ERASED
    return bool(np.array_equal(np.asarray(word)[mask], y[mask]))


# ─────────────────────────────────────────────
# TEXT FORMAT
# ─────────────────────────────────────────────


def parse_word(text: str) -> Word:
    text = text.strip()
    if any(ch not in "01" for ch in text):
        raise WordError(f"not a binary word: {text!r}")
    return as_word([int(ch) for ch in text])


def format_word(w: np.ndarray) -> str:
    return "".join("1" if b else "0" for b in np.asarray(w))


def parse_received(text: str) -> ReceivedWord:
    text = text.strip()
    symbols = []
    for ch in text:
        if ch == ERASED_CHAR:
            symbols.append(ERASED)
        elif ch in "01":
            symbols.append(int(ch))
        else:
            raise WordError(f"bad received symbol {ch!r}")
    return as_received(symbols)


def format_received(y: ReceivedWord) -> str:
    return "".join(ERASED_CHAR if s == ERASED else str(int(s)) for s in np.asarray(y))
