"""ERASIM — Decoder Output Models."""

from enum import Enum
from typing import List, Optional

from pydantic import BaseModel


class DecodeResult(str, Enum):
    """Decoder verdict. Errors are outcomes, never exceptions."""

    MESSAGE = "message"
    ERROR_NO_TAU = "error_no_tau"
    ERROR_EMPTY_LIST = "error_empty_list"
    ERROR_NO_DISAMBIG_PAIR = "error_no_disambig_pair"
    ERROR_NO_CONDORCET = "error_no_condorcet"


class PairRecord(BaseModel):
    """One tournament match, evaluated once per unordered pair (m1 < m2)."""

    m1: int
    m2: int
    k1: int
    k2: int
    v_size: int
    chosen_size: int
    agree: bool
    winner: int


class DecodeOutcome(BaseModel):
    """Full decoder output, including intermediate quantities."""

    result: DecodeResult
    message: Optional[int] = None
    tau: Optional[int] = None
    list: List[int] = []
    pairwise: List[PairRecord] = []

    @property
    def label(self) -> str:
        """Compact form used in the trial CSV."""
        if self.result == DecodeResult.MESSAGE:
            return str(self.message)
        return self.result.value
