"""ERASIM — Four-Stage List-Disambiguation Decoder.

1. Prefix cut: tau is the first position by which the received word holds
   ceil((R + eps/2) n) unerased symbols.
2. List decoding on the prefix: keep every message whose base codeword
   mismatches fewer than ceil(n^{3/4}) unerased prefix symbols.
3. Disambiguation: for each unordered pair (m1 < m2) pick the first
   (k1, k2), k1 != k2, whose unerased suffix set V is large enough, then keep
   the larger of its agree/disagree halves.
4. Likelihood tournament; the Condorcet winner is the output.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from app.config import settings
from app.core.errors import ParamsError
from app.core.logging import get_logger
from app.core.rounding import ceil_g, floor_g
from app.core.words import (
    ERASED,
    IndexSet,
    ReceivedWord,
    hamming_distance,
    restrict,
    unerased_positions,
)
from app.coding.codebook import Codebook
from app.models.code_models import CodeParams
from app.models.decode_models import DecodeOutcome, DecodeResult, PairRecord

logger = get_logger("coding.decoder")


@dataclass(frozen=True)
class Disambiguation:
    k1: int
    k2: int
    v: IndexSet


# ─────────────────────────────────────────────
# STAGES
# ─────────────────────────────────────────────


def compute_tau(y: ReceivedWord, target: int) -> Optional[int]:
    """Smallest t with at least ``target`` unerased symbols in y_1..y_t.

    Returns None when the whole word holds fewer than ``target``.
    """
    if target < 1:
        raise ParamsError(f"tau target must be >= 1, got {target}")
    unerased = unerased_positions(y)
    if len(unerased) < target:
        return None
    return int(unerased[target - 1])


def build_list(cb: Codebook, y: ReceivedWord, tau: int) -> np.ndarray:
    """Messages with fewer than list_threshold mismatches on unerased y_1..y_tau."""
    prefix = np.asarray(y)[:tau]
    mask = prefix != ERASED
    mismatches = (cb.base_codewords[:, :tau][:, mask] != prefix[mask]).sum(axis=1)
    return cb.message_ids[mismatches < cb.params.list_threshold]


def disambiguation_set(
    cb: Codebook, y: ReceivedWord, tau: int, m1: int, m2: int
) -> Optional[Disambiguation]:
    """First (k1, k2), k1 != k2 in lexicographic order, with a large enough V.

    V is the set of unerased suffix positions in S(m1,k1) ∩ S(m2,k2).
    Returns None when no pair reaches ``disambig_threshold``.
    """
    if m1 == m2:
        raise ParamsError("disambiguation needs two distinct messages")
    suffix = unerased_positions(y, tau + 1, cb.n)
    l1 = cb.levels[m1 - 1, suffix - 1]
    l2 = cb.levels[m2 - 1, suffix - 1]
    for k1 in range(1, cb.K + 1):
        in_k1 = l1 == k1
        for k2 in range(1, cb.K + 1):
            if k1 == k2:
                continue
            v = suffix[in_k1 & (l2 == k2)]
            if len(v) >= cb.params.disambig_threshold:
                return Disambiguation(k1=k1, k2=k2, v=v)
    return None


def split_and_pick(
    cb: Codebook, m1: int, m2: int, v: IndexSet
) -> tuple[IndexSet, bool]:
    """Larger of V0 (u(m1), u(m2) agree) and V1 (they differ); ties go to V0."""
    v = np.asarray(v, dtype=np.int64)
    agree = cb.base_codewords[m1 - 1, v - 1] == cb.base_codewords[m2 - 1, v - 1]
    v0, v1 = v[agree], v[~agree]
    if len(v0) >= len(v1):
        return v0, True
    return v1, False


def _log_likelihood(q: float, alpha: int, size: int) -> float:
    """log(q^alpha (1-q)^(size-alpha)), with 0^0 = 1."""
    flips = alpha * math.log(q) if alpha else 0.0
    keeps = (size - alpha) * math.log1p(-q) if size - alpha else 0.0
    return flips + keeps


def _safe_log_likelihood(q: float, alpha: int, size: int) -> float:
    if q == 0.0 and alpha > 0:
        return -math.inf
    return _log_likelihood(q, alpha, size)


def beats(
    cb: Codebook,
    y: ReceivedWord,
    m1: int,
    m2: int,
    k1: int,
    k2: int,
    v_chosen: IndexSet,
    tolerance: Optional[float] = None,
) -> bool:
    """True iff m1's likelihood on V strictly exceeds m2's.

    Each alpha is measured against the message's own base codeword; ties
    within ``tolerance`` in the log domain go to m2.
    """
    tolerance = settings.tie_tolerance if tolerance is None else tolerance
    size = len(v_chosen)
    y_v = restrict(y, v_chosen)
    alpha1 = hamming_distance(y_v, restrict(cb.word(m1), v_chosen))
    alpha2 = hamming_distance(y_v, restrict(cb.word(m2), v_chosen))
    q = cb.params.noise_levels
    ll1 = _safe_log_likelihood(q[k1 - 1], alpha1, size)
    ll2 = _safe_log_likelihood(q[k2 - 1], alpha2, size)
    if ll1 == -math.inf:
        return False
    if ll2 == -math.inf:
        return True
    return ll1 - ll2 > tolerance


# ─────────────────────────────────────────────
# DECODER
# ─────────────────────────────────────────────


def decode(cb: Codebook, y: ReceivedWord) -> DecodeOutcome:
    """Run all four stages; every failure is a DecodeResult, never an exception."""
    if len(y) != cb.n:
        raise ParamsError(f"received word length {len(y)} != n={cb.n}")

    tau = compute_tau(y, cb.params.tau_target)
    if tau is None:
        return DecodeOutcome(result=DecodeResult.ERROR_NO_TAU)

    candidates = build_list(cb, y, tau).tolist()
    if not candidates:
        return DecodeOutcome(result=DecodeResult.ERROR_EMPTY_LIST, tau=tau)
    if len(candidates) == 1:
        return DecodeOutcome(
            result=DecodeResult.MESSAGE,
            message=candidates[0],
            tau=tau,
            list=candidates,
        )

    wins = {m: 0 for m in candidates}
    records: list[PairRecord] = []
    for i, m1 in enumerate(candidates):
        for m2 in candidates[i + 1 :]:
            dis = disambiguation_set(cb, y, tau, m1, m2)
            if dis is None:
                logger.debug(f"No disambiguation pair for ({m1}, {m2})")
                return DecodeOutcome(
                    result=DecodeResult.ERROR_NO_DISAMBIG_PAIR,
                    tau=tau,
                    list=candidates,
                    pairwise=records,
                )
            v, agree = split_and_pick(cb, m1, m2, dis.v)
            winner = m1 if beats(cb, y, m1, m2, dis.k1, dis.k2, v) else m2
            wins[winner] += 1
            records.append(
                PairRecord(
                    m1=m1,
                    m2=m2,
                    k1=dis.k1,
                    k2=dis.k2,
                    v_size=len(dis.v),
                    chosen_size=len(v),
                    agree=agree,
                    winner=winner,
                )
            )

    champions = [m for m in candidates if wins[m] == len(candidates) - 1]
    if len(champions) == 1:
        return DecodeOutcome(
            result=DecodeResult.MESSAGE,
            message=champions[0],
            tau=tau,
            list=candidates,
            pairwise=records,
        )
    return DecodeOutcome(
        result=DecodeResult.ERROR_NO_CONDORCET,
        tau=tau,
        list=candidates,
        pairwise=records,
    )


# ─────────────────────────────────────────────
# ANALYSIS HELPERS
# ─────────────────────────────────────────────


def suffix_unerased(y: ReceivedWord, tau: int) -> int:
    return len(unerased_positions(y, tau + 1, len(y)))


def prefix_suffix_bounds_hold(params: CodeParams, y: ReceivedWord, tau: int) -> bool:
    """Integer form of the prefix/suffix guarantee for in-budget erasures.

    tau <= ceil((1 - eps/2) n) and at least floor(eps n / 2) unerased
    symbols after tau.
    """
    n, eps = params.n, params.epsilon
    return tau <= ceil_g((1 - eps / 2) * n) and suffix_unerased(
        y, tau
    ) >= floor_g(eps * n / 2)


def list_size_bound(n: int, epsilon: float) -> float:
    """log2(log2 n) * eps / 2, the analysis-only list-size figure."""
    return math.log2(math.log2(n)) * epsilon / 2
