"""ERASIM — Naive Reference Implementations.

Direct enumeration versions of the decoder and the two codebook validators,
written with plain loops over Python lists and sharing nothing with the
vectorized code beyond the codebook itself. Tests compare the fast paths
against these on small instances.
"""

import itertools
import math
from typing import Optional

from app.config import settings
from app.core.words import ERASED
from app.coding.codebook import Codebook
from app.models.decode_models import DecodeOutcome, DecodeResult


def _rows(cb: Codebook) -> tuple[list[list[int]], list[list[int]]]:
    words = [[int(b) for b in cb.base_codewords[m]] for m in range(cb.M)]
    levels = [[int(k) for k in cb.levels[m]] for m in range(cb.M)]
    return words, levels


def _loglik(q: float, alpha: int, size: int) -> float:
    if alpha > 0 and q == 0.0:
        return -math.inf
    total = 0.0
    if alpha:
        total += alpha * math.log(q)
    if size - alpha:
        total += (size - alpha) * math.log1p(-q)
    return total


def reference_decode(cb: Codebook, y) -> DecodeOutcome:
    words, levels = _rows(cb)
    y = [int(s) for s in y]
    n = len(y)
    params = cb.params

    tau: Optional[int] = None
    seen = 0
    for t in range(1, n + 1):
        if y[t - 1] != ERASED:
            seen += 1
            if seen == params.tau_target:
                tau = t
                break
    if tau is None:
        return DecodeOutcome(result=DecodeResult.ERROR_NO_TAU)

    candidates = []
    for m in range(1, cb.M + 1):
        mismatches = 0
        for i in range(tau):
            if y[i] != ERASED and y[i] != words[m - 1][i]:
                mismatches += 1
        if mismatches < params.list_threshold:
            candidates.append(m)
    if not candidates:
        return DecodeOutcome(result=DecodeResult.ERROR_EMPTY_LIST, tau=tau)
    if len(candidates) == 1:
        return DecodeOutcome(
            result=DecodeResult.MESSAGE, message=candidates[0], tau=tau, list=candidates
        )

    beaten_by: dict[int, set[int]] = {m: set() for m in candidates}
    for a in range(len(candidates)):
        for b in range(a + 1, len(candidates)):
            m1, m2 = candidates[a], candidates[b]
            found = None
            for k1 in range(1, cb.K + 1):
                for k2 in range(1, cb.K + 1):
                    if k1 == k2:
                        continue
                    v = [
                        i
                        for i in range(tau + 1, n + 1)
                        if y[i - 1] != ERASED
                        and levels[m1 - 1][i - 1] == k1
                        and levels[m2 - 1][i - 1] == k2
                    ]
                    if len(v) >= params.disambig_threshold:
                        found = (k1, k2, v)
                        break
                if found:
                    break
            if found is None:
                return DecodeOutcome(
                    result=DecodeResult.ERROR_NO_DISAMBIG_PAIR, tau=tau, list=candidates
                )
            k1, k2, v = found
            v0 = [i for i in v if words[m1 - 1][i - 1] == words[m2 - 1][i - 1]]
            v1 = [i for i in v if words[m1 - 1][i - 1] != words[m2 - 1][i - 1]]
            chosen = v0 if len(v0) >= len(v1) else v1

            alpha1 = sum(1 for i in chosen if y[i - 1] != words[m1 - 1][i - 1])
            alpha2 = sum(1 for i in chosen if y[i - 1] != words[m2 - 1][i - 1])
            l1 = _loglik(params.noise_levels[k1 - 1], alpha1, len(chosen))
            l2 = _loglik(params.noise_levels[k2 - 1], alpha2, len(chosen))
            if l1 == -math.inf:
                m1_wins = False
            elif l2 == -math.inf:
                m1_wins = True
            else:
                m1_wins = l1 - l2 > settings.tie_tolerance
            if m1_wins:
                beaten_by[m2].add(m1)
            else:
                beaten_by[m1].add(m2)

    winners = [m for m in candidates if not beaten_by[m]]
    if len(winners) == 1:
        return DecodeOutcome(
            result=DecodeResult.MESSAGE, message=winners[0], tau=tau, list=candidates
        )
    return DecodeOutcome(
        result=DecodeResult.ERROR_NO_CONDORCET, tau=tau, list=candidates
    )


def naive_coherence_violations(
    cb: Codebook, eta1: float, eta2: float
) -> list[tuple[int, int, tuple[int, ...]]]:
    """Every (m, m2, T) with m < m2, |T| >= eta2 n and coherence above bound."""
    _, levels = _rows(cb)
    n = cb.n
    out = []
    for m in range(1, cb.M + 1):
        for m2 in range(m + 1, cb.M + 1):
            for size in range(0, n + 1):
                if size < eta2 * n - 1e-9:
                    continue
                for t in itertools.combinations(range(1, n + 1), size):
                    stat = 0
                    for i in t:
                        if levels[m - 1][i - 1] == levels[m2 - 1][i - 1]:
                            stat += 1
                    if stat > size / cb.K * (1.0 + eta1):
                        out.append((m, m2, t))
    return out


def naive_list_decodability(
    cb: Codebook, w_u: int, w_e: int, s: int
) -> Optional[tuple[tuple[int, ...], str, list[int]]]:
    """First (T', center, messages) whose ball holds >= s codewords, else None."""
    words, _ = _rows(cb)
    for t in itertools.combinations(range(1, cb.n + 1), w_u):
        for center in itertools.product("01", repeat=w_u):
            inside = []
            for m in range(1, cb.M + 1):
                d = sum(
                    1
                    for j, i in enumerate(t)
                    if str(words[m - 1][i - 1]) != center[j]
                )
                if d <= w_e:
                    inside.append(m)
            if len(inside) >= s:
                return t, "".join(center), inside
    return None
