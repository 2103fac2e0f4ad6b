"""ERASIM — Codebook Validators.

Coherence: for a pair (m, m') and a set T, the number of positions in T
where both messages use the same noise level. A pair is coherent over T
when that count stays within (|T|/K)(1 + eta1).

List-decodability: every Hamming ball of radius w_e in every restriction to
w_u positions holds fewer than s restricted codewords.

Both properties quantify over exponentially many sets, so exhaustive runs
are capped (``settings.coherence_check_cap`` and
``settings.list_decodability_cap``); larger codes are spot-checked by
sampling.
"""

import itertools
import math
from typing import Literal, Optional

import numpy as np

from app.config import settings
from app.core.errors import BruteForceCapError, ParamsError
from app.core.logging import get_logger
from app.core.rng import VALIDATION_KEY, stream
from app.core.rounding import ceil_g
from app.core.words import IndexSet, format_word
from app.coding.codebook import Codebook
from app.models.code_models import (
    CoherenceReport,
    CoherenceValidation,
    ListDecodabilityReport,
)

logger = get_logger("coding.validators")

DEFAULT_SAMPLES = 1000


def coherence_stat(cb: Codebook, m: int, m2: int, t: IndexSet) -> int:
    """Sum over k of |S(m,k) ∩ S(m2,k) ∩ T|."""
    if m == m2:
        raise ParamsError("coherence is defined for distinct messages")
    t = np.asarray(t, dtype=np.int64)
    same = cb.levels[m - 1, t - 1] == cb.levels[m2 - 1, t - 1]
    return int(np.count_nonzero(same))


def coherence_bound(size: int, K: int, eta1: float) -> float:
    return size / K * (1.0 + eta1)


def construction_eta(cb: Codebook) -> tuple[float, float]:
    """(eta1, eta2) = (K/2 - 1, eps/2), the levels the construction guarantees."""
    return cb.K / 2 - 1, cb.params.epsilon / 2


# ─────────────────────────────────────────────
# COHERENCE
# ─────────────────────────────────────────────


def _subset_bits(n: int) -> np.ndarray:
    """All subsets of [1..n] as a (2^n, n) bool matrix; column i is position i+1."""
    masks = np.arange(2**n, dtype=np.int64)
    return ((masks[:, None] >> np.arange(n)) & 1).astype(bool)


def exhaustive_coherence_checks(cb: Codebook, eta2: float) -> int:
    min_size = ceil_g(eta2 * cb.n)
    sets = sum(math.comb(cb.n, s) for s in range(max(min_size, 0), cb.n + 1))
    return math.comb(cb.M, 2) * sets


def validate_coherence(
    cb: Codebook,
    eta1: float,
    eta2: float,
    mode: Literal["exhaustive", "sampled"] = "sampled",
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    include_passing: bool = False,
) -> CoherenceValidation:
    """Check pairwise coherence over sets T with |T| >= ceil(eta2 n).

    Exhaustive mode walks every pair and every qualifying T; sampled mode
    draws ``samples`` random pairs with random T of size ceil(eta2 n).
    Reports list violations (and passing checks when ``include_passing``).
    """
    result = CoherenceValidation(mode=mode, eta1=eta1, eta2=eta2)
    if cb.M < 2:
        return result
    min_size = max(ceil_g(eta2 * cb.n), 0)

    if mode == "exhaustive":
        requested = exhaustive_coherence_checks(cb, eta2)
        if requested > settings.coherence_check_cap:
            raise BruteForceCapError(
                "exhaustive coherence check too large",
                requested,
                settings.coherence_check_cap,
            )
        subsets = _subset_bits(cb.n)
        sizes = subsets.sum(axis=1)
        keep = sizes >= min_size
        subsets, sizes = subsets[keep], sizes[keep]
        bounds = sizes / cb.K * (1.0 + eta1)
        for m, m2 in itertools.combinations(range(1, cb.M + 1), 2):
            same = cb.levels[m - 1] == cb.levels[m2 - 1]
            stats = (subsets & same).sum(axis=1)
            coherent = stats <= bounds
            result.checked += len(stats)
            rows = range(len(stats)) if include_passing else np.flatnonzero(~coherent)
            for r in rows:
                result.reports.append(
                    CoherenceReport(
                        pair=(m, m2),
                        set=(np.flatnonzero(subsets[r]) + 1).tolist(),
                        stat=int(stats[r]),
                        bound=float(bounds[r]),
                        coherent=bool(coherent[r]),
                    )
                )
    else:
        rng = stream(seed, VALIDATION_KEY)
        size = min(min_size, cb.n)
        bound = coherence_bound(size, cb.K, eta1)
        for _ in range(samples):
            m, m2 = (rng.choice(cb.M, size=2, replace=False) + 1).tolist()
            t = np.sort(rng.choice(cb.n, size=size, replace=False)) + 1
            stat = coherence_stat(cb, m, m2, t)
            result.checked += 1
            if include_passing or stat > bound:
                result.reports.append(
                    CoherenceReport(
                        pair=(min(m, m2), max(m, m2)),
                        set=t.tolist(),
                        stat=stat,
                        bound=bound,
                        coherent=stat <= bound,
                    )
                )

    logger.info(
        f"Coherence ({mode}): {len(result.violations)} violations in {result.checked} checks"
    )
    return result


# ─────────────────────────────────────────────
# LIST-DECODABILITY
# ─────────────────────────────────────────────


def list_decodability_checks(n: int, w_u: int) -> int:
    return math.comb(n, w_u) * 2**w_u


def validate_list_decodability(
    cb: Codebook, w_u: int, w_e: int, s: int
) -> ListDecodabilityReport:
    """Brute force over every T' of size w_u and every ball center.

    Enumeration order is lexicographic in T' and then in the center
    (position 1 most significant); the first offending ball is the witness.
    """
    if not 0 <= w_u <= cb.n:
        raise ParamsError(f"w_u={w_u} outside [0, {cb.n}]")
    requested = list_decodability_checks(cb.n, w_u)
    if requested > settings.list_decodability_cap:
        raise BruteForceCapError(
            "list-decodability check too large",
            requested,
            settings.list_decodability_cap,
        )

    report = ListDecodabilityReport(w_u=w_u, w_e=w_e, s=s)
    centers = _centers(w_u)
    for t in itertools.combinations(range(1, cb.n + 1), w_u):
        cols = np.array(t, dtype=np.int64) - 1
        restricted = cb.base_codewords[:, cols]
        dist = (restricted[None, :, :] != centers[:, None, :]).sum(axis=2)
        inside = dist <= w_e
        counts = inside.sum(axis=1)
        report.checked += len(centers)
        bad = np.flatnonzero(counts >= s)
        if bad.size:
            c = int(bad[0])
            report.passed = False
            report.witness_set = list(t)
            report.witness_center = format_word(centers[c])
            report.witness_messages = (np.flatnonzero(inside[c]) + 1).tolist()
            break

    logger.info(
        f"List-decodability ({w_u},{w_e},{s}): {'pass' if report.passed else 'fail'}"
        f" after {report.checked} checks"
    )
    return report


def _centers(w: int) -> np.ndarray:
    """All words of length w in lexicographic order, position 1 first."""
    codes = np.arange(2**w, dtype=np.int64)
    shifts = np.arange(w - 1, -1, -1)
    return ((codes[:, None] >> shifts) & 1).astype(np.uint8)


def validate_codebook(
    cb: Codebook,
    eta1: Optional[float] = None,
    eta2: Optional[float] = None,
    mode: Literal["exhaustive", "sampled"] = "sampled",
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
) -> CoherenceValidation:
    """Coherence check at the construction's own (eta1, eta2) unless given."""
    d1, d2 = construction_eta(cb)
    return validate_coherence(
        cb,
        d1 if eta1 is None else eta1,
        d2 if eta2 is None else eta2,
        mode=mode,
        samples=samples,
        seed=seed,
    )
