"""ERASIM — Random Code Construction & Codebook Persistence.

A codebook holds, for every message m, a base codeword u(m) drawn uniformly
from {0,1}^n and a partition of the positions [1..n] into K noise classes
S(m,1..K). Partitions are stored as a per-position level label, which makes
the disjoint/exhaustive invariant hold by construction.

File format (text, '#' starts a comment line)::

    # erasim-codebook v1
    n=8
    p=0.25
    epsilon=0.25
    rate=0.5
    M=2
    K=2
    q=0.0625 0.125
    list_threshold=5
    disambig_threshold=1
    seed=7
    01101001 1,4,5 2,3,6,7,8
    11100010 2,5,6,7 1,3,4,8

Each message line is the base codeword followed by K whitespace-separated
comma lists (S(m,1) .. S(m,K)); an empty class is written as ``-``.
Floats are written with ``repr`` so a save/load round trip is bit-exact.
"""

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from pydantic import ValidationError

from app.config import settings
from app.core.errors import CodebookFormatError, ParamsError
from app.core.logging import get_logger
from app.core.rng import BASE_WORDS_KEY, PARTITION_KEY, stream
from app.core.rounding import ceil_g, floor_g
from app.core.words import IndexSet, Word, format_word, make_index_set
from app.models.code_models import CodeParams

logger = get_logger("coding.codebook")

FILE_MAGIC = "# erasim-codebook v1"
EMPTY_CLASS = "-"


# ─────────────────────────────────────────────
# PARAMETERS
# ─────────────────────────────────────────────


def _thresholds(n: int, epsilon: float, K: int) -> tuple[int, int]:
    list_threshold = ceil_g(n**0.75)
    disambig_threshold = max(1, ceil_g(epsilon * n / (4 * (K * K - K))))
    return list_threshold, disambig_threshold


def _full_message_count(n: int, rate: float) -> int:
    exponent = n * rate
    if exponent >= 62:
        return 2**62
    return floor_g(2**exponent)


def derive_params(
    n: int,
    p: float,
    epsilon: float,
    num_messages_override: Optional[int] = None,
) -> CodeParams:
    """Apply the construction's parameter equations.

    K = max(2, floor(log2(n)/4)), q_k = 2^{k-1} / sqrt(n), and
    M = floor(2^{nR}), capped by the override or by ``settings.max_messages``.
    """
    if n < 16:
        raise ParamsError(f"blocklength {n} below 16")
    if not 0.0 < p < 1.0:
        raise ParamsError(f"erasure fraction {p} outside (0, 1)")
    rate = 1.0 - p - epsilon
    if epsilon <= 0.0 or rate <= 0.0:
        raise ParamsError(f"rate {rate:.6g} must be positive with epsilon > 0")

    K = max(2, floor_g(0.25 * math.log2(n)))
    noise_levels = tuple(2 ** (k - 1) * n**-0.5 for k in range(1, K + 1))
    if noise_levels[-1] >= 0.5:
        raise ParamsError(
            f"q_K = {noise_levels[-1]:.4g} >= 1/2: n={n} too small for K={K}"
        )

    full = _full_message_count(n, rate)
    if num_messages_override is not None:
        num_messages = min(num_messages_override, full)
    else:
        num_messages = min(full, settings.max_messages)
    if num_messages < 2:
        raise ParamsError(f"only {num_messages} message(s) at n={n}, R={rate:.4g}")
    if num_messages < full:
        logger.debug(f"M capped at {num_messages} (floor(2^nR) = {full})")

    list_threshold, disambig_threshold = _thresholds(n, epsilon, K)
    return CodeParams(
        n=n,
        p=p,
        epsilon=epsilon,
        rate=rate,
        num_messages=num_messages,
        K=K,
        noise_levels=noise_levels,
        list_threshold=list_threshold,
        disambig_threshold=disambig_threshold,
    )


def explicit_params(
    n: int,
    p: float,
    num_messages: int,
    noise_levels: Sequence[float] = (0.1, 0.2),
    epsilon: Optional[float] = None,
    rate: Optional[float] = None,
) -> CodeParams:
    """CodeParams for hand-built codes (fixtures, small deterministic codes).

    Skips the n >= 16 and q_k-equation checks; thresholds still follow the
    usual formulas. ``rate`` defaults to log2(M)/n (at least 1/n) and
    ``epsilon`` to 1 - p - rate.
    """
    if rate is None:
        rate = max(math.log2(max(num_messages, 1)), 1.0) / n
    if epsilon is None:
        epsilon = 1.0 - p - rate
    if epsilon <= 0.0:
        raise ParamsError(f"rate {rate:.6g} leaves no slack below 1 - p")
    K = len(noise_levels)
    list_threshold, disambig_threshold = _thresholds(n, epsilon, max(K, 2))
    try:
        return CodeParams(
            n=n,
            p=p,
            epsilon=epsilon,
            rate=rate,
            num_messages=num_messages,
            K=K,
            noise_levels=tuple(noise_levels),
            list_threshold=list_threshold,
            disambig_threshold=disambig_threshold,
        )
    except ValidationError as e:
        raise ParamsError(str(e)) from e


# ─────────────────────────────────────────────
# CODEBOOK
# ─────────────────────────────────────────────


@dataclass(frozen=True, eq=False)
class Codebook:
    """Base codewords plus per-message noise partitions.

    Messages are 1-based (1..M) and so are positions, matching [1:n].
    """

    params: CodeParams
    base_codewords: np.ndarray  # (M, n) uint8
    levels: np.ndarray  # (M, n) uint8, noise level k of each position
    seed: int = 0
    _probs: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.base_codewords.setflags(write=False)
        self.levels.setflags(write=False)
        q = np.array((0.0,) + tuple(self.params.noise_levels))
        probs = q[self.levels]
        probs.setflags(write=False)
        object.__setattr__(self, "_probs", probs)

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def M(self) -> int:
        return self.params.num_messages

    @property
    def K(self) -> int:
        return self.params.K

    @property
    def message_ids(self) -> np.ndarray:
        return np.arange(1, self.M + 1, dtype=np.int64)

    def word(self, m: int) -> Word:
        return self.base_codewords[m - 1]

    def level(self, m: int, i: int) -> int:
        """Noise level k with i in S(m,k)."""
        return int(self.levels[m - 1, i - 1])

    def partition(self, m: int, k: int) -> IndexSet:
        """S(m,k) as a 1-based index set."""
        return make_index_set(np.flatnonzero(self.levels[m - 1] == k) + 1)

    def partitions(self, m: int) -> list[IndexSet]:
        return [self.partition(m, k) for k in range(1, self.K + 1)]

    def noise_probabilities(self, m: int) -> np.ndarray:
        """Per-position Bernoulli parameter q_k for message m."""
        return self._probs[m - 1]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Codebook):
            return NotImplemented
        return (
            self.params == other.params
            and self.seed == other.seed
            and np.array_equal(self.base_codewords, other.base_codewords)
            and np.array_equal(self.levels, other.levels)
        )

    def __repr__(self) -> str:
        return f"<Codebook n={self.n} M={self.M} K={self.K} seed={self.seed}>"


def generate_codebook(params: CodeParams, seed: int) -> Codebook:
    """Draw a random codebook; a pure function of (params, seed)."""
    words = stream(seed, BASE_WORDS_KEY).integers(
        0, 2, size=(params.num_messages, params.n), dtype=np.uint8
    )
    levels = np.empty((params.num_messages, params.n), dtype=np.uint8)
    for m in range(1, params.num_messages + 1):
        levels[m - 1] = stream(seed, PARTITION_KEY, m).integers(
            1, params.K + 1, size=params.n, dtype=np.uint8
        )
    logger.debug(
        f"Generated codebook n={params.n} M={params.num_messages} K={params.K} seed={seed}"
    )
    return Codebook(params=params, base_codewords=words, levels=levels, seed=seed)


def codebook_from_words(
    words: Sequence[Word] | np.ndarray,
    params: CodeParams,
    partitions: Optional[Sequence[Sequence[Sequence[int]]]] = None,
    seed: int = 0,
) -> Codebook:
    """Build a codebook from explicit data, checking every invariant.

    ``partitions[m-1][k-1]`` lists the 1-based positions of S(m,k); when
    omitted every position is put in S(m,1).
    """
    arr = np.array([np.asarray(w, dtype=np.uint8) for w in words], dtype=np.uint8)
    if arr.ndim != 2 or arr.shape[1] != params.n:
        raise ParamsError(f"every base codeword must have length {params.n}")
    if arr.shape[0] != params.num_messages:
        raise ParamsError(f"expected {params.num_messages} words, got {arr.shape[0]}")
    if arr.size and arr.max() > 1:
        raise ParamsError("base codewords must be binary")

    levels = np.ones_like(arr)
    if partitions is not None:
        if len(partitions) != params.num_messages:
            raise ParamsError("one partition per message required")
        for m, classes in enumerate(partitions, start=1):
            levels[m - 1] = _levels_from_classes(classes, params.n, params.K, m)
    return Codebook(params=params, base_codewords=arr, levels=levels, seed=seed)


def _levels_from_classes(
    classes: Sequence[Sequence[int]], n: int, K: int, m: int
) -> np.ndarray:
    if len(classes) != K:
        raise ParamsError(f"message {m}: expected {K} classes, got {len(classes)}")
    levels = np.zeros(n, dtype=np.uint8)
    for k, idx in enumerate(classes, start=1):
        idx = make_index_set(idx, n)
        if np.any(levels[idx - 1] != 0):
            raise ParamsError(f"message {m}: classes overlap")
        levels[idx - 1] = k
    if np.any(levels == 0):
        raise ParamsError(f"message {m}: classes do not cover [1..{n}]")
    return levels


# ─────────────────────────────────────────────
# PERSISTENCE
# ─────────────────────────────────────────────


def save_codebook(cb: Codebook, path: str | Path) -> Path:
    path = Path(path)
    p = cb.params
    lines = [
        FILE_MAGIC,
        f"n={p.n}",
        f"p={p.p!r}",
        f"epsilon={p.epsilon!r}",
        f"rate={p.rate!r}",
        f"M={p.num_messages}",
        f"K={p.K}",
        "q=" + " ".join(repr(q) for q in p.noise_levels),
        f"list_threshold={p.list_threshold}",
        f"disambig_threshold={p.disambig_threshold}",
        f"seed={cb.seed}",
    ]
    for m in range(1, cb.M + 1):
        classes = []
        for k in range(1, cb.K + 1):
            idx = cb.partition(m, k)
            classes.append(",".join(str(i) for i in idx) if idx.size else EMPTY_CLASS)
        lines.append(f"{format_word(cb.word(m))} {' '.join(classes)}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.info(f"Saved codebook n={cb.n} M={cb.M} to {path}")
    return path


_HEADER_KEYS = (
    "n",
    "p",
    "epsilon",
    "rate",
    "M",
    "K",
    "q",
    "list_threshold",
    "disambig_threshold",
    "seed",
)


def load_codebook(path: str | Path) -> Codebook:
    """Parse a codebook file, rejecting malformed or invariant-breaking input."""
    raw_lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not raw_lines or raw_lines[0].strip() != FILE_MAGIC:
        raise CodebookFormatError("missing codebook header", 1)

    header: dict[str, str] = {}
    body: list[tuple[int, str]] = []
    for line_no, line in enumerate(raw_lines[1:], start=2):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" in line and not body:
            key, _, value = line.partition("=")
            header[key.strip()] = value.strip()
        else:
            body.append((line_no, line))

    missing = [k for k in _HEADER_KEYS if k not in header]
    if missing:
        raise CodebookFormatError(f"missing header keys: {', '.join(missing)}")

    try:
        params = CodeParams(
            n=int(header["n"]),
            p=float(header["p"]),
            epsilon=float(header["epsilon"]),
            rate=float(header["rate"]),
            num_messages=int(header["M"]),
            K=int(header["K"]),
            noise_levels=tuple(float(q) for q in header["q"].split()),
            list_threshold=int(header["list_threshold"]),
            disambig_threshold=int(header["disambig_threshold"]),
        )
        seed = int(header["seed"])
    except (ValueError, ValidationError) as e:
        raise CodebookFormatError(f"bad header: {e}") from e

    if len(body) != params.num_messages:
        raise CodebookFormatError(
            f"expected {params.num_messages} message lines, found {len(body)}"
        )

    words = np.zeros((params.num_messages, params.n), dtype=np.uint8)
    levels = np.zeros((params.num_messages, params.n), dtype=np.uint8)
    for m, (line_no, line) in enumerate(body, start=1):
        fields = line.split()
        if len(fields) != 1 + params.K:
            raise CodebookFormatError(
                f"expected word and {params.K} index lists", line_no
            )
        word_text = fields[0]
        if len(word_text) != params.n or any(ch not in "01" for ch in word_text):
            raise CodebookFormatError(
                f"base codeword must be {params.n} binary symbols", line_no
            )
        words[m - 1] = [int(ch) for ch in word_text]
        try:
            classes = [
                [] if f == EMPTY_CLASS else [int(i) for i in f.split(",")]
                for f in fields[1:]
            ]
            levels[m - 1] = _levels_from_classes(classes, params.n, params.K, m)
        except (ValueError, ParamsError) as e:
            raise CodebookFormatError(str(e), line_no) from e

    logger.info(f"Loaded codebook n={params.n} M={params.num_messages} from {path}")
    return Codebook(params=params, base_codewords=words, levels=levels, seed=seed)
