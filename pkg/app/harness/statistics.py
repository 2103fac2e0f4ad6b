"""ERASIM — Experiment Statistics.

Every summary field is a function of the record rows plus (n, p, eps, M),
so a summary can be re-derived from its CSV and checked.
"""

import csv
import math
from collections import Counter
from pathlib import Path
from typing import Iterable, List

from app.core.errors import ConfigError
from app.core.logging import get_logger
from app.core.rounding import ceil_g, floor_g
from app.coding.decoder import list_size_bound
from app.coding.encoder import noise_tail_bound, weight_threshold
from app.models.channel_models import TRACE_COLUMNS, TraceRow
from app.models.experiment_models import (
    CSV_COLUMNS,
    ExperimentSummary,
    PilotRun,
    TrialRecord,
)

logger = get_logger("harness.statistics")


def standard_error(successes: int, trials: int) -> float:
    """Binomial standard error of the success fraction."""
    if trials == 0:
        return 0.0
    rate = successes / trials
    return math.sqrt(rate * (1.0 - rate) / trials)


def calibrated_threshold(successes: int, trials: int, spread: float = 3.0) -> float:
    """Pilot success rate minus ``spread`` standard errors.

    The standard error is taken at the adjusted rate (s + 2) / (N + 4), so a
    pilot without failures still leaves a margin.
    """
    if trials <= 0:
        raise ConfigError("pilot needs at least one trial")
    adjusted = (successes + 2) / (trials + 4)
    se = math.sqrt(adjusted * (1.0 - adjusted) / trials)
    return successes / trials - spread * se


def load_pilot(path: str | Path) -> PilotRun:
    try:
        return PilotRun.model_validate_json(Path(path).read_text(encoding="utf-8"))
    except ValueError as e:
        raise ConfigError(f"{path}: invalid pilot file: {e}") from e


def _category(record: TrialRecord) -> str:
    if record.outcome.isdigit():
        return "correct" if record.decoded_correctly else "wrong"
    return record.outcome


def prefix_suffix_ok(record: TrialRecord, n: int, epsilon: float) -> bool:
    """Integer prefix/suffix guarantee for a trial with in-budget erasures."""
    if record.tau is None or record.suffix_unerased is None:
        return False
    return record.tau <= ceil_g((1 - epsilon / 2) * n) and (
        record.suffix_unerased >= floor_g(epsilon * n / 2)
    )


def push_sound(record: TrialRecord) -> bool:
    """A Push run without overrides leaves X and a distinct X' both consistent."""
    if record.attack_phase_reached != "push" or record.budget_overrides:
        return True
    if record.noise_weight:
        return True
    if record.plausible_message is None or record.plausible_message == record.message:
        return True
    return record.consistent_codewords >= 2


def _mean(values: List[float]) -> float:
    return sum(values) / len(values) if values else 0.0


def summarize(
    records: Iterable[TrialRecord],
    *,
    kind: str,
    n: int,
    p: float,
    epsilon: float,
    num_messages: int,
    budget: int,
    schema_version: str = "1",
) -> ExperimentSummary:
    records = sorted(records, key=lambda r: r.trial_id)
    total = len(records)
    decoded = [r for r in records if r.outcome != "skipped"]
    successes = sum(1 for r in decoded if r.decoded_correctly)
    lists = [r.list_size for r in decoded if r.list_size is not None]
    weights = [r.noise_weight for r in records if r.noise_weight is not None]
    threshold = weight_threshold(n)
    attack_successes = sum(1 for r in records if r.attack_success)

    return ExperimentSummary(
        schema_version=schema_version,
        kind=kind,
        n=n,
        p=p,
        epsilon=epsilon,
        num_messages=num_messages,
        budget=budget,
        trials=total,
        decoded_trials=len(decoded),
        successes=successes,
        success_rate=successes / len(decoded) if decoded else None,
        success_se=standard_error(successes, len(decoded)) if decoded else None,
        outcome_counts=dict(sorted(Counter(_category(r) for r in records).items())),
        mean_list_size=_mean(lists),
        max_list_size=max(lists, default=0),
        list_size_bound=list_size_bound(n, epsilon),
        mean_erasures=_mean([r.erasures_used for r in records]),
        max_erasures=max((r.erasures_used for r in records), default=0),
        overrides=sum(r.budget_overrides for r in records),
        mean_noise_weight=_mean(weights) if weights else None,
        weight_threshold=threshold,
        weight_violations=sum(1 for w in weights if w > threshold),
        noise_tail_bound=noise_tail_bound(n),
        prefix_suffix_violations=sum(
            1 for r in records if not prefix_suffix_ok(r, n, epsilon)
        ),
        attack_successes=attack_successes,
        attack_success_rate=attack_successes / total if total else 0.0,
        attack_success_se=standard_error(attack_successes, total),
        phase_histogram=dict(
            sorted(
                Counter(
                    r.attack_phase_reached for r in records if r.attack_phase_reached
                ).items()
            )
        ),
        push_soundness_violations=sum(1 for r in records if not push_sound(r)),
    )


# ─────────────────────────────────────────────
# CSV
# ─────────────────────────────────────────────


def write_records(records: List[TrialRecord], path: Path, schema_version: str) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        fh.write(f"# erasim-records schema={schema_version}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for record in sorted(records, key=lambda r: r.trial_id):
            writer.writerow(record.to_row())


def write_trace(
    rows: List[TraceRow], path: Path, trial_id: int, schema_version: str
) -> None:
    """One row per position, columns in TRACE_COLUMNS order."""
    with path.open("w", newline="", encoding="utf-8") as fh:
        fh.write(f"# erasim-trace schema={schema_version} trial_id={trial_id}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRACE_COLUMNS)
        for row in rows:
            values = []
            for name in TRACE_COLUMNS:
                value = getattr(row, name)
                if value is None:
                    values.append("")
                elif isinstance(value, bool):
                    values.append("1" if value else "0")
                else:
                    values.append(str(value))
            writer.writerow(values)


def read_trace(path: str | Path) -> List[dict]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(line for line in fh if not line.startswith("#")))


def read_records(path: str | Path) -> List[TrialRecord]:
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        lines = [line for line in fh if not line.startswith("#")]
    reader = csv.DictReader(lines)
    missing = [c for c in CSV_COLUMNS if c not in (reader.fieldnames or [])]
    if missing:
        raise ConfigError(f"{path}: missing columns {', '.join(missing)}")
    return [TrialRecord.from_row(row) for row in reader]


def verify_summary(
    csv_path: str | Path, summary_path: str | Path
) -> List[str]:
    """Recompute the summary from the CSV; return the names of mismatched fields."""
    stored = ExperimentSummary.model_validate_json(
        Path(summary_path).read_text(encoding="utf-8")
    )
    recomputed = summarize(
        read_records(csv_path),
        kind=stored.kind,
        n=stored.n,
        p=stored.p,
        epsilon=stored.epsilon,
        num_messages=stored.num_messages,
        budget=stored.budget,
        schema_version=stored.schema_version,
    )
    mismatched = []
    for name in ExperimentSummary.model_fields:
        a, b = getattr(stored, name), getattr(recomputed, name)
        if not _same(a, b):
            mismatched.append(name)
    if mismatched:
        logger.error(f"Summary mismatch in {', '.join(mismatched)}")
    else:
        logger.info(f"Summary verified against {csv_path}")
    return mismatched


def _same(a: object, b: object) -> bool:
    if isinstance(a, float) and isinstance(b, float):
        return math.isclose(a, b, rel_tol=1e-9, abs_tol=1e-12)
    return a == b
