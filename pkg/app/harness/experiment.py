"""ERASIM — Experiment Pipeline.

Orchestrates a Monte Carlo run:
1. Build (or accept) the codebook
2. Run every trial, optionally on a process pool
3. Sort records by trial id and write the CSV
4. Summarize, write the summary JSON
5. Store the run in the run store
"""

import csv
import math
import multiprocessing
import time
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence

from pydantic import ValidationError
from sqlmodel import Session

from app.config import settings
from app.core.errors import ConfigError
from app.core.logging import get_logger
from app.core.rounding import floor_g
from app.coding.codebook import Codebook
from app.harness.statistics import standard_error, summarize, write_records, write_trace
from app.harness.trial import build_codebook_for, run_trial, trace_trial
from app.models.experiment_models import (
    CSV_COLUMNS,
    ContrastReport,
    ExperimentConfig,
    ExperimentRun,
    ExperimentSummary,
    SweepPoint,
    TrialRecord,
)

logger = get_logger("harness.experiment")

SWEEP_AXES = ("p", "epsilon", "delta", "n", "num_messages")
_INT_AXES = ("n", "num_messages")


@dataclass
class ExperimentOutput:
    summary: ExperimentSummary
    records: List[TrialRecord]
    csv_path: Optional[Path] = None
    summary_path: Optional[Path] = None
    run_id: Optional[int] = None


def summary_path_for(csv_path: Path) -> Path:
    return csv_path.with_name(csv_path.name + ".summary.json")


def _prepare_output(output_path: Optional[str]) -> Optional[Path]:
    if not output_path:
        return None
    path = Path(output_path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.touch()
    except OSError as e:
        raise ConfigError(f"output path {path} is not writable: {e}") from e
    return path


# ─────────────────────────────────────────────
# TRIALS
# ─────────────────────────────────────────────

_worker_cb: Optional[Codebook] = None
_worker_config: Optional[ExperimentConfig] = None


def _init_worker(cb: Codebook, config: ExperimentConfig) -> None:
    global _worker_cb, _worker_config
    _worker_cb, _worker_config = cb, config


def _trial_worker(trial_id: int) -> TrialRecord:
    """Module-level so the pool can pickle it."""
    return run_trial(_worker_cb, _worker_config, trial_id)


def run_trials(cb: Codebook, config: ExperimentConfig) -> List[TrialRecord]:
    trial_ids = range(config.trials)
    if config.workers <= 1 or config.trials < 2:
        records = [run_trial(cb, config, t) for t in trial_ids]
    else:
        chunk = max(1, config.trials // (config.workers * 4))
        with multiprocessing.Pool(
            config.workers, initializer=_init_worker, initargs=(cb, config)
        ) as pool:
            records = list(pool.imap_unordered(_trial_worker, trial_ids, chunk))
    return sorted(records, key=lambda r: r.trial_id)


# ─────────────────────────────────────────────
# RUN STORE
# ─────────────────────────────────────────────


def save_run(
    session: Session,
    config: ExperimentConfig,
    summary: ExperimentSummary,
    csv_path: Optional[Path] = None,
) -> ExperimentRun:
    run = ExperimentRun(
        schema_version=summary.schema_version,
        kind=summary.kind,
        output_path=str(csv_path) if csv_path else "",
        config_json=config.model_dump_json(),
        summary_json=summary.model_dump_json(),
    )
    session.add(run)
    session.commit()
    session.refresh(run)
    logger.info(f"💾 Stored run {run.id} ({run.kind})")
    return run


def _persist(
    config: ExperimentConfig,
    summary: ExperimentSummary,
    csv_path: Optional[Path],
    session: Optional[Session],
) -> Optional[int]:
    if session is not None:
        return save_run(session, config, summary, csv_path).id
    from app.database import engine, init_db

    try:
        init_db()
        with Session(engine) as own:
            return save_run(own, config, summary, csv_path).id
    except Exception as e:
        logger.error(f"❌ Run store write failed: {e}")
        return None


# ─────────────────────────────────────────────
# EXPERIMENT
# ─────────────────────────────────────────────


def run_experiment(
    config: ExperimentConfig,
    cb: Optional[Codebook] = None,
    session: Optional[Session] = None,
    persist: Optional[bool] = None,
) -> ExperimentOutput:
    """Run ``config.trials`` trials and write records and summary."""
    persist = settings.persist_runs if persist is None else persist
    csv_path = _prepare_output(config.output_path)
    started = time.perf_counter()
    if cb is None:
        cb = build_codebook_for(config)
    logger.info(
        f"🚀 {config.kind.value}: n={cb.n} M={cb.M} p={config.p} "
        f"strategy={config.strategy} trials={config.trials}",
        extra={"experiment": config.kind.value},
    )

    records = run_trials(cb, config)
    summary = summarize(
        records,
        kind=config.kind.value,
        n=cb.n,
        p=config.p,
        epsilon=cb.params.epsilon,
        num_messages=cb.M,
        budget=cb.params.budget,
        schema_version=settings.csv_schema_version,
    )

    output = ExperimentOutput(summary=summary, records=records)
    if csv_path is not None:
        write_records(records, csv_path, settings.csv_schema_version)
        output.csv_path = csv_path
        output.summary_path = summary_path_for(csv_path)
        output.summary_path.write_text(summary.model_dump_json(indent=2), encoding="utf-8")
    if persist:
        output.run_id = _persist(config, summary, csv_path, session)

    logger.info(
        f"✅ {config.kind.value} done: success_rate={summary.success_rate} "
        f"attack_success_rate={summary.attack_success_rate:.4f}",
        extra={
            "experiment": config.kind.value,
            "duration_ms": round((time.perf_counter() - started) * 1000, 1),
        },
    )
    return output


def trace_experiment_trial(
    config: ExperimentConfig,
    trial_id: int,
    path: str | Path,
    cb: Optional[Codebook] = None,
) -> TrialRecord:
    """Replay trial ``trial_id`` of ``config`` and write its channel trace CSV."""
    if not 0 <= trial_id < config.trials:
        raise ConfigError(f"trial id {trial_id} outside 0..{config.trials - 1}")
    trace_path = _prepare_output(str(path))
    if cb is None:
        cb = build_codebook_for(config)
    record, rows = trace_trial(cb, config, trial_id)
    write_trace(rows, trace_path, trial_id, settings.csv_schema_version)
    logger.info(
        f"Trace of trial {trial_id} written to {trace_path} ({len(rows)} rows)",
        extra={"trial_id": trial_id},
    )
    return record


def _derive(base: ExperimentConfig, **update) -> ExperimentConfig:
    try:
        return ExperimentConfig(**{**base.model_dump(), **update})
    except ValidationError as e:
        raise ConfigError(f"invalid derived config: {e}") from e


# ─────────────────────────────────────────────
# SWEEP
# ─────────────────────────────────────────────


def sweep(
    base: ExperimentConfig,
    axis: str,
    values: Sequence[float],
    session: Optional[Session] = None,
    persist: Optional[bool] = None,
) -> List[SweepPoint]:
    """One experiment per value; value i uses seed + i (code seed likewise)."""
    if axis not in SWEEP_AXES:
        raise ConfigError(f"cannot sweep {axis!r} (axes: {', '.join(SWEEP_AXES)})")
    if not values:
        raise ConfigError("sweep needs at least one value")

    csv_path = _prepare_output(base.output_path)
    points: List[SweepPoint] = []
    rows: List[List[str]] = []
    for i, raw in enumerate(values):
        value = int(raw) if axis in _INT_AXES else float(raw)
        config = _derive(
            base,
            **{axis: value},
            seed=base.seed + i,
            code_seed=base.effective_code_seed + i,
            output_path=None,
        )
        logger.info(f"Sweep point {axis}={value}", extra={"axis": axis})
        out = run_experiment(config, session=session, persist=persist)
        points.append(
            SweepPoint(axis=axis, value=value, seed=config.seed, summary=out.summary)
        )
        rows.extend([str(value)] + r.to_row() for r in out.records)

    if csv_path is not None:
        with csv_path.open("w", newline="", encoding="utf-8") as fh:
            fh.write(f"# erasim-sweep schema={settings.csv_schema_version} axis={axis}\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow((axis,) + CSV_COLUMNS)
            writer.writerows(rows)
        summary_path_for(csv_path).write_text(
            "[" + ",\n".join(p.model_dump_json() for p in points) + "]\n",
            encoding="utf-8",
        )
    return points


# ─────────────────────────────────────────────
# ATTACK CONTRAST
# ─────────────────────────────────────────────


def reduced_message_count(full_messages: int, delta: float, n: int) -> int:
    """Keep the 2δ rate gap between the two codes: M_full * 2^{-2δn}, at least 2."""
    return max(2, floor_g(full_messages * 2.0 ** (-2.0 * delta * n)))


def attack_contrast(
    config: ExperimentConfig,
    session: Optional[Session] = None,
    persist: Optional[bool] = None,
) -> ContrastReport:
    """Run the configured attack on the full-rate code and on a rate-reduced one."""
    if config.delta is None:
        raise ConfigError("contrast needs delta")
    full_cb = build_codebook_for(config)
    reduced_m = reduced_message_count(full_cb.M, config.delta, config.n)

    def _out(tag: str) -> Optional[str]:
        if not config.output_path:
            return None
        path = Path(config.output_path)
        return str(path.with_name(f"{path.stem}.{tag}{path.suffix}"))

    full = run_experiment(
        _derive(config, output_path=_out("full")),
        cb=full_cb,
        session=session,
        persist=persist,
    )
    reduced = run_experiment(
        _derive(config, num_messages=reduced_m, output_path=_out("reduced")),
        session=session,
        persist=persist,
    )
    f, r = full.summary, reduced.summary
    spread = math.hypot(
        standard_error(f.attack_successes, f.trials),
        standard_error(r.attack_successes, r.trials),
    )
    separation = (
        (f.attack_success_rate - r.attack_success_rate) / spread if spread > 0 else None
    )
    logger.info(
        f"Contrast: full M={full_cb.M} rate={f.attack_success_rate:.4f} vs "
        f"reduced M={reduced_m} rate={r.attack_success_rate:.4f}"
    )
    return ContrastReport(
        full_messages=full_cb.M,
        reduced_messages=reduced_m,
        full=f,
        reduced=r,
        separation_se=separation,
    )
