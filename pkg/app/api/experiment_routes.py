"""ERASIM — Experiment API Routes."""

import json
from pathlib import Path
from typing import Optional

from fastapi import APIRouter, Depends, HTTPException, Query
from pydantic import BaseModel
from sqlmodel import Session, select

from app.config import settings
from app.core.errors import ErasimError
from app.core.logging import get_logger
from app.database import get_session
from app.harness.experiment import run_experiment
from app.models.experiment_models import ExperimentConfig, ExperimentRun, ExperimentSummary

logger = get_logger("api.experiments")

router = APIRouter(prefix="/experiments", tags=["Experiments"])


# ── Response Models ──


class RunExperimentResponse(BaseModel):
    """Response for POST /experiments/run."""

    status: str = "success"
    run_id: Optional[int] = None
    summary: ExperimentSummary


def _confine_output(config: ExperimentConfig) -> ExperimentConfig:
    """Resolve ``output_path`` inside ``settings.api_output_dir`` or reject it."""
    if not config.output_path:
        return config
    base = Path(settings.api_output_dir).resolve()
    requested = Path(config.output_path)
    target = (base / requested).resolve()
    if requested.is_absolute() or base not in target.parents:
        raise HTTPException(
            status_code=422,
            detail=f"output_path must be a relative path inside {settings.api_output_dir}",
        )
    return config.model_copy(update={"output_path": str(target)})


def _run_payload(run: ExperimentRun) -> dict:
    return {
        "id": run.id,
        "created_at": run.created_at.isoformat(),
        "schema_version": run.schema_version,
        "kind": run.kind,
        "output_path": run.output_path,
        "config": json.loads(run.config_json),
        "summary": json.loads(run.summary_json),
    }


# ── Endpoints ──


@router.post("/run", response_model=RunExperimentResponse)
def trigger_experiment(
    config: ExperimentConfig,
    session: Session = Depends(get_session),
):
    """Run an experiment synchronously and store it.

    Output files are written only when ``output_path`` is set, relative to
    the configured output directory.
    """
    config = _confine_output(config)
    try:
        out = run_experiment(config, session=session, persist=True)
    except ErasimError as e:
        logger.error(f"Experiment failed: {e}")
        raise HTTPException(status_code=422, detail=str(e))
    return RunExperimentResponse(run_id=out.run_id, summary=out.summary)


@router.get("/latest")
def get_latest_run(session: Session = Depends(get_session)):
    """Get the most recent stored run."""
    run = session.exec(
        select(ExperimentRun).order_by(ExperimentRun.id.desc()).limit(1)  # type: ignore
    ).first()
    if not run:
        return {"status": "no_data", "message": "No experiment has been run yet."}
    return {"status": "success", "run": _run_payload(run)}


@router.get("")
def list_runs(
    kind: Optional[str] = Query(None, description="simulate | attack"),
    limit: int = Query(10, ge=1, le=100),
    session: Session = Depends(get_session),
):
    """Stored runs, newest first, optionally filtered by kind."""
    query = select(ExperimentRun).order_by(ExperimentRun.id.desc()).limit(limit)  # type: ignore
    if kind:
        query = query.where(ExperimentRun.kind == kind)
    runs = session.exec(query).all()
    return {
        "status": "success",
        "count": len(runs),
        "runs": [_run_payload(r) for r in runs],
    }
