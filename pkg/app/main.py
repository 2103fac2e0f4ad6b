"""ERASIM — FastAPI Results Service.

Runs experiments on request and serves the run store.
"""

from contextlib import asynccontextmanager

from fastapi import FastAPI

from app.api.experiment_routes import router as experiment_router
from app.core.logging import get_logger
from app.database import check_connection, init_db

logger = get_logger("main")

VERSION = "1.0.0"


@asynccontextmanager
async def lifespan(app: FastAPI):
    """Startup and shutdown lifecycle."""
    logger.info("🚀 ERASIM service starting up...")
    try:
        check_connection()
        init_db()
    except Exception as e:
        logger.error(f"❌ Run store unavailable: {e}")
    yield
    logger.info("ERASIM service shut down")


app = FastAPI(
    title="ERASIM",
    description="Adversarial erasure channel simulator: run Monte Carlo experiments and browse stored runs.",
    version=VERSION,
    lifespan=lifespan,
)

app.include_router(experiment_router)


@app.get("/health", tags=["System"])
async def health_check():
    """Health check endpoint."""
    return {"status": "healthy", "service": "erasim", "version": VERSION}
