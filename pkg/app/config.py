"""ERASIM — Central Configuration via Pydantic Settings."""

import os
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment variables / .env file."""

    # ── Run store ──
    database_url: str = ""
    persist_runs: bool = True

    # ── App ──
    log_level: str = "INFO"
    default_workers: int = 1
    record_wall_time: bool = False  # wall_time column stays blank otherwise

    # ── Code construction ──
    max_messages: int = 4096  # cap on M = floor(2^{nR})
    tie_tolerance: float = 1e-12  # log-likelihood tie band in the ML rule

    # ── Validators (brute-force caps) ──
    coherence_check_cap: int = 200_000  # (pair, T) checks
    list_decodability_cap: int = 2_000_000  # (T', center) checks

    # ── Attack ──
    attack_c: float = 4.0

    # ── Output ──
    csv_schema_version: str = "1"
    api_output_dir: str = "runs"  # POST /experiments/run may only write below this

    @property
    def effective_database_url(self) -> str:
        """Return the configured URL if set, otherwise fall back to SQLite."""
        if self.database_url:
            return self.database_url
        return "sqlite:///./erasim.db"

    model_config = SettingsConfigDict(
        env_prefix="ERASIM_",
        env_file=os.environ.get("ERASIM_ENV_FILE", ".env"),
        env_file_encoding="utf-8",
        extra="ignore",
    )


settings = Settings()
