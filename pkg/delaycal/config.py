import os
from functools import lru_cache
from typing import Optional

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Process-level settings (environment / .env)."""

    # Worker cap for parallel Monte Carlo batches (DELAYCAL_THREADS)
    THREADS: Optional[int] = None

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_FORMAT: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

    model_config = SettingsConfigDict(
        env_prefix="DELAYCAL_",
        env_file=".env",
        extra="ignore",
    )


@lru_cache()
def get_settings() -> Settings:
    return Settings()


def resolve_worker_count(requested: Optional[int] = None) -> int:
    """Return the number of worker processes to use for a batch.

    ``requested`` wins when given, but never exceeds ``DELAYCAL_THREADS``
    (when set) or the CPU count.
    """
    cpu_count = os.cpu_count() or 1
    limit = get_settings().THREADS
    count = requested if requested is not None else (limit or cpu_count)
    if limit is not None:
        count = min(count, limit)
    return max(1, min(count, cpu_count))
