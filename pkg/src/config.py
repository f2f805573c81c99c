"""Environment-driven settings for the command-line front end."""

import logging
import os
from dataclasses import dataclass
from typing import Optional

from dotenv import load_dotenv

logger = logging.getLogger(__name__)


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        logger.warning(f"Ignoring non-integer {name}={raw!r}, using {default}")
        return default


@dataclass(frozen=True)
class Settings:
    """
    Process-wide settings.

    Values come from the environment (optionally a `.env` file); command-line
    flags take precedence over anything set here.
    """

    workers: int = 1
    log_level: str = "INFO"
    log_file: Optional[str] = None
    debug: bool = False
    housing_csv: Optional[str] = None
    reps: int = 20

    @classmethod
    def from_env(cls, dotenv: bool = True) -> "Settings":
        """
        Build settings from environment variables.

        Args:
            dotenv: Load a `.env` file from the working directory first

        Returns:
            Populated settings
        """
        if dotenv:
            load_dotenv()

        return cls(
            workers=_env_int("NIS_WORKERS", 1),
            log_level=os.getenv("NIS_LOG_LEVEL", "INFO").upper(),
            log_file=os.getenv("NIS_LOG_FILE") or None,
            debug=os.getenv("NIS_DEBUG", "false").lower() == "true",
            housing_csv=os.getenv("NIS_HOUSING_CSV") or None,
            reps=max(1, _env_int("NIS_REPS", 20)),
        )
