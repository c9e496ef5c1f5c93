"""Run configuration for the command-line tool"""

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union
import logging
import os

from dotenv import load_dotenv

from modparam.curve import DEFAULT_COUNTING_BUDGET
from modparam.periods import DEFAULT_BITS


logger = logging.getLogger(__name__)

OUTPUT_FORMATS = ("json", "csv")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


@dataclass
class RunConfig:
    """Settings shared by every subcommand"""

    n_max: int = 60
    bits: int = DEFAULT_BITS
    counting_budget: int = DEFAULT_COUNTING_BUDGET
    degree_bound: Optional[int] = None
    output_format: str = "json"
    log_level: str = "WARNING"

    def __post_init__(self):
        """Validate settings after initialization"""
        if self.n_max <= 0:
            raise ValueError("n_max must be positive")
        if self.bits < 64:
            raise ValueError("bits must be at least 64")
        if self.counting_budget <= 0:
            raise ValueError("Counting budget must be positive")
        if self.degree_bound is not None and self.degree_bound < 0:
            raise ValueError("Degree bound cannot be negative")
        if self.output_format not in OUTPUT_FORMATS:
            raise ValueError(f"Invalid output format: {self.output_format}")
        self.log_level = self.log_level.upper()
        if self.log_level not in LOG_LEVELS:
            raise ValueError(f"Invalid log level: {self.log_level}")

    @classmethod
    def from_env(cls, env_file: Optional[Union[str, Path]] = None, **overrides) -> "RunConfig":
        """
        Build a configuration from a .env file and the process environment

        MODPARAM_BITS sets the default precision and MODPARAM_LOG_LEVEL the
        log level; explicit keyword overrides that are not None win.
        """
        load_dotenv(dotenv_path=env_file)
        settings = {}
        bits = os.getenv("MODPARAM_BITS")
        if bits:
            try:
                settings["bits"] = int(bits)
            except ValueError as exc:
                raise ValueError(f"MODPARAM_BITS must be an integer, got {bits!r}") from exc
        level = os.getenv("MODPARAM_LOG_LEVEL")
        if level:
            settings["log_level"] = level
        settings.update({k: v for k, v in overrides.items() if v is not None})
        logger.debug(f"Run configuration from environment: {settings}")
        return cls(**settings)

    def to_dict(self) -> dict:
        return {
            "n_max": self.n_max,
            "bits": self.bits,
            "counting_budget": self.counting_budget,
            "degree_bound": self.degree_bound,
            "output_format": self.output_format,
            "log_level": self.log_level,
        }
