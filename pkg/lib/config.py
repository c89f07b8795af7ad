"""Run configuration: seed, budgets, output mode and seeded random streams."""

import json
import logging
import random
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional

logger = logging.getLogger(__name__)

DEFAULT_SEED = 0
DEFAULT_BUDGET = 200000
DEFAULT_MAX_ENUM = 200000
DEFAULT_LOG_FILE = "balab.log"
OUTPUT_MODES = ("human", "json")


@dataclass(frozen=True)
class RunConfig:
    """Settings shared by every subcommand.

    Identical configs (and inputs) give identical JSON output, because all
    randomness is drawn from rng(stream).
    """

    seed: int = DEFAULT_SEED
    budget: int = DEFAULT_BUDGET
    max_enum: int = DEFAULT_MAX_ENUM
    output: str = "human"
    log_file: str = DEFAULT_LOG_FILE

    def __post_init__(self):
        if self.output not in OUTPUT_MODES:
            raise ValueError(f"output must be one of {OUTPUT_MODES}, got {self.output!r}")
        if self.budget < 1 or self.max_enum < 1:
            raise ValueError("budget and max_enum must be positive")

    @property
    def json(self) -> bool:
        return self.output == "json"

    def rng(self, stream: str) -> random.Random:
        """Independent reproducible random source for one consumer."""
        return random.Random(f"{self.seed}:{stream}")

    def echo(self) -> Dict[str, int]:
        """The part of the config that is reported with every JSON result."""
        return {"seed": self.seed, "budget": self.budget, "max_enum": self.max_enum}


def load_config_file(config_file: Path) -> Dict[str, Any]:
    """Read defaults from a JSON config file.

    Unknown keys are ignored with a warning. An unreadable or malformed file
    is logged and treated as empty.

    Args:
        config_file: Path to a JSON object with RunConfig keys

    Returns:
        The recognised settings
    """
    if not config_file.exists():
        logger.warning(f"Config file {config_file} not found, using defaults")
        return {}

    try:
        with open(config_file, 'r') as f:
            data = json.load(f)
    except (json.JSONDecodeError, IOError) as e:
        logger.warning(f"Could not load config file: {e}, using defaults")
        return {}

    if not isinstance(data, dict):
        logger.warning(f"Config file {config_file} does not hold a JSON object, using defaults")
        return {}

    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        logger.warning(f"Ignoring unknown config keys: {', '.join(unknown)}")
    settings = {key: value for key, value in data.items() if key in known}
    logger.info(f"Loaded config file {config_file}: {sorted(settings)}")
    return settings


def build_config(config_file: Optional[Path] = None, **overrides: Any) -> RunConfig:
    """Defaults, then the config file, then explicit overrides (None means not given).

    A file value that makes the config invalid is dropped with a warning.
    """
    config = RunConfig()
    if config_file is not None:
        for key, value in load_config_file(config_file).items():
            try:
                config = replace(config, **{key: value})
            except (TypeError, ValueError) as e:
                logger.warning(f"Ignoring config value {key}={value!r}: {e}")
    given = {key: value for key, value in overrides.items() if value is not None}
    return replace(config, **given)
