"""
Experiment config loading.

JSON file -> raw dict -> `--set key=value` overrides -> ExperimentConfig.
Dotted keys address nested fields (delay_mode.value=-0.05); override values
are parsed as JSON and fall back to plain strings.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Sequence

from pydantic import ValidationError

from delaycal.errors import ConfigError
from delaycal.montecarlo.schemas import ExperimentConfig

logger = logging.getLogger(__name__)


def parse_override(text: str):
    if "=" not in text:
        raise ConfigError(f"override '{text}' is not of the form key=value")
    key, raw = text.split("=", 1)
    key = key.strip()
    if not key:
        raise ConfigError(f"override '{text}' has an empty key")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key, value


def apply_overrides(raw: Dict[str, Any], overrides: Sequence[str]) -> Dict[str, Any]:
    """Return a copy of raw with each key=value override applied."""
    result = json.loads(json.dumps(raw))
    for text in overrides:
        key, value = parse_override(text)
        target = result
        parts = key.split(".")
        for part in parts[:-1]:
            node = target.get(part)
            if not isinstance(node, dict):
                node = {}
                target[part] = node
            target = node
        target[parts[-1]] = value
    return result


def validate_config(raw: Dict[str, Any]) -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(raw)
    except ValidationError as exc:
        raise ConfigError(f"invalid experiment config: {exc}") from exc


def load_config(path: Optional[Path], overrides: Sequence[str] = ()) -> ExperimentConfig:
    """
    Load and validate an experiment config.

    Args:
        path: JSON file, or None for the built-in defaults
        overrides: key=value strings applied before validation

    Raises:
        ConfigError: missing file, malformed JSON or failed validation
    """
    raw: Dict[str, Any] = {}
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        try:
            raw = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError(f"config file {path} must contain a JSON object")
        logger.debug(f"Loaded config from {path}")
    return validate_config(apply_overrides(raw, overrides))


def dump_config(config: ExperimentConfig) -> str:
    """Canonical JSON echo of a resolved config."""
    return json.dumps(config.model_dump(mode="json"), indent=2, sort_keys=True) + "\n"
