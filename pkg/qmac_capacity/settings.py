"""
Configuration loading and logging setup
"""

import copy
import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional, Union

import yaml
from dotenv import load_dotenv

from .errors import ConfigurationError

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = Path(__file__).with_name("config.yaml")


class Settings:
    """Read-only, attribute-accessible view over the YAML configuration."""

    def __init__(self, data: Dict[str, Any]):
        self._data = data

    def __getattr__(self, name: str) -> Any:
        try:
            value = self._data[name]
        except KeyError:
            raise AttributeError(f"No configuration key '{name}'") from None
        if isinstance(value, dict):
            return Settings(value)
        return value

    def __getitem__(self, name: str) -> Any:
        return self.__getattr__(name)

    def get(self, name: str, default: Any = None) -> Any:
        if name not in self._data:
            return default
        return self.__getattr__(name)

    def as_dict(self) -> Dict[str, Any]:
        return copy.deepcopy(self._data)


def _merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def _read_yaml(path: Path) -> Dict[str, Any]:
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as e:
        raise ConfigurationError(f"Malformed configuration file {path}: {e}") from e
    except OSError as e:
        raise ConfigurationError(f"Cannot read configuration file {path}: {e}") from e
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigurationError(f"Configuration file {path} must contain a mapping")
    return data


def load_settings(path: Optional[Union[str, Path]] = None) -> Settings:
    """
    Load the toolkit configuration

    The packaged defaults are always read first; a user file (explicit
    ``path`` or the ``QMAC_CONFIG`` environment variable) is merged on top,
    and ``QMAC_LOG_LEVEL`` overrides the logging level.

    Args:
        path: Optional user configuration file

    Returns:
        Settings view of the merged configuration
    """
    load_dotenv()
    data = _read_yaml(DEFAULT_CONFIG_PATH)

    user_path = path or os.getenv("QMAC_CONFIG")
    if user_path:
        logger.info(f"Loading configuration overrides from {user_path}")
        data = _merge(data, _read_yaml(Path(user_path)))

    log_level = os.getenv("QMAC_LOG_LEVEL")
    if log_level:
        data.setdefault("logging", {})["level"] = log_level.upper()

    return Settings(data)


def configure_logging(settings: Settings) -> None:
    """Apply the ``logging`` section to the root logger."""
    section = settings.get("logging", Settings({}))
    level = str(section.get("level", "INFO")).upper()
    if not isinstance(logging.getLevelName(level), int):
        raise ConfigurationError(f"Unknown logging level '{level}'")
    logging.basicConfig(
        level=level,
        format=section.get("format", "%(asctime)s - %(name)s - %(levelname)s - %(message)s"),
    )
