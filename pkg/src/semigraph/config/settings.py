"""
Flat ``key = value`` run configuration files.

Lines starting with ``#`` are comments, list values are comma separated, and
``none`` (or an empty value) clears an optional key. Values are validated by
:class:`semigraph.schemas.RunConfig`; later sources override earlier ones:
defaults, then the file, then ``--set key=value`` overrides.
"""

from pathlib import Path
from typing import Dict, Iterable, Optional, Union

from loguru import logger

from ..errors import ConfigError
from ..schemas.base import RunConfig

_NONE_VALUES = {"", "none", "null"}


def parse_assignment(line: str, source: str = "<override>") -> Optional[tuple]:
    """Parse one ``key = value`` line; returns None for blanks and comments."""
    text = line.split("#", 1)[0].strip()
    if not text:
        return None
    if "=" not in text:
        raise ConfigError(f"{source}: expected 'key = value', got {line.strip()!r}")
    key, value = (part.strip() for part in text.split("=", 1))
    if key not in RunConfig.model_fields:
        raise ConfigError(f"{source}: unknown configuration key {key!r}")
    return key, (None if value.lower() in _NONE_VALUES else value)


def read_config_file(path: Union[str, Path]) -> Dict[str, Optional[str]]:
    """Raw string values from a config file; later duplicates win."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"configuration file not found: {path}")
    values: Dict[str, Optional[str]] = {}
    for number, line in enumerate(path.read_text().splitlines(), start=1):
        parsed = parse_assignment(line, source=f"{path.name}:{number}")
        if parsed:
            values[parsed[0]] = parsed[1]
    return values


def load_config(
    path: Optional[Union[str, Path]] = None,
    overrides: Iterable[str] = (),
    **explicit,
) -> RunConfig:
    """
    Build a :class:`RunConfig` from an optional file, ``key=value`` overrides and
    keyword arguments (highest precedence; ``None`` keywords are ignored).
    """
    values: Dict[str, Optional[str]] = {}
    if path is not None:
        values.update(read_config_file(path))
        logger.info(f"Loaded configuration from {path}")
    for item in overrides:
        parsed = parse_assignment(item)
        if parsed:
            values[parsed[0]] = parsed[1]
    merged = {k: v for k, v in values.items() if v is not None}
    merged.update({k: v for k, v in explicit.items() if v is not None})
    unknown = set(merged) - set(RunConfig.model_fields)
    if unknown:
        raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
    return RunConfig(**merged)


def format_config(config: RunConfig) -> str:
    """Render ``config`` back into the flat file format."""
    lines = ["# semigraph run configuration"]
    for key, value in config.echo().items():
        if value is None:
            value = "none"
        elif isinstance(value, list):
            value = ", ".join(str(item) for item in value)
        elif isinstance(value, bool):
            value = str(value).lower()
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"


def write_config(config: RunConfig, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_config(config))
    return path
