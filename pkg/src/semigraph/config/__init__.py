"""Run configuration loading."""

from .settings import format_config, load_config, parse_assignment, read_config_file, write_config

__all__ = ["load_config", "read_config_file", "parse_assignment", "format_config", "write_config"]
