"""
Exception types raised by semigraph.

Every error derives from a builtin so callers can catch ``ValueError`` or
``RuntimeError`` without importing this module.
"""

from typing import Any, Optional


class DatasetFormatError(ValueError):
    """A dataset directory is missing files or holds inconsistent content."""


class SplitError(ValueError):
    """A dataset cannot be split as requested."""


class ShapeError(ValueError):
    """Operand shapes are incompatible for a tensor operation."""


class NonFiniteError(ArithmeticError):
    """A tensor operation produced NaN or infinite values."""


class CheckpointError(ValueError):
    """A checkpoint file is missing, corrupt or of an unsupported version."""


class ConfigError(ValueError):
    """A run configuration key or value is invalid."""


class DivergenceError(RuntimeError):
    """Training produced a non-finite loss."""

    def __init__(self, message: str, report: Optional[Any] = None):
        super().__init__(message)
        self.report = report
