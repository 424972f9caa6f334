"""Pydantic schemas and enums."""

from .base import (
    DEFAULT_AUGMENTATIONS,
    AugmentKind,
    CheckResult,
    EncoderKind,
    EvaluationResult,
    HistoryRow,
    LossReport,
    RunConfig,
    RunReport,
    SeedResult,
    SweepParameter,
    Variant,
)

__all__ = [
    "DEFAULT_AUGMENTATIONS",
    "AugmentKind",
    "CheckResult",
    "EncoderKind",
    "EvaluationResult",
    "HistoryRow",
    "LossReport",
    "RunConfig",
    "RunReport",
    "SeedResult",
    "SweepParameter",
    "Variant",
]
