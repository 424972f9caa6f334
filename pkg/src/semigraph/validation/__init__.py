"""Numerical self-checks."""

from .selfcheck import SelfCheckSuite, away_from_zero, primitive_cases, random_graph

__all__ = ["SelfCheckSuite", "away_from_zero", "primitive_cases", "random_graph"]
