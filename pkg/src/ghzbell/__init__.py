"""Detection-efficiency thresholds for multipartite GHZ Bell tests."""

from .core import (
    BellParams,
    DeterministicStrategy,
    Scenario,
    ScenarioError,
    bell_value_deterministic,
    validate_scenario,
)

__version__ = "0.1.0"

__all__ = [
    "BellParams",
    "DeterministicStrategy",
    "Scenario",
    "ScenarioError",
    "bell_value_deterministic",
    "validate_scenario",
]
