"""Python access to the gbhe solver core."""

from ._core import (
    ConfigError,
    StepFailure,
    UnsupportedCase,
    caputo_weights,
    config_hash,
    convergence,
    memory_weights,
    mesh_counts,
    simulate,
)

__all__ = [
    "ConfigError",
    "StepFailure",
    "UnsupportedCase",
    "caputo_weights",
    "config_hash",
    "convergence",
    "memory_weights",
    "mesh_counts",
    "simulate",
]
