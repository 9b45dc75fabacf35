"""Ruin, tail-risk and fragility diagnostics."""

from ._ruinkit import *  # noqa: F401,F403
from ._ruinkit import (
    AmbiguousClassification,
    ConfigError,
    DegenerateInput,
    DivergentMoment,
    DomainError,
    InsufficientTailData,
    RuinkitError,
)

__version__ = "0.1.0"
