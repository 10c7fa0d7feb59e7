"""hopcap: Hebbian-Hopfield associative memory capacity toolkit.

Theory side: closed-form first-level characterizations and a numerical
second-level solver for the lifted-duality description of the constrained
ground-state energy, giving the AGS, NLT, and GLM capacity thresholds.
Experiment side: a seeded Monte Carlo simulator of the actual retrieval
dynamics and an exact small-instance enumeration oracle.
"""
from __future__ import annotations

__version__ = "0.1.0"

from .errors import (BracketError, DomainError, EvaluationError, HopcapError,
                     InfeasibleRegionError)

__all__ = ["__version__", "HopcapError", "DomainError", "EvaluationError",
           "BracketError", "InfeasibleRegionError"]
