"""Pacing equilibria in second-price auction markets."""
from .market import (CompetitiveOutcome, ObjectiveValues, PacingInstance, PacingOutcome,
                     Tolerance, objectives, verify_equilibrium)

__version__ = "0.1.0"
__all__ = ["CompetitiveOutcome", "ObjectiveValues", "PacingInstance", "PacingOutcome",
           "Tolerance", "objectives", "verify_equilibrium"]
