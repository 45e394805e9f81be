from .best_response import BestResponse, Piece, best_response, utility_at
from .competitive import ParetoVerdict, ce_to_pacing, pareto_probe, pe_to_ce, verify_competitive
from .equilibrium import highest_other_bids, objectives, verify_equilibrium
from .smoothed import smoothed_outcome
from .types import (DEFAULT_TOL, UNLIMITED, CompetitiveOutcome, ObjectiveValues, PacingInstance,
                    PacingOutcome, SmoothedGameParams, Tolerance, Verdict, Violation)

__all__ = [
    "BestResponse", "Piece", "best_response", "utility_at",
    "ParetoVerdict", "ce_to_pacing", "pareto_probe", "pe_to_ce", "verify_competitive",
    "highest_other_bids", "objectives", "verify_equilibrium", "smoothed_outcome",
    "DEFAULT_TOL", "UNLIMITED", "CompetitiveOutcome", "ObjectiveValues", "PacingInstance",
    "PacingOutcome", "SmoothedGameParams", "Tolerance", "Verdict", "Violation",
]
