from .adaptive import (AdaptiveConfig, AdaptiveTrace, adaptive_pacing, empirical_allocation,
                       pacing_update)
from .best_response_dynamics import AuctionRecord, BrConfig, DynamicsTrace, br_dynamics, run_auctions
from .regret import RegretReport, allocation_from_winners, overspend_penalty, regret
from .stability import stability_check
from .warm_start import MIP, WarmStartGrid, best_per_init, mip_multipliers, run_cell, warm_start_study

__all__ = ["AdaptiveConfig", "AdaptiveTrace", "adaptive_pacing", "empirical_allocation",
           "pacing_update", "AuctionRecord", "BrConfig", "DynamicsTrace", "br_dynamics",
           "run_auctions", "RegretReport", "allocation_from_winners", "overspend_penalty", "regret",
           "stability_check", "MIP", "WarmStartGrid", "best_per_init", "mip_multipliers",
           "run_cell", "warm_start_study"]
