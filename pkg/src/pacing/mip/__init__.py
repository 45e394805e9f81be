from .bnb import SolveResult, SolverConfig, SolveStats, solve
from .codec import ResidualError, decode, encode_outcome
from .lp import LpEngine, LpResult, lp_relax_solve
from .lpformat import to_lp_string
from .model import ALL_OBJECTIVES, Layout, MilpModel, Objective, build_model, pad_instance


def solve_instance(instance, objective, config: SolverConfig | None = None, alpha_lower=None):
    """Build and solve in one call."""
    model = build_model(instance, objective)
    if alpha_lower is not None:
        model = model.with_alpha_bounds(lower=alpha_lower)
    return solve(model, config)


__all__ = ["SolveResult", "SolverConfig", "SolveStats", "solve", "ResidualError", "decode",
           "encode_outcome", "LpEngine", "LpResult", "lp_relax_solve", "to_lp_string",
           "ALL_OBJECTIVES", "Layout", "MilpModel", "Objective", "build_model", "pad_instance",
           "solve_instance"]
