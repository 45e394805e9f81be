"""Adapter for a system MILP solver (SciPy's HiGHS MILP interface).

The adapter is deliberately narrow: load the model, set a time limit, read
back status and assignment.  The result goes through the same decode and
verification path as the embedded search.
"""
from __future__ import annotations

import time

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp

from ..market import DEFAULT_TOL, Tolerance
from .model import MilpModel, Objective


def solve_external(model: MilpModel, config, tol: Tolerance = DEFAULT_TOL):
    from .bnb import SolveResult, SolveStats, _accept

    t0 = time.perf_counter()
    res = milp(model.c, integrality=model.integrality.astype(int),
               bounds=Bounds(model.col_lo, model.col_hi),
               constraints=LinearConstraint(model.A, model.row_lo, model.row_hi),
               options={"time_limit": config.time_limit, "disp": False,
                        "mip_rel_gap": max(config.mip_gap, 1e-9)})
    stats = SolveStats(nodes=int(getattr(res, "mip_node_count", 0) or 0),
                       wall_time=time.perf_counter() - t0)
    if res.x is None:
        status = "infeasible" if res.status == 2 else "timeout"
        return SolveResult(status, stats=stats)
    x = np.asarray(res.x)
    outcome = _accept(model, x, tol, config)
    if outcome is None:
        stats.rejected_incumbents += 1
        return SolveResult("timeout" if res.status == 1 else "feasible", stats=stats,
                           flags=("external_solution_failed_verification",))
    status = "optimal" if res.status == 0 else "timeout"
    flags = ()
    if model.objective is Objective.RELAXED_FEASIBILITY and model.objective_value(x) > 1e-9:
        flags = ("relaxed_slack_positive",)
    value = model.objective_value(x)
    return SolveResult(status, outcome, value, x, value, stats, flags)
