"""Budget calibration: scale all budgets until a target share of bidders is paced."""
from __future__ import annotations

from typing import Callable

import numpy as np

from ..market import PacingInstance, PacingOutcome

Solver = Callable[[PacingInstance], PacingOutcome]


def _default_solver(instance: PacingInstance) -> PacingOutcome:
    from ..mip import SolverConfig, solve_instance
    res = solve_instance(instance, "max_paced_welfare", SolverConfig(time_limit=120.0))
    if res.status != "optimal":
        raise TimeoutError(f"calibration solve ended with status {res.status}")
    return res.outcome


def constrained_count(outcome: PacingOutcome, tol: float = 1e-6) -> int:
    return int(np.sum(outcome.alphas < 1 - tol))


def calibrate_budgets(small: PacingInstance, target_constrained_fraction: float,
                      solver: Solver | None = None, max_iter: int = 40
                      ) -> tuple[PacingInstance, float]:
    """Bisect (in log space) on one scalar multiplying every finite budget.

    Stops when the equilibrium returned by ``solver`` (paced-welfare maximising
    by default) has a number of paced bidders within one of the target.
    Returns the rescaled instance and the scalar.
    """
    if not 0.0 <= target_constrained_fraction <= 1.0:
        raise ValueError("target fraction must lie in [0, 1]")
    solver = solver or _default_solver
    target = target_constrained_fraction * small.n

    def count(c):
        return constrained_count(solver(small.with_budgets(small.budgets * c)))

    def ok(k):
        return abs(k - target) < 1

    k1 = count(1.0)
    if ok(k1):
        return small, 1.0
    # lo: budgets too small (too many paced), hi: budgets too large
    lo = hi = 1.0
    step = 4.0 if k1 > target else 0.25
    c = 1.0
    for _ in range(max_iter):
        c *= step
        k = count(c)
        if ok(k):
            return small.with_budgets(small.budgets * c), c
        if k > target:
            lo = c
        else:
            hi = c
        if (k > target) != (k1 > target):
            break
    else:
        raise RuntimeError("could not bracket the target share of paced bidders")
    for _ in range(max_iter):
        c = float(np.sqrt(lo * hi))
        k = count(c)
        if ok(k):
            return small.with_budgets(small.budgets * c), c
        if k > target:
            lo = c
        else:
            hi = c
    raise RuntimeError("bisection did not reach the target share of paced bidders")
