"""Objective values and the pacing-equilibrium verifier."""
from __future__ import annotations

import numpy as np

from .types import (DEFAULT_TOL, ObjectiveValues, PacingInstance, PacingOutcome,
                    Tolerance, Verdict, Violation, check_dims)


def objectives(instance: PacingInstance, outcome: PacingOutcome) -> ObjectiveValues:
    check_dims(instance, outcome.alphas, outcome.fractions, outcome.prices)
    x = outcome.fractions
    v = instance.values
    return ObjectiveValues(
        revenue=float(outcome.spends.sum()),
        social_welfare=float((x * v).sum()),
        paced_welfare=float((x * outcome.alphas[:, None] * v).sum()),
    )


def highest_other_bids(bids: np.ndarray) -> np.ndarray:
    """``out[i, j]`` is the largest bid on good j among bidders other than i."""
    n, m = bids.shape
    if n == 1:
        return np.zeros((1, m))
    order = np.sort(bids, axis=0)
    top, second = order[-1], order[-2]
    is_top = bids >= top[None, :]
    # A bidder holding the top bid sees the second order statistic (which equals
    # the top when several bidders tie).
    return np.where(is_top, second[None, :], top[None, :])


def verify_equilibrium(instance: PacingInstance, outcome: PacingOutcome,
                       tol: Tolerance = DEFAULT_TOL) -> Verdict:
    """Check the three defining conditions of a pacing equilibrium.

    Violation conditions are labelled ``a`` (allocation), ``b`` (pricing) and
    ``c`` (budgets and complementarity); ``range`` covers out-of-domain entries.
    """
    a, x, p = outcome.alphas, outcome.fractions, outcome.prices
    check_dims(instance, a, x, p)
    for name, arr in (("alphas", a), ("fractions", x), ("prices", p)):
        if np.any(np.isnan(arr)):
            raise ValueError(f"NaN in {name}")
    ef, et = tol.eps_feas, tol.eps_tie
    v, B = instance.values, instance.budgets
    out: list[Violation] = []

    for i in np.flatnonzero((a < -ef) | (a > 1 + ef)):
        out.append(Violation("alpha_out_of_range", "range", int(i), None, f"alpha={a[i]:.6g}"))
    for i, j in zip(*np.nonzero((x < -ef) | (x > 1 + ef))):
        out.append(Violation("fraction_out_of_range", "range", int(i), int(j), f"x={x[i, j]:.6g}"))
    for j in np.flatnonzero(p < -ef):
        out.append(Violation("negative_price", "range", None, int(j), f"p={p[j]:.6g}"))

    bids = a[:, None] * v
    top = bids.max(axis=0)
    others = highest_other_bids(bids)
    won = x > ef

    # (a) allocation
    col = x.sum(axis=0)
    interested = (v > 0).any(axis=0)
    for j in range(instance.m):
        if col[j] > 1 + ef:
            out.append(Violation("overallocated", "a", None, j, f"sum x={col[j]:.9g}"))
        elif interested[j] and col[j] < 1 - ef:
            out.append(Violation("underallocated", "a", None, j, f"sum x={col[j]:.9g}"))
    for i, j in zip(*np.nonzero(won & (bids < top[None, :] - et))):
        out.append(Violation("not_highest_bid", "a", int(i), int(j),
                             f"bid={bids[i, j]:.9g} top={top[j]:.9g}"))

    # (b) second-price rule
    for i, j in zip(*np.nonzero(won & (np.abs(p[None, :] - others) > ef))):
        out.append(Violation("wrong_price", "b", int(i), int(j),
                             f"price={p[j]:.9g} highest other bid={others[i, j]:.9g}"))

    # (c) budgets and complementarity
    spend = (x * p[None, :]).sum(axis=1)
    for i in range(instance.n):
        if spend[i] > B[i] + ef:
            out.append(Violation("over_budget", "c", i, None,
                                 f"spend={spend[i]:.9g} budget={B[i]:.9g}"))
        elif spend[i] < B[i] - ef and a[i] < 1 - ef:
            out.append(Violation("paced_while_underspending", "c", i, None,
                                 f"alpha={a[i]:.9g} spend={spend[i]:.9g} budget={B[i]:.9g}"))
    return Verdict.from_violations(out)
