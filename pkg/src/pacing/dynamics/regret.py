"""Hindsight regret of a bid profile against the best fixed multiplier."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..market import PacingInstance, best_response


@dataclass(frozen=True)
class RegretReport:
    realized: np.ndarray
    best: np.ndarray
    absolute: np.ndarray
    relative: np.ndarray          # nan where the best-response utility is not positive
    penalty: np.ndarray
    overspend: np.ndarray

    @property
    def max_relative(self) -> float:
        ok = ~np.isnan(self.relative)
        return float(self.relative[ok].max()) if ok.any() else float("nan")

    @property
    def mean_relative(self) -> float:
        ok = ~np.isnan(self.relative)
        return float(self.relative[ok].mean()) if ok.any() else float("nan")


def overspend_penalty(spend: float, budget: float, paced_welfare: float) -> float:
    """Penalty for exceeding the budget: overspend x spend/budget x paced welfare/budget."""
    if not np.isfinite(budget) or spend <= budget:
        return 0.0
    return (spend - budget) * (spend / budget) * (paced_welfare / budget)


def regret(instance: PacingInstance, bids, fractions, prices) -> RegretReport:
    """Regret of each bidder given final bids and the realised allocation.

    ``fractions`` and ``prices`` describe what was actually won and paid (for
    example a random-tie-break auction outcome); ``bids`` are everyone's final
    paced bids, which are held fixed when computing the best response.
    """
    bids = np.asarray(bids, dtype=float)
    x = np.asarray(fractions, dtype=float)
    p = np.asarray(prices, dtype=float)
    v = instance.values
    pay = x * (p[None, :] if p.ndim == 1 else p)
    spend = pay.sum(axis=1)
    value = (x * v).sum(axis=1)
    paced = (x * bids).sum(axis=1)
    n = instance.n
    pen = np.array([overspend_penalty(spend[i], instance.budgets[i], paced[i]) for i in range(n)])
    realized = value - spend - pen
    best = np.array([best_response(instance, i, bids).utility for i in range(n)])
    absolute = best - realized
    with np.errstate(divide="ignore", invalid="ignore"):
        relative = np.where(best > 0, absolute / np.where(best > 0, best, 1.0), np.nan)
    over = np.where(np.isfinite(instance.budgets), np.maximum(spend - instance.budgets, 0.0), 0.0)
    return RegretReport(realized, best, absolute, relative, pen, over)


def allocation_from_winners(n: int, winners: np.ndarray) -> np.ndarray:
    x = np.zeros((n, winners.size))
    won = winners >= 0
    x[winners[won], np.flatnonzero(won)] = 1.0
    return x
