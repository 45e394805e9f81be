"""Single-bidder best response against fixed rival bids.

Against fixed rival bids the bidder's utility is piecewise constant in its own
multiplier: it changes only at the critical values ``R_j / v_ij`` where its bid
meets the best rival bid ``R_j`` on some good.  At a critical value the bidder
is tied and may take any fraction of the tied goods.  We therefore evaluate
every critical point and every open interval between them exactly.

When an optimum is attainable without relying on ties we prefer it; ties are
only used when they are strictly better.  This matches the usual reading of
best-response dynamics where tie outcomes are not under the bidder's control.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .types import DEFAULT_TOL, PacingInstance, Tolerance

_GROUP_RTOL = 1e-12


@dataclass(frozen=True)
class Piece:
    lo: float
    hi: float
    lo_closed: bool
    hi_closed: bool

    def contains(self, a: float, slack: float = 0.0) -> bool:
        if self.lo_closed:
            ok_lo = a >= self.lo - slack
        else:
            ok_lo = a > self.lo - slack
        if self.hi_closed:
            ok_hi = a <= self.hi + slack
        else:
            ok_hi = a < self.hi + slack
        return ok_lo and ok_hi


@dataclass(frozen=True)
class BestResponse:
    alpha: float
    fractions: np.ndarray
    utility: float
    spend: float
    optimal_set: tuple[Piece, ...]
    zero_only: bool

    def contains(self, alpha: float, slack: float = 0.0) -> bool:
        return any(p.contains(alpha, slack) for p in self.optimal_set)


def rival_maxima(rival_bids: np.ndarray, bidder: int) -> np.ndarray:
    rb = np.asarray(rival_bids, dtype=float)
    if rb.shape[0] <= 1:
        return np.zeros(rb.shape[1])
    return np.delete(rb, bidder, axis=0).max(axis=0)


class _Landscape:
    """Sorted critical values of one bidder with prefix sums over goods."""

    def __init__(self, values: np.ndarray, rivals: np.ndarray, budget: float):
        self.m = values.shape[0]
        self.budget = budget
        idx = np.flatnonzero(values > 0)
        crit = rivals[idx] / values[idx]
        near_one = np.abs(crit - 1.0) <= _GROUP_RTOL
        crit[near_one] = 1.0
        keep = crit <= 1.0
        idx, crit = idx[keep], crit[keep]
        order = np.argsort(crit, kind="stable")
        self.idx = idx[order]
        self.crit = crit[order]
        v = values[self.idx]
        r = rivals[self.idx]
        self.price = r
        self.surplus = v - r
        self.cum_price = np.concatenate([[0.0], np.cumsum(r)])
        self.cum_surplus = np.concatenate([[0.0], np.cumsum(self.surplus)])
        # group near-equal critical values
        if self.crit.size:
            gaps = np.diff(self.crit) > _GROUP_RTOL * np.maximum(1.0, self.crit[1:])
            starts = np.concatenate([[0], np.flatnonzero(gaps) + 1])
        else:
            starts = np.zeros(0, dtype=int)
        self.g_start = starts
        self.g_end = np.concatenate([starts[1:], [self.crit.size]]).astype(int)
        self.g_val = self.crit[starts] if starts.size else np.zeros(0)

    def point(self, k: int) -> tuple[float, float, float]:
        """Utility, spend and tie fill for critical group k (favourable ties)."""
        s, e = self.g_start[k], self.g_end[k]
        spend = self.cum_price[s]
        util = self.cum_surplus[s]
        if spend > self.budget * (1 + 1e-12) + 1e-12:
            return -np.inf, spend, 0.0
        tie_price = self.cum_price[e] - self.cum_price[s]
        tie_surplus = self.cum_surplus[e] - self.cum_surplus[s]
        if tie_price <= 0:
            return util + tie_surplus, spend, 1.0
        room = max(self.budget - spend, 0.0)
        frac = min(1.0, room / tie_price)
        return util + frac * tie_surplus, spend + frac * tie_price, frac

    def prefix(self, count: int) -> tuple[float, float]:
        spend = self.cum_price[count]
        if spend > self.budget * (1 + 1e-12) + 1e-12:
            return -np.inf, spend
        return self.cum_surplus[count], spend

    def count_below(self, a: float) -> int:
        """Number of goods won outright at multiplier a (critical value < a)."""
        return int(np.searchsorted(self.crit, a, side="left"))


def best_response(instance: PacingInstance, bidder: int, rival_bids, tie_break: str = "high",
                  tol: Tolerance = DEFAULT_TOL) -> BestResponse:
    """Utility-maximising multiplier for ``bidder`` against fixed rival bids.

    Parameters
    ----------
    instance : PacingInstance
    bidder : int
        Index of the responding bidder.
    rival_bids : array (n, m)
        Paced bids of every bidder; the responding bidder's row is ignored.
    tie_break : {"high", "low"}
        Which optimal multiplier to report when the optimum is not unique.

    Returns
    -------
    BestResponse
        Selected multiplier, the fractions it wins (tie fractions chosen to
        respect the budget), its utility and the full optimal set.
    """
    if not 0 <= bidder < instance.n:
        raise IndexError(f"bidder {bidder} out of range for {instance.n} bidders")
    rb = np.asarray(rival_bids, dtype=float)
    if rb.shape != (instance.n, instance.m):
        raise ValueError("rival_bids must have the instance's shape")
    others = np.delete(rb, bidder, axis=0)
    if others.size and (np.any(~np.isfinite(others)) or np.any(others < 0)):
        raise ValueError("rival bids must be finite and non-negative")
    if tie_break not in ("high", "low"):
        raise ValueError("tie_break must be 'high' or 'low'")

    values = instance.values[bidder]
    rivals = rival_maxima(rb, bidder)
    L = _Landscape(values, rivals, float(instance.budgets[bidder]))

    # candidates: (utility, piece, kind, payload)
    grid = sorted(set(L.g_val.tolist()) | {0.0, 1.0})
    group_of = {float(g): k for k, g in enumerate(L.g_val)}
    tie_free: list[tuple[float, Piece, tuple]] = []
    ties: list[tuple[float, Piece, tuple]] = []
    for g in grid:
        if g in group_of:
            u, _, _ = L.point(group_of[g])
            ties.append((u, Piece(g, g, True, True), ("point", group_of[g])))
        else:
            u, _ = L.prefix(L.count_below(g))
            tie_free.append((u, Piece(g, g, True, True), ("prefix", L.count_below(g))))
    for lo, hi in zip(grid[:-1], grid[1:]):
        cnt = L.count_below(0.5 * (lo + hi))
        u, _ = L.prefix(cnt)
        tie_free.append((u, Piece(lo, hi, False, False), ("prefix", cnt)))

    best = max(c[0] for c in tie_free + ties)
    thresh = best - 1e-9 * max(1.0, abs(best))
    chosen = [c for c in tie_free if c[0] >= thresh]
    if not chosen:
        chosen = [c for c in ties if c[0] >= thresh]
    # the domain end alpha = 1 is always an admissible representative
    one = [c for c in ties if c[1].lo == 1.0 and c[0] >= thresh]
    chosen = chosen + [c for c in one if c not in chosen]

    pieces = tuple(sorted((c[1] for c in chosen), key=lambda p: (p.lo, p.hi)))
    if tie_break == "high":
        pick = max(chosen, key=lambda c: (c[1].hi, c[1].hi_closed))
        p = pick[1]
        alpha = p.hi if p.hi_closed else p.hi - min(tol.eps_tie, 0.5 * (p.hi - p.lo))
    else:
        pick = min(chosen, key=lambda c: (c[1].lo, not c[1].lo_closed))
        p = pick[1]
        alpha = p.lo if p.lo_closed else p.lo + min(tol.eps_tie, 0.5 * (p.hi - p.lo))

    frac = np.zeros(instance.m)
    kind, payload = pick[2]
    if kind == "point":
        k = payload
        s, e = L.g_start[k], L.g_end[k]
        frac[L.idx[:s]] = 1.0
        _, spend, tie_frac = L.point(k)
        frac[L.idx[s:e]] = tie_frac
    else:
        frac[L.idx[:payload]] = 1.0
        spend = L.cum_price[payload]
    zero_only = all(pc.hi == 0.0 for pc in pieces)
    return BestResponse(float(alpha), frac, float(pick[0]), float(spend), pieces, zero_only)


def utility_at(instance: PacingInstance, bidder: int, rival_bids, alpha: float,
               tie_tol: float = 1e-9) -> tuple[float, float, bool]:
    """Utility, spend and feasibility of multiplier ``alpha`` with favourable ties.

    Over-budget outcomes (even with zero tie fractions) are reported as
    ``feasible=False`` together with the forced spend instead of minus infinity.
    """
    values = instance.values[bidder]
    rivals = rival_maxima(np.asarray(rival_bids, dtype=float), bidder)
    budget = float(instance.budgets[bidder])
    bid = alpha * values
    pos = values > 0
    gap = bid - rivals
    scale = np.maximum(1.0, rivals)
    tied = pos & (np.abs(gap) <= tie_tol * scale)
    won = pos & ~tied & (gap > 0)
    spend = float(rivals[won].sum())
    util = float((values - rivals)[won].sum())
    if spend > budget + 1e-12 * max(1.0, budget if np.isfinite(budget) else 1.0):
        return util, spend, False
    free = tied & (rivals <= 0)
    util += float(values[free].sum())
    paid = tied & (rivals > 0)
    tie_price = float(rivals[paid].sum())
    if tie_price > 0:
        f = min(1.0, (budget - spend) / tie_price)
        util += f * float((values - rivals)[paid].sum())
        spend += f * tie_price
    return util, spend, True
