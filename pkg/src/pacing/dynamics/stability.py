"""Stability of constant multipliers and fractions in the limit dynamics.

In the limit model every bidder faces the same outcome each period.  A profile
is stable when no multiplier would move: a bidder spending faster than its
budget rate would have to be throttled, and a paced bidder spending slower
than its rate would raise its multiplier.  The auction outcome itself must be
what a second-price auction produces from the paced bids.  This is written
independently of the market verifier so the two can be compared.
"""
from __future__ import annotations

import numpy as np

from ..market import DEFAULT_TOL, PacingInstance, PacingOutcome, Tolerance, Verdict, Violation


def _auction_violations(bids, x, p, values, ef, et):
    n, m = bids.shape
    out = []
    for j in range(m):
        col = bids[:, j]
        top = col.max()
        share = x[:, j].sum()
        if share > 1 + ef:
            out.append(Violation("oversold", "auction", None, j, f"sold {share:.9g}"))
        elif share < 1 - ef and np.any(values[:, j] > 0):
            out.append(Violation("unsold_demand", "auction", None, j, f"sold {share:.9g}"))
        for i in range(n):
            if x[i, j] <= ef:
                continue
            if col[i] < top - et:
                out.append(Violation("outbid_winner", "auction", i, j,
                                     f"bid {col[i]:.9g} < top {top:.9g}"))
            rival = max((col[k] for k in range(n) if k != i), default=0.0)
            if abs(p[j] - rival) > ef:
                out.append(Violation("price_not_runner_up", "auction", i, j,
                                     f"price {p[j]:.9g} vs runner-up {rival:.9g}"))
    return out


def stability_check(instance: PacingInstance, outcome: PacingOutcome,
                    tol: Tolerance = DEFAULT_TOL) -> Verdict:
    a = np.asarray(outcome.alphas, dtype=float)
    x = np.asarray(outcome.fractions, dtype=float)
    p = np.asarray(outcome.prices, dtype=float)
    if a.shape != (instance.n,) or x.shape != (instance.n, instance.m) or p.shape != (instance.m,):
        raise ValueError("outcome does not match the instance")
    ef, et = tol.eps_feas, tol.eps_tie
    out: list[Violation] = []
    if np.any((a < -ef) | (a > 1 + ef)) or np.any((x < -ef) | (x > 1 + ef)) or np.any(p < -ef):
        out.append(Violation("not_a_profile", "range", None, None, "entries outside their domain"))

    out += _auction_violations(a[:, None] * instance.values, x, p, instance.values, ef, et)

    # per-period spend rate against the budget rate
    for i in range(instance.n):
        rate = float(np.dot(x[i], p))
        budget_rate = instance.budgets[i]
        drift = budget_rate - rate
        if drift < -ef:
            out.append(Violation("spends_too_fast", "rate", i, None,
                                 f"rate {rate:.9g} > budget rate {budget_rate:.9g}"))
        elif drift > ef and a[i] < 1 - ef:
            out.append(Violation("multiplier_would_rise", "rate", i, None,
                                 f"alpha {a[i]:.9g} with slack {drift:.9g}"))
    return Verdict.from_violations(out)
