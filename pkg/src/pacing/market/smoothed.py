"""Evaluator for the smoothed pacing game used in the existence argument."""
from __future__ import annotations

import numpy as np

from .types import PacingInstance, SmoothedGameParams, check_dims


def smoothed_outcome(instance: PacingInstance, alphas, params: SmoothedGameParams):
    """Fractions, spends and utilities of the (epsilon, H)-smoothed game.

    A reserve bidder bids ``2 * epsilon`` on every good.  Bidders within
    ``epsilon`` of the top bid share the good in proportion to how far they
    clear ``top - epsilon``; each pays the best competing bid (reserve
    included) minus epsilon per unit.  Every bidder additionally buys
    ``alpha`` units of an artificial good worth ``2 * epsilon`` that costs
    ``epsilon`` per unit.

    Returns
    -------
    fractions : (n, m) array
    spends : (n, m) array
    utilities : (n,) array
    """
    a = np.asarray(alphas, dtype=float)
    check_dims(instance, alphas=a)
    if np.any(a < 0) or np.any(a > 1):
        raise ValueError("alphas must lie in [0, 1]")
    eps, H = params.epsilon, params.penalty
    v, B = instance.values, instance.budgets
    n, m = v.shape
    bids = np.vstack([a[:, None] * v, np.full((1, m), 2 * eps)])
    top = bids.max(axis=0)
    floor = top - eps
    weight = np.clip(bids - floor[None, :], 0.0, None)
    share = weight / weight.sum(axis=0)[None, :]

    order = np.sort(bids, axis=0)
    first, second = order[-1], order[-2]
    other = np.where(bids >= first[None, :], second[None, :], first[None, :])
    price = other - eps

    x = share[:n]
    s = x * price[:n]
    pay = s.sum(axis=1) + a * eps
    slack = B - pay
    gains = 2 * a * eps + (x * v).sum(axis=1)
    slack_term = np.where(slack >= 0, slack, H * slack)
    util = np.where(np.isinf(B), gains - pay, slack_term + gains)
    return x, s, util
