"""Best-response dynamics over pacing multipliers.

One iteration is one bidder replacing its multiplier with a best response to
the current multipliers of everyone else.  Bidders take turns in index order.
Bidders with unlimited budgets are never paced (their best response is always
1), so they are fixed at 1 and do not take turns.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..market import DEFAULT_TOL, PacingInstance, Tolerance, best_response


@dataclass(frozen=True)
class BrConfig:
    tie_break: str = "high"
    max_iters: int = 100
    init: str | tuple = "random"        # "random", "ones" or explicit multipliers
    seed: int = 0
    convergence_tol: float = 1e-9

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.tie_break not in ("high", "low"):
            raise ValueError("tie_break must be 'high' or 'low'")


@dataclass
class AuctionRecord:
    """Realised auction outcome for a multiplier profile with random tie-breaking."""
    bids: np.ndarray
    winners: np.ndarray   # -1 when nobody bids positively
    prices: np.ndarray
    spends: np.ndarray    # per bidder


@dataclass
class DynamicsTrace:
    multipliers: list[np.ndarray] = field(default_factory=list)   # profile after each record
    records: list[dict] = field(default_factory=list)
    converged: bool = False
    converged_at: int | None = None    # iteration after which the profile no longer changed
    seed: int = 0

    @property
    def final(self) -> np.ndarray:
        return self.multipliers[-1]

    def to_jsonl(self) -> str:
        import json
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in self.records)


def run_auctions(instance: PacingInstance, alphas: np.ndarray, rng: np.random.Generator
                 ) -> AuctionRecord:
    """Second-price auctions on every good with a uniformly random tie winner."""
    bids = alphas[:, None] * instance.values
    n, m = bids.shape
    winners = np.full(m, -1)
    prices = np.zeros(m)
    spends = np.zeros(n)
    for j in range(m):
        col = bids[:, j]
        top = col.max()
        if top <= 0:
            continue
        tied = np.flatnonzero(col >= top)
        w = int(tied[rng.integers(tied.size)]) if tied.size > 1 else int(tied[0])
        winners[j] = w
        prices[j] = np.delete(col, w).max() if n > 1 else 0.0
        spends[w] += prices[j]
    return AuctionRecord(bids, winners, prices, spends)


def _initial(instance: PacingInstance, config: BrConfig) -> np.ndarray:
    if isinstance(config.init, str):
        if config.init == "random":
            a = np.random.default_rng(config.seed).uniform(0.0, 1.0, instance.n)
        elif config.init == "ones":
            a = np.ones(instance.n)
        else:
            raise ValueError(f"unknown init {config.init!r}")
    else:
        a = np.array(config.init, dtype=float)
        if a.shape != (instance.n,):
            raise ValueError("initial multipliers have the wrong length")
    a = a.copy()
    a[instance.unlimited] = 1.0
    return a


def br_dynamics(instance: PacingInstance, config: BrConfig = BrConfig(),
                tol: Tolerance = DEFAULT_TOL) -> DynamicsTrace:
    alphas = _initial(instance, config)
    rng = np.random.default_rng(config.seed)
    movers = [i for i in range(instance.n) if not instance.unlimited[i]]
    trace = DynamicsTrace(seed=config.seed)
    trace.multipliers.append(alphas.copy())
    if not movers:
        trace.converged, trace.converged_at = True, 0
        return trace
    last_change = 0
    round_change = 0.0
    for it in range(1, config.max_iters + 1):
        i = movers[(it - 1) % len(movers)]
        bids = alphas[:, None] * instance.values
        br = best_response(instance, i, bids, config.tie_break, tol)
        change = abs(br.alpha - alphas[i])
        alphas[i] = br.alpha
        if change > config.convergence_tol:
            last_change = it
        round_change = max(round_change, change)
        auction = run_auctions(instance, alphas, rng)
        trace.multipliers.append(alphas.copy())
        trace.records.append({
            "iteration": it, "bidder": i, "alpha": br.alpha, "change": change,
            "multipliers": alphas.tolist(), "winners": auction.winners.tolist(),
            "prices": auction.prices.tolist(), "spends": auction.spends.tolist(),
            "best_response_utility": br.utility,
        })
        if it % len(movers) == 0:
            if round_change < config.convergence_tol and it > len(movers) - 1:
                trace.converged = True
                break
            round_change = 0.0
    trace.converged_at = last_change if trace.converged else None
    return trace
