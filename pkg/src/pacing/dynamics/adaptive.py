"""Adaptive pacing over a sequence of second-price auctions."""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ..instances.scaling import ScaledInstance


@dataclass(frozen=True)
class AdaptiveConfig:
    init_alphas: tuple
    alpha_min: float = 0.05
    step: float = 0.01
    seed: int = 0

    def __post_init__(self):
        a = np.asarray(self.init_alphas, dtype=float)
        if not 0 < self.alpha_min <= 1:
            raise ValueError("alpha_min must lie in (0, 1]")
        if self.step < 0:
            raise ValueError("step must be non-negative")
        if np.any(a < self.alpha_min - 1e-12) or np.any(a > 1 + 1e-12):
            raise ValueError("initial multipliers must lie in [alpha_min, 1]")


@dataclass
class AdaptiveTrace:
    alphas: np.ndarray       # (auctions + 1, n) multipliers before each auction and at the end
    bids: np.ndarray         # (n, auctions)
    winners: np.ndarray      # (auctions,), -1 if unsold
    prices: np.ndarray       # (auctions,)
    remaining: np.ndarray    # (auctions + 1, n)
    seed: int

    @property
    def fractions(self) -> np.ndarray:
        n = self.bids.shape[0]
        x = np.zeros_like(self.bids)
        won = self.winners >= 0
        x[self.winners[won], np.flatnonzero(won)] = 1.0
        return x

    @property
    def spends(self) -> np.ndarray:
        return self.fractions * self.prices[None, :]

    @property
    def final_alphas(self) -> np.ndarray:
        return self.alphas[-1]

    def to_jsonl(self) -> str:
        lines = []
        for j in range(self.prices.size):
            lines.append(json.dumps({
                "auction": j, "multipliers": self.alphas[j].tolist(),
                "bids": self.bids[:, j].tolist(), "winner": int(self.winners[j]),
                "price": float(self.prices[j]), "remaining": self.remaining[j + 1].tolist(),
            }, sort_keys=True))
        return "\n".join(lines) + "\n"


def pacing_update(alpha, target, spend, step, alpha_min):
    """One multiplier update; works elementwise on arrays."""
    inner = 1.0 / alpha - step * (target - spend)
    return np.maximum(alpha_min, 1.0 / np.maximum(1.0, inner))


def adaptive_pacing(scaled: ScaledInstance, config: AdaptiveConfig) -> AdaptiveTrace:
    inst = scaled.instance
    v = inst.values
    n, total = v.shape
    rng = np.random.default_rng(config.seed)
    unlimited = inst.unlimited
    target = np.where(unlimited, 0.0, inst.budgets / total)
    remaining = inst.budgets.astype(float).copy()
    alpha = np.asarray(config.init_alphas, dtype=float).copy()
    alphas = np.empty((total + 1, n))
    rem_hist = np.empty((total + 1, n))
    bids = np.empty((n, total))
    winners = np.full(total, -1)
    prices = np.zeros(total)
    idx = np.arange(n)
    for j in range(total):
        alphas[j] = alpha
        rem_hist[j] = remaining
        b = np.minimum(v[:, j] * alpha, remaining)
        bids[:, j] = b
        top = b.max()
        spend = np.zeros(n)
        if top > 0:
            tied = idx[b >= top]
            w = int(tied[rng.integers(tied.size)]) if tied.size > 1 else int(tied[0])
            price = float(np.delete(b, w).max()) if n > 1 else 0.0
            winners[j] = w
            prices[j] = price
            spend[w] = price
            remaining[w] -= price
        new = pacing_update(alpha, target, spend, config.step, config.alpha_min)
        alpha = np.where(unlimited, 1.0 if config.step > 0 else alpha, new)
    alphas[total] = alpha
    rem_hist[total] = remaining
    return AdaptiveTrace(alphas, bids, winners, prices, rem_hist, config.seed)


def empirical_allocation(scaled: ScaledInstance, trace: AdaptiveTrace) -> np.ndarray:
    """Share of each original good type won by each bidder; nan if never sold."""
    m = int(scaled.good_types.max()) + 1
    x = trace.fractions
    n = x.shape[0]
    won = np.zeros((n, m))
    np.add.at(won.T, scaled.good_types, x.T)
    total = won.sum(axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(total > 0, won / np.where(total > 0, total, 1.0), np.nan)
