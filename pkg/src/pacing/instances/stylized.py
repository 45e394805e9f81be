"""Seeded random markets: complete, sampled and correlated families.

All randomness comes from ``numpy.random.default_rng(seed)`` (PCG64), so a
given config yields the same instance on every platform.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..market import PacingInstance

KINDS = ("complete", "sampled", "correlated")
_MAX_REJECTIONS = 100


@dataclass(frozen=True)
class GenConfig:
    kind: str = "complete"
    n: int = 4
    m: int = 6
    sigma: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}; expected one of {KINDS}")
        if self.n < 1 or self.m < 1:
            raise ValueError("n and m must be at least 1")
        if self.sigma < 0:
            raise ValueError("sigma must be non-negative")


def truncated_normal(rng: np.random.Generator, mean: np.ndarray, sigma: float) -> np.ndarray:
    """Normal draws restricted to [0, 1] by rejection, clamped after 100 tries."""
    mean = np.asarray(mean, dtype=float)
    if sigma == 0:
        return mean.copy()
    out = rng.normal(mean, sigma)
    bad = (out < 0) | (out > 1)
    for _ in range(_MAX_REJECTIONS - 1):
        if not bad.any():
            break
        out[bad] = rng.normal(mean[bad], sigma)
        bad = (out < 0) | (out > 1)
    return np.clip(out, 0.0, 1.0)


def _budgets(rng, values):
    n = values.shape[0]
    hi = values.sum(axis=1) / n
    b = rng.uniform(0.0, 1.0, size=n) * hi
    # a zero draw (or an all-zero row) would violate the positive-budget rule
    return np.maximum(b, 1e-9)


def gen_stylized(config: GenConfig) -> PacingInstance:
    rng = np.random.default_rng(config.seed)
    n, m = config.n, config.m
    if config.kind == "complete":
        values = rng.uniform(0.0, 1.0, size=(n, m))
    elif config.kind == "sampled":
        values = rng.uniform(0.0, 1.0, size=(n, m))
        edges = rng.integers(0, 2, size=(n, m)).astype(bool)
        for i in np.flatnonzero(~edges.any(axis=1)):
            edges[i, rng.integers(m)] = True
        values = np.where(edges, values, 0.0)
    else:
        mu = rng.uniform(0.0, 1.0, size=m)
        values = truncated_normal(rng, np.broadcast_to(mu, (n, m)).copy(), config.sigma)
    return PacingInstance(values, _budgets(rng, values))
