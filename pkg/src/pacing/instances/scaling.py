"""Scaling a market up to many auctions, and compressing it by clustering goods."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.cluster import KMeans

from ..market import PacingInstance


@dataclass(frozen=True)
class ScaleConfig:
    factor: int = 1
    noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.factor < 1:
            raise ValueError("factor must be at least 1")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be non-negative")


@dataclass(frozen=True)
class ScaledInstance:
    instance: PacingInstance
    good_types: np.ndarray  # 0-based original good index of each auction
    factor: int


def scale_instance(instance: PacingInstance, config: ScaleConfig) -> ScaledInstance:
    """Repeat every good ``factor`` times in rotating order and scale budgets.

    Values receive independent Gaussian noise, clamped below at zero.
    """
    m = instance.m
    total = config.factor * m
    types = np.arange(total) % m
    values = instance.values[:, types].copy()
    if config.noise_sigma > 0:
        rng = np.random.default_rng(config.seed)
        values = np.maximum(values + rng.normal(0.0, config.noise_sigma, size=values.shape), 0.0)
    budgets = instance.budgets * config.factor
    return ScaledInstance(PacingInstance(values, budgets), types, config.factor)


def compress_by_clustering(instance: PacingInstance, k: int, seed: int = 0
                           ) -> tuple[PacingInstance, np.ndarray]:
    """Merge goods into ``k`` k-means clusters of their bidder-value vectors.

    A cluster's value for a bidder is the sum of that bidder's values over the
    member goods.  Returns the small instance and the good-to-cluster map.
    """
    m = instance.m
    if k < 1 or k > m:
        raise ValueError(f"k must be in [1, {m}]")
    feats = instance.values.T
    if k == m:
        labels = np.arange(m)
    elif k == 1:
        labels = np.zeros(m, dtype=int)
    else:
        km = KMeans(n_clusters=k, init="k-means++", n_init=1, max_iter=100, random_state=seed)
        labels = km.fit_predict(feats)
    # relabel clusters by first appearance so the output is order-stable
    _, first = np.unique(labels, return_index=True)
    order = np.argsort(first)
    remap = np.empty(order.size, dtype=int)
    remap[np.unique(labels)[order]] = np.arange(order.size)
    labels = remap[labels]
    small = np.zeros((instance.n, labels.max() + 1))
    np.add.at(small.T, labels, feats)
    return PacingInstance(small, instance.budgets), labels
