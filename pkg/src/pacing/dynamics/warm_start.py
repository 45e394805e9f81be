"""Seeding adaptive pacing with MIP multipliers versus constant starts."""
from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from ..instances.scaling import ScaleConfig, ScaledInstance, scale_instance
from ..market import PacingInstance
from .adaptive import AdaptiveConfig, adaptive_pacing
from .regret import regret

MIP = "mip"


@dataclass(frozen=True)
class WarmStartGrid:
    inits: tuple = (MIP, 0.1, 0.5, 1.0)
    epsilons: tuple = (0.01, 1.0, 2.0)
    alpha_mins: tuple = (0.05, 0.1)
    objective: str = "feasibility"
    time_limit: float = 60.0
    seed: int = 0


def mip_multipliers(instance: PacingInstance, objective: str = "feasibility",
                    time_limit: float = 60.0):
    """Equilibrium multipliers from the MIP, or None if no incumbent was found."""
    from ..mip import SolverConfig, solve_instance
    res = solve_instance(instance, objective, SolverConfig(time_limit=time_limit))
    return None if res.outcome is None else res.outcome.alphas.copy()


def run_cell(scaled: ScaledInstance, init_alphas, epsilon: float, alpha_min: float,
             seed: int = 0) -> dict:
    """One adaptive run and the hindsight regret of its final state."""
    a0 = np.clip(np.asarray(init_alphas, dtype=float), alpha_min, 1.0)
    trace = adaptive_pacing(scaled, AdaptiveConfig(tuple(a0), alpha_min, epsilon, seed))
    rep = regret(scaled.instance, trace.bids, trace.fractions, trace.prices)
    return {"max_relative_regret": rep.max_relative, "mean_relative_regret": rep.mean_relative,
            "revenue": float(trace.prices.sum())}


def warm_start_study(instance: PacingInstance, scales: list[ScaleConfig],
                     grid: WarmStartGrid = WarmStartGrid(), label: str = "") -> list[dict]:
    """One row per (scaled instance, init, epsilon, alpha_min).

    If the MIP finds no equilibrium, MIP rows are emitted with ``skipped`` set.
    """
    mip_alphas = None
    if MIP in grid.inits:
        mip_alphas = mip_multipliers(instance, grid.objective, grid.time_limit)
    rows = []
    for sc in scales:
        scaled = scale_instance(instance, sc)
        for init, eps, amin in itertools.product(grid.inits, grid.epsilons, grid.alpha_mins):
            row = {"instance": label, "factor": sc.factor, "sigma": sc.noise_sigma,
                   "init": str(init), "epsilon": eps, "alpha_min": amin, "skipped": False}
            if init == MIP:
                if mip_alphas is None:
                    row.update(skipped=True, max_relative_regret=np.nan,
                               mean_relative_regret=np.nan, revenue=np.nan)
                    rows.append(row)
                    continue
                a0 = mip_alphas
            else:
                a0 = np.full(instance.n, float(init))
            row.update(run_cell(scaled, a0, eps, amin, grid.seed))
            rows.append(row)
    return rows


def best_per_init(rows: list[dict]) -> dict[str, dict]:
    """For each init, the (epsilon, alpha_min) with the lowest average max relative regret."""
    groups: dict = defaultdict(list)
    for r in rows:
        if not r["skipped"] and not np.isnan(r["max_relative_regret"]):
            groups[(r["init"], r["epsilon"], r["alpha_min"])].append(r["max_relative_regret"])
    best: dict[str, dict] = {}
    for (init, eps, amin), vals in sorted(groups.items()):
        score = float(np.mean(vals))
        if init not in best or score < best[init]["avg_max_relative_regret"]:
            best[init] = {"epsilon": eps, "alpha_min": amin, "avg_max_relative_regret": score,
                          "cells": len(vals)}
    return best
