"""Does a focal bidder gain by scaling its reported budget and values?"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from ..market import PacingInstance
from ..market.io import instance_hash
from ..mip import SolverConfig, solve_instance
from .parallel import pmap
from .report import ExperimentReport

GAIN_TOL = 1e-6


@dataclass(frozen=True)
class MisreportGrid:
    betas: tuple = (0.6, 0.8, 1.0, 1.2, 1.4)
    nus: tuple = (0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2, 1.3, 1.4)

    @classmethod
    def fine(cls) -> "MisreportGrid":
        return cls(betas=tuple(np.round(np.arange(0.6, 1.4001, 0.05), 2)))

    def cells(self):
        for b in self.betas:
            for nu in self.nus:
                yield float(b), float(nu)


def reported_instance(instance: PacingInstance, focal: int, beta: float, nu: float
                      ) -> PacingInstance:
    v = instance.values.copy()
    v[focal] *= nu
    b = instance.budgets.copy()
    b[focal] *= beta
    return PacingInstance(v, b)


@dataclass(frozen=True)
class _Cell:
    label: str
    instance: PacingInstance
    focal: int
    beta: float
    nu: float
    time_limit: float


def _run_cell(c: _Cell) -> dict:
    rep = reported_instance(c.instance, c.focal, c.beta, c.nu)
    res = solve_instance(rep, "max_paced_welfare", SolverConfig(time_limit=c.time_limit))
    row = {"instance": c.label, "instance_hash": instance_hash(c.instance), "n": c.instance.n,
           "focal": c.focal, "beta": c.beta, "nu": c.nu, "status": res.status}
    if res.status == "optimal":
        o = res.outcome
        # utility measured with the true values, spend from the reported outcome
        row["utility"] = float(o.fractions[c.focal] @ c.instance.values[c.focal]
                               - o.spends[c.focal].sum())
    else:
        row["utility"] = np.nan
    return row


def run_misreport_study(instances: list[tuple[str, PacingInstance]],
                        grid: MisreportGrid = MisreportGrid(), focal: int | dict = 0,
                        time_limit: float = 300.0, workers: int | None = None
                        ) -> ExperimentReport:
    """Solve every (beta, nu) cell; ``focal`` is an index or a label -> index map."""
    cells = []
    for label, inst in instances:
        f = focal.get(label, 0) if isinstance(focal, dict) else focal
        cells += [_Cell(label, inst, f, b, nu, time_limit) for b, nu in grid.cells()]
    if not any(b == 1.0 and nu == 1.0 for b, nu in grid.cells()):
        raise ValueError("grid must contain the truthful cell (1, 1)")
    rows = pmap(_run_cell, cells, workers)
    per_inst = _per_instance(rows)
    return ExperimentReport("misreport", rows, per_inst + _by_n(per_inst),
                            {"betas": list(grid.betas), "nus": list(grid.nus),
                             "time_limit": time_limit})


def _per_instance(rows):
    groups = defaultdict(list)
    for r in rows:
        groups[r["instance"]].append(r)
    out = []
    for label, rs in groups.items():
        truth = next(r for r in rs if r["beta"] == 1.0 and r["nu"] == 1.0)
        solved = [r for r in rs if r["status"] == "optimal"]
        best = max(solved, key=lambda r: r["utility"]) if solved else None
        base = truth["utility"]
        gain = (best["utility"] - base) if best is not None and not np.isnan(base) else np.nan
        out.append({"level": "instance", "instance": label, "n": truth["n"],
                    "truthful_utility": base,
                    "best_utility": best["utility"] if best else np.nan,
                    "best_beta": best["beta"] if best else np.nan,
                    "best_nu": best["nu"] if best else np.nan,
                    "utility_gain": gain,
                    "incentive": bool(gain > GAIN_TOL) if not np.isnan(gain) else False,
                    "unsolved_cells": len(rs) - len(solved)})
    return out


def _by_n(per_inst):
    groups = defaultdict(list)
    for r in per_inst:
        groups[r["n"]].append(r)
    out = []
    for n in sorted(groups):
        rs = groups[n]
        gains = [r["utility_gain"] for r in rs if not np.isnan(r["utility_gain"])]
        out.append({"level": "n", "n": n, "instances": len(rs),
                    "incentive_pct": 100.0 * sum(r["incentive"] for r in rs) / len(rs),
                    "max_utility_gain": max(gains) if gains else np.nan,
                    "mean_utility_gain": float(np.mean(gains)) if gains else np.nan})
    return out
