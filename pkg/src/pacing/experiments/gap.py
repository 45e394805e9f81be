"""Gaps between the best and worst equilibria of each instance."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..market import PacingInstance, objectives
from ..market.io import instance_hash
from ..mip import Objective, SolverConfig, solve_instance
from .parallel import pmap
from .report import ExperimentReport

GAP_TOL = 1e-6
PAIRS = {"revenue": (Objective.MIN_REVENUE, Objective.MAX_REVENUE),
         "paced_welfare": (Objective.MIN_PACED_WELFARE, Objective.MAX_PACED_WELFARE)}
SOLVE_ORDER = (Objective.FEASIBILITY, Objective.RELAXED_FEASIBILITY, Objective.MAX_REVENUE,
               Objective.MIN_REVENUE, Objective.MAX_PACED_WELFARE, Objective.MIN_PACED_WELFARE)


@dataclass(frozen=True)
class _Job:
    label: str
    instance: PacingInstance
    time_limit: float


def _solve_all(job: _Job) -> dict:
    cfg = SolverConfig(time_limit=job.time_limit)
    out = {"instance": job.label, "instance_hash": instance_hash(job.instance),
           "n": job.instance.n, "m": job.instance.m}
    welfare = []
    for obj in SOLVE_ORDER:
        res = solve_instance(job.instance, obj, cfg)
        out[f"{obj.value}_status"] = res.status
        if res.outcome is not None and "relaxed_slack_positive" not in res.flags:
            vals = objectives(job.instance, res.outcome)
            out[f"{obj.value}_revenue"] = vals.revenue
            out[f"{obj.value}_paced_welfare"] = vals.paced_welfare
            out[f"{obj.value}_welfare"] = vals.social_welfare
            welfare.append(vals.social_welfare)
        else:
            for k in ("revenue", "paced_welfare", "welfare"):
                out[f"{obj.value}_{k}"] = np.nan
    # welfare is not an objective; its gap over the solutions found is a lower bound
    out["welfare_solutions"] = len(welfare)
    out["welfare_max"] = max(welfare) if welfare else np.nan
    out["welfare_min"] = min(welfare) if welfare else np.nan
    return out


def gap_pct(lo: float, hi: float) -> float:
    if hi <= 0:
        return 0.0
    return 100.0 * (hi - lo) / hi


def _summarise(details: list[dict]) -> list[dict]:
    rows = []
    total = len(details)
    for name, (mn, mx) in PAIRS.items():
        gaps = []
        for d in details:
            if d[f"{mn.value}_status"] == "optimal" and d[f"{mx.value}_status"] == "optimal":
                gaps.append(gap_pct(d[f"{mn.value}_{name}"], d[f"{mx.value}_{name}"]))
        rows.append(_row(name, total, gaps))
    # welfare pairs need all four optimisation solves to have finished
    gaps = []
    for d in details:
        if all(d[f"{o.value}_status"] == "optimal" for pair in PAIRS.values() for o in pair):
            gaps.append(gap_pct(d["welfare_min"], d["welfare_max"]))
    rows.append(_row("welfare", total, gaps))
    return rows


def _row(name, total, gaps):
    paired = len(gaps)
    no_gap = sum(g <= 100 * GAP_TOL for g in gaps)
    return {"objective": name, "instances": total, "paired": paired,
            "pairs_pct": 100.0 * paired / total if total else 0.0,
            "no_gap_pct": 100.0 * no_gap / paired if paired else np.nan,
            "max_gap_pct": max(gaps) if gaps else np.nan}


def run_gap_analysis(instances: list[tuple[str, PacingInstance]], time_limit: float = 300.0,
                     workers: int | None = None) -> ExperimentReport:
    jobs = [_Job(label, inst, time_limit) for label, inst in instances]
    details = pmap(_solve_all, jobs, workers)
    return ExperimentReport("gap", details, _summarise(details), {"time_limit": time_limit})
