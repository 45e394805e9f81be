"""Driver for the warm-start study over several base instances."""
from __future__ import annotations

from dataclasses import dataclass

from ..dynamics.warm_start import WarmStartGrid, best_per_init, warm_start_study
from ..instances.scaling import ScaleConfig
from ..market import PacingInstance
from ..market.io import instance_hash
from .parallel import pmap
from .report import ExperimentReport


@dataclass(frozen=True)
class _Job:
    label: str
    instance: PacingInstance
    scales: tuple
    grid: WarmStartGrid


def _run(job: _Job) -> list[dict]:
    rows = warm_start_study(job.instance, list(job.scales), job.grid, job.label)
    h = instance_hash(job.instance)
    for r in rows:
        r["instance_hash"] = h
    return rows


def run_warm_start(instances: list[tuple[str, PacingInstance]], factor: int = 500,
                   sigmas: tuple = (0.0, 0.1), grid: WarmStartGrid = WarmStartGrid(),
                   workers: int | None = None) -> ExperimentReport:
    jobs = [_Job(label, inst, tuple(ScaleConfig(factor, s, k) for s in sigmas), grid)
            for k, (label, inst) in enumerate(instances)]
    rows = [r for part in pmap(_run, jobs, workers) for r in part]
    best = best_per_init(rows)
    summary = [{"init": k, **v} for k, v in best.items()]
    return ExperimentReport("warm_start", rows, summary,
                            {"factor": factor, "sigmas": list(sigmas),
                             "epsilons": list(grid.epsilons), "alpha_mins": list(grid.alpha_mins),
                             "inits": [str(i) for i in grid.inits]})
