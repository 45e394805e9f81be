"""Competitive equilibrium with budgets and its relation to pacing equilibria."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .equilibrium import verify_equilibrium
from .types import (DEFAULT_TOL, CompetitiveOutcome, PacingInstance, PacingOutcome,
                    Tolerance, Verdict, Violation, check_dims)


def pe_to_ce(instance: PacingInstance, outcome: PacingOutcome,
             tol: Tolerance = DEFAULT_TOL) -> CompetitiveOutcome:
    """Price each good at its second-highest paced bid and keep the allocation."""
    verdict = verify_equilibrium(instance, outcome, tol)
    if not verdict.accepted:
        raise ValueError("outcome is not a pacing equilibrium: %s"
                         % [v.code for v in verdict.violations])
    bids = outcome.bids(instance)
    if instance.n == 1:
        second = np.zeros(instance.m)
    else:
        second = np.sort(bids, axis=0)[-2]
    return CompetitiveOutcome(second, np.clip(outcome.fractions, 0.0, 1.0))


def verify_competitive(instance: PacingInstance, ce: CompetitiveOutcome,
                       tol: Tolerance = DEFAULT_TOL) -> Verdict:
    """Budget feasibility, market clearing and bang-per-buck demand optimality."""
    p, x = ce.prices, ce.fractions
    check_dims(instance, fractions=x, prices=p)
    ef = tol.eps_feas
    v, B = instance.values, instance.budgets
    out: list[Violation] = []
    if np.any(p < -ef):
        out.append(Violation("negative_price", "range"))
    for i, j in zip(*np.nonzero((x < -ef) | (x > 1 + ef))):
        out.append(Violation("fraction_out_of_range", "range", int(i), int(j)))

    col = x.sum(axis=0)
    for j in range(instance.m):
        if col[j] > 1 + ef:
            out.append(Violation("overallocated", "clearing", None, j))
        elif p[j] > ef and col[j] < 1 - ef:
            out.append(Violation("unsold_priced_good", "clearing", None, j,
                                 f"price={p[j]:.9g} sold={col[j]:.9g}"))
        elif p[j] <= ef and (v[:, j] > 0).any():
            taken = x[v[:, j] > 0, j].sum()
            if taken < 1 - ef:
                out.append(Violation("free_good_not_taken", "clearing", None, j))

    priced = p > ef
    for i in range(instance.n):
        spend = float((x[i] * p).sum())
        if spend > B[i] + ef:
            out.append(Violation("over_budget", "budget", i, None, f"spend={spend:.9g}"))
            continue
        vi = v[i]
        bought = priced & (x[i] > ef)
        for j in np.flatnonzero(bought & (vi < p - ef)):
            out.append(Violation("bought_above_value", "demand", i, int(j)))
        exhausted = spend >= B[i] - ef
        bpb = np.where(priced, vi / np.where(priced, p, 1.0), 0.0)
        if exhausted:
            if bought.any():
                floor = bpb[bought].min()
                short = priced & (bpb > floor * (1 + 1e-9) + ef) & (x[i] < 1 - ef)
            else:
                short = np.zeros(instance.m, dtype=bool)
        else:
            short = priced & (vi > p + ef) & (x[i] < 1 - ef)
        for j in np.flatnonzero(short):
            out.append(Violation("demand_not_met", "demand", i, int(j),
                                 f"bang-per-buck {bpb[j]:.6g} not fully bought"))
    return Verdict.from_violations(out)


def ce_to_pacing(instance: PacingInstance, ce: CompetitiveOutcome,
                 tol: Tolerance = DEFAULT_TOL) -> tuple[PacingInstance, PacingOutcome, list[str]]:
    """Embed a competitive equilibrium as a pacing equilibrium.

    A price-setting bidder with unlimited budget and values equal to the prices
    is appended.  Budget-exhausting bidders are paced so that their bid on the
    lowest bang-per-buck good they buy equals its price.

    Returns the augmented instance, the outcome and a list of notes.
    """
    verdict = verify_competitive(instance, ce, tol)
    if not verdict.accepted:
        raise ValueError("not a competitive equilibrium: %s" % [v.code for v in verdict.violations])
    p, x = ce.prices, ce.fractions
    v, B = instance.values, instance.budgets
    notes: list[str] = []
    alphas = np.ones(instance.n)
    priced = p > tol.eps_feas
    for i in range(instance.n):
        spend = float((x[i] * p).sum())
        if not (np.isfinite(B[i]) and spend >= B[i] - tol.eps_feas):
            continue
        bought = priced & (x[i] > tol.eps_feas) & (v[i] > 0)
        if not bought.any():
            notes.append(f"bidder {i} exhausts its budget but buys no priced good; alpha set to 1")
            continue
        ratios = p[bought] / v[i][bought]
        alphas[i] = min(1.0, float(ratios.max()))
    values = np.vstack([v, p[None, :]])
    budgets = np.concatenate([B, [np.inf]])
    aug = PacingInstance(values, budgets)
    outcome = PacingOutcome(np.concatenate([alphas, [1.0]]),
                            np.vstack([x, np.zeros((1, instance.m))]), p.copy())
    return aug, outcome, notes


@dataclass(frozen=True)
class ParetoVerdict:
    dominated: bool
    fractions: np.ndarray | None = None
    payments: np.ndarray | None = None
    gain: float = 0.0

    @property
    def label(self) -> str:
        return "counterexample" if self.dominated else "no-dominating-found"


def _best_payments(values, budgets, x_old, pay_old, x_new):
    """Largest seller revenue keeping every bidder weakly better off."""
    cap = pay_old + ((x_new - x_old) * values).sum(axis=1)
    return np.minimum(cap, budgets)


def pareto_probe(instance: PacingInstance, outcome: PacingOutcome, trials: int = 1000,
                 seed: int = 0, radius: float = 0.1, tol: float = 1e-9) -> ParetoVerdict:
    """Randomised search for a Pareto-dominating allocation with transfers.

    Each trial perturbs the allocation (a single-good shift between two bidders
    or a dense perturbation, projected back to feasibility); payments are then
    chosen optimally, so the probe only has to find the right allocation.
    """
    rng = np.random.default_rng(seed)
    v = instance.values
    B = instance.budgets
    x0 = np.clip(outcome.fractions, 0.0, 1.0)
    pay0 = outcome.spends.sum(axis=1)
    seller0 = pay0.sum()
    scale = max(1.0, float(v.max()))
    n, m = x0.shape
    for t in range(trials):
        x = x0.copy()
        if t % 2 == 0 and n > 1:
            j = rng.integers(m)
            a, b = rng.choice(n, size=2, replace=False)
            delta = min(rng.uniform(0, radius), x[a, j])
            x[a, j] -= delta
            x[b, j] += delta
        else:
            x = x + rng.uniform(-radius, radius, size=x.shape)
        x = np.clip(x, 0.0, 1.0)
        col = x.sum(axis=0)
        over = col > 1
        x[:, over] /= col[over]
        pay = _best_payments(v, B, x0, pay0, x)
        gain = float(pay.sum() - seller0)
        if gain > tol * scale:
            return ParetoVerdict(True, x, pay, gain)
    return ParetoVerdict(False)
