"""Translation between MIP assignments and pacing outcomes."""
from __future__ import annotations

import numpy as np

from ..market import DEFAULT_TOL, PacingInstance, PacingOutcome, Tolerance, verify_equilibrium
from .model import MilpModel, build_model, pad_instance


class ResidualError(ValueError):
    pass


def decode(model: MilpModel, raw, feas_tol: float = 1e-6, check: bool = True) -> PacingOutcome:
    """Recover multipliers, fractions and prices from a MIP assignment.

    Fractions are spends divided by the price.  A good whose price is (near)
    zero goes entirely to its designated winner when that bidder values it,
    otherwise to the lowest-index bidder that does.  The padding bidder, if
    any, is stripped.
    """
    x = np.asarray(raw, dtype=float)
    if check:
        worst = model.residuals(x).max(initial=0.0)
        if worst > feas_tol * max(1.0, float(np.abs(model.budgets).max())):
            raise ResidualError(f"constraint residual {worst:.3g} above tolerance")
    L = model.layout
    inst = model.instance
    n, m = L.n, L.m
    v = inst.values
    alpha = np.clip(x[L.block("alpha")], 0.0, 1.0)
    s = np.clip(x[L.block("s")].reshape(n, m), 0.0, None)
    d = x[L.block("d")].reshape(n, m) > 0.5
    w = x[L.block("w")].reshape(n, m)
    p = np.clip(x[L.block("p")], 0.0, None)
    s = np.where(d, s, 0.0)

    frac = np.zeros((n, m))
    for j in range(m):
        col = s[:, j].sum()
        if p[j] > feas_tol and col > 0:
            frac[:, j] = s[:, j] / col
        else:
            p[j] = 0.0
            winner = int(np.argmax(w[:, j]))
            if v[winner, j] > 0:
                frac[winner, j] = 1.0
            elif (v[:, j] > 0).any():
                frac[int(np.argmax(v[:, j] > 0)), j] = 1.0
    k = model.original_n
    return PacingOutcome(alpha[:k], frac[:k], p)


def encode_outcome(instance: PacingInstance, outcome: PacingOutcome, objective="feasibility",
                   tol: Tolerance = DEFAULT_TOL, model: MilpModel | None = None,
                   check: bool = True) -> np.ndarray:
    """Feasible MIP assignment for a verified pacing equilibrium.

    The winner is a top bidder that receives a positive fraction (lowest index),
    the runner-up is the highest other bidder (lowest index among ties).
    """
    if check:
        verdict = verify_equilibrium(instance, outcome, tol)
        if not verdict.accepted:
            raise ValueError("outcome is not a verified equilibrium: %s"
                             % [v.code for v in verdict.violations])
    if model is None:
        model = build_model(instance, objective)
    L = model.layout
    inst = pad_instance(instance)
    n, m = inst.n, inst.m
    k = instance.n
    alpha = np.ones(n)
    alpha[:k] = np.clip(outcome.alphas, 0.0, 1.0)
    frac = np.zeros((n, m))
    frac[:k] = np.clip(outcome.fractions, 0.0, 1.0)
    p = np.asarray(outcome.prices, dtype=float).copy()
    v = inst.values
    B = model.budgets
    bids = alpha[:, None] * v
    top = bids.max(axis=0)

    x = np.zeros(L.size)
    x[L.block("alpha")] = alpha
    x[L.block("h")] = top
    spend = frac * p[None, :]
    for j in range(m):
        holders = np.flatnonzero(frac[:, j] > tol.eps_feas)
        if holders.size == 0:
            p[j] = np.sort(bids[:, j])[-2] if n > 1 else 0.0
            spend[:, j] = 0.0
            winner = int(np.argmax(bids[:, j]))
        else:
            winner = int(holders[np.argmax(bids[holders, j])])
            # spends of one good must add up to its price exactly
            spend[:, j] = np.where(frac[:, j] > tol.eps_feas, spend[:, j], 0.0)
            total = spend[:, j].sum()
            if total > 0:
                spend[:, j] *= p[j] / total
        rest = np.delete(np.arange(n), winner)
        runner = int(rest[np.argmax(bids[rest, j])])
        x[L.w(winner, j)] = 1.0
        x[L.r(runner, j)] = 1.0
        for i in range(n):
            if spend[i, j] > 0 or i == winner:
                x[L.d(i, j)] = 1.0
    x[L.block("p")] = p
    x[L.block("s")] = spend.ravel()
    total_spend = spend.sum(axis=1)
    # y marks budget-exhausting paced bidders; an exhausted bidder at alpha = 1 keeps y = 0
    finite = np.isfinite(inst.budgets)
    y = finite & (total_spend >= B - tol.eps_feas) & (alpha < 1 - 1e-12)
    x[L.block("y")] = y.astype(float)
    return x
