"""Hand-built example markets with their known equilibria."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..market import CompetitiveOutcome, PacingInstance, PacingOutcome

INF = np.inf


@dataclass(frozen=True)
class Fixture:
    name: str
    instance: PacingInstance
    equilibria: tuple[PacingOutcome, ...] = ()
    competitive: CompetitiveOutcome | None = None
    note: str = ""
    extra: dict = field(default_factory=dict)


def _revenue_gap() -> Fixture:
    v = np.array([[100, 1, 99, 100],
                  [1, 100, 99, 0],
                  [0, 0, 0, 100]], dtype=float)
    inst = PacingInstance(v, [1, 1, 100])
    high = PacingOutcome([1, 0.01, 1],
                         [[1, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]],
                         [0.01, 1, 0.99, 100])
    low = PacingOutcome([0.01, 1, 1],
                        [[1, 0, 0, 0], [0, 1, 1, 0], [0, 0, 0, 1]],
                        [1, 0.01, 0.99, 1])
    return Fixture("revenue_gap", inst, (high, low), note="revenues 102 and 3")


def _welfare_gap() -> Fixture:
    v = np.array([[100, 2, 99, 0.01],
                  [1, 200, 99, 1],
                  [0, 0, 0, 10000]], dtype=float)
    inst = PacingInstance(v, [1, 2, 0.01])
    high = PacingOutcome([1, 0.01, 1],
                         [[1, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]],
                         [0.01, 2, 0.99, 0.01])
    low = PacingOutcome([0.01, 1, 0.0001],
                        [[1, 0, 0, 0], [0, 1, 1, 0.99], [0, 0, 0, 0.01]],
                        [1, 0.02, 0.99, 1])
    return Fixture("welfare_gap", inst, (high, low), note="social welfare 10399 and 499.99")


def _paced_welfare_gap() -> Fixture:
    v = np.array([[100, 1, 99, 10000],
                  [1, 100, 99, 0]], dtype=float)
    inst = PacingInstance(v, [1, 1])
    high = PacingOutcome([1, 0.01],
                         [[1, 0, 1, 1], [0, 1, 0, 0]],
                         [0.01, 1, 0.99, 0])
    low = PacingOutcome([0.01, 1],
                        [[1, 0, 0, 1], [0, 1, 1, 0]],
                        [1, 0.01, 0.99, 0])
    return Fixture("paced_welfare_gap", inst, (high, low), note="paced welfare 10200 and 300")


def _misreport() -> Fixture:
    inst = PacingInstance([[100, 100], [0.98, 101]], [0.99, INF])
    truthful = PacingOutcome([1, 1], [[1, 0], [0, 1]], [0.98, 100])
    lie = PacingInstance([[100, 100], [1, 101]], [0.99, INF])
    return Fixture("misreport", inst, (truthful,), note="bidder 2 gains by reporting 1 on item 1",
                   extra={"misreported": lie, "focal": 1})


def _ce_lower_rev() -> Fixture:
    v = np.array([[101, 0, 0],
                  [100, 200, 10],
                  [0, 0, 1]], dtype=float)
    inst = PacingInstance(v, [INF, 10.1, INF])
    pe = PacingOutcome([1, 1, 1], [[1, 0, 0], [0, 1, 1], [0, 0, 0]], [100, 0, 1])
    ce = CompetitiveOutcome([11, 10, 1], [[1, 0, 0], [0, 1, 0.1], [0, 0, 0.9]])
    return Fixture("ce_lower_rev", inst, (pe,), ce, note="competitive revenue 22")


def _cycling() -> Fixture:
    v = np.array([[100, 1300, 123, 0, 11, 0],
                  [0, 6503, 300.6, 501, 0, 25],
                  [50, 0, 0, 500, 10, 5]], dtype=float)
    return Fixture("cycling", PacingInstance(v, [60, 1300, INF]),
                   note="best-response-high dynamics cycle from all ones")


def _single_bidder() -> Fixture:
    inst = PacingInstance([[1.0]], [1.0])
    return Fixture("single_bidder", inst, (PacingOutcome([1.0], [[1.0]], [0.0]),))


def _tie_overspend() -> Fixture:
    inst = PacingInstance([[1, 0.5], [0.5, 0.125]], [0.5, INF])
    eq = PacingOutcome([0.5, 1], [[0.75, 1], [0.25, 0]], [0.5, 0.125])
    return Fixture("tie_overspend", inst, (eq,), note="tie must be split to respect the budget")


def _budget_perturbation(budget: float) -> Fixture:
    inst = PacingInstance([[100.0], [1.0]], [budget, INF])
    if budget >= 1:
        eq = PacingOutcome([1, 1], [[1], [0]], [1.0])
    else:
        eq = PacingOutcome([0.01, 1], [[budget], [1 - budget]], [1.0])
    return Fixture(f"budget_{budget:g}", inst, (eq,))


def fixtures() -> dict[str, Fixture]:
    items = [_revenue_gap(), _welfare_gap(), _paced_welfare_gap(), _misreport(),
             _ce_lower_rev(), _cycling(), _single_bidder(), _tie_overspend(),
             _budget_perturbation(1.01), _budget_perturbation(0.99)]
    return {f.name: f for f in items}
