"""Value types for pacing games.

All containers are frozen dataclasses holding read-only numpy arrays, so they
can be shared freely between worker processes and threads.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

UNLIMITED = math.inf


def _frozen(a: Any, ndim: int, name: str) -> np.ndarray:
    arr = np.array(a, dtype=float)
    if arr.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Tolerance:
    eps_feas: float = 1e-6
    eps_tie: float = 1e-6

    def __post_init__(self):
        if not (self.eps_feas > 0 and self.eps_tie > 0):
            raise ValueError("tolerances must be positive")


DEFAULT_TOL = Tolerance()


@dataclass(frozen=True, eq=False)
class PacingInstance:
    """Bidders, goods, valuations ``values[i, j]`` and budgets (``inf`` = unlimited)."""

    values: np.ndarray
    budgets: np.ndarray

    def __post_init__(self):
        v = _frozen(self.values, 2, "values")
        b = _frozen(self.budgets, 1, "budgets")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "budgets", b)
        if v.shape[0] != b.shape[0]:
            raise ValueError("values has %d rows but %d budgets given" % (v.shape[0], b.shape[0]))
        if v.shape[0] < 1 or v.shape[1] < 1:
            raise ValueError("instance needs at least one bidder and one good")
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise ValueError("values must be finite and non-negative")
        if np.any(np.isnan(b)) or np.any(b <= 0):
            raise ValueError("budgets must be positive or unlimited")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def m(self) -> int:
        return self.values.shape[1]

    @property
    def unlimited(self) -> np.ndarray:
        return np.isinf(self.budgets)

    def with_budgets(self, budgets) -> "PacingInstance":
        return PacingInstance(self.values, budgets)

    def with_values(self, values) -> "PacingInstance":
        return PacingInstance(values, self.budgets)

    def __eq__(self, other):
        if not isinstance(other, PacingInstance):
            return NotImplemented
        return (self.values.shape == other.values.shape
                and np.array_equal(self.values, other.values)
                and np.array_equal(self.budgets, other.budgets))

    def __hash__(self):
        return hash((self.values.tobytes(), self.budgets.tobytes()))


@dataclass(frozen=True, eq=False)
class PacingOutcome:
    """Multipliers, fractional allocation and prices; spends are derived."""

    alphas: np.ndarray
    fractions: np.ndarray
    prices: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "alphas", _frozen(self.alphas, 1, "alphas"))
        object.__setattr__(self, "fractions", _frozen(self.fractions, 2, "fractions"))
        object.__setattr__(self, "prices", _frozen(self.prices, 1, "prices"))
        if self.fractions.shape != (self.alphas.shape[0], self.prices.shape[0]):
            raise ValueError(
                f"fractions shape {self.fractions.shape} does not match "
                f"{self.alphas.shape[0]} alphas and {self.prices.shape[0]} prices"
            )

    @property
    def spends(self) -> np.ndarray:
        return self.fractions * self.prices[None, :]

    def bids(self, instance: PacingInstance) -> np.ndarray:
        return self.alphas[:, None] * instance.values


@dataclass(frozen=True)
class ObjectiveValues:
    revenue: float
    social_welfare: float
    paced_welfare: float


@dataclass(frozen=True, eq=False)
class CompetitiveOutcome:
    prices: np.ndarray
    fractions: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "prices", _frozen(self.prices, 1, "prices"))
        object.__setattr__(self, "fractions", _frozen(self.fractions, 2, "fractions"))
        if self.fractions.shape[1] != self.prices.shape[0]:
            raise ValueError("fractions and prices disagree on the number of goods")


@dataclass(frozen=True)
class SmoothedGameParams:
    epsilon: float
    penalty: float
    value_bound: float

    def __post_init__(self):
        if self.epsilon <= 0 or self.value_bound <= 0:
            raise ValueError("epsilon and value_bound must be positive")
        if not self.penalty > self.value_bound / self.epsilon:
            raise ValueError("penalty must exceed value_bound / epsilon")

    @classmethod
    def for_instance(cls, instance: PacingInstance, epsilon: float) -> "SmoothedGameParams":
        """Smallest sensible parameters: M = largest row value plus artificial good."""
        bound = float(instance.values.sum(axis=1).max()) + 2 * epsilon
        return cls(epsilon, 2.0 * bound / epsilon + 1.0, bound)


@dataclass(frozen=True)
class Violation:
    code: str
    condition: str
    bidder: int | None = None
    good: int | None = None
    detail: str = ""

    def to_dict(self) -> dict:
        return {"code": self.code, "condition": self.condition, "bidder": self.bidder,
                "good": self.good, "detail": self.detail}


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    violations: tuple[Violation, ...] = field(default_factory=tuple)
    notes: tuple[str, ...] = field(default_factory=tuple)

    def __bool__(self):
        return self.accepted

    @classmethod
    def from_violations(cls, violations, notes=()) -> "Verdict":
        return cls(not violations, tuple(violations), tuple(notes))

    def conditions(self) -> set[str]:
        return {v.condition for v in self.violations}

    def to_dict(self) -> dict:
        return {"accepted": self.accepted,
                "violations": [v.to_dict() for v in self.violations],
                "notes": list(self.notes)}


def check_dims(instance: PacingInstance, alphas=None, fractions=None, prices=None):
    n, m = instance.n, instance.m
    if alphas is not None and np.shape(alphas) != (n,):
        raise ValueError(f"expected {n} alphas, got shape {np.shape(alphas)}")
    if fractions is not None and np.shape(fractions) != (n, m):
        raise ValueError(f"expected fractions of shape {(n, m)}, got {np.shape(fractions)}")
    if prices is not None and np.shape(prices) != (m,):
        raise ValueError(f"expected {m} prices, got shape {np.shape(prices)}")
