"""Binary-choice gadget and the 3SAT reduction for revenue maximisation."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from ..market import PacingInstance


@dataclass(frozen=True)
class GadgetParams:
    k1: float = 4.0
    alpha: float = 0.25
    delta: float = 0.0
    epsilon: float | None = None

    def __post_init__(self):
        if self.k1 <= 0:
            raise ValueError("k1 must be positive")
        if not 0 < self.alpha < 1 or self.delta < 0:
            raise ValueError("need 0 < alpha < 1 and delta >= 0")
        if self.alpha + self.delta >= 1:
            raise ValueError("alpha + delta must be below 1")
        if self.epsilon is not None and self.epsilon <= 0:
            raise ValueError("epsilon must be positive")

    @property
    def eps(self) -> float:
        return 1e-3 * self.k1 if self.epsilon is None else self.epsilon

    @property
    def k2(self) -> float:
        return (1 - self.alpha - self.delta) / (2 * self.alpha) * self.k1


def gadget_values(params: GadgetParams) -> np.ndarray:
    k1, k2, a, e = params.k1, params.k2, params.alpha, params.eps
    return np.array([[k2, k2, k1 / a + e, k1],
                     [k2, k2, k1, k1 / a + e]])


def gen_gadget(params: GadgetParams) -> PacingInstance:
    return PacingInstance(gadget_values(params), [params.k1, params.k1])


Clause = tuple[int, int, int]


def _check_formula(clauses) -> tuple[list[Clause], int]:
    out = []
    for c in clauses:
        c = tuple(int(l) for l in c)
        if len(c) != 3 or any(l == 0 for l in c):
            raise ValueError(f"malformed clause {c}: need three non-zero literals")
        out.append(c)
    if not out:
        raise ValueError("formula has no clauses")
    nvars = max(abs(l) for c in out for l in c)
    return out, nvars


def gen_3sat_revenue(clauses, n_vars: int | None = None) -> tuple[PacingInstance, float]:
    """Market whose maximum revenue reaches the threshold iff the formula is satisfiable.

    Literals are non-zero integers (DIMACS style).  Each variable gets a gadget
    (bidders ``2k`` and ``2k+1`` for the positive and negative literal, goods
    ``4k..4k+3``); clause goods follow, and a final unlimited-budget bidder
    values every clause good at 2.

    The threshold is the number of clauses plus the total budget of the
    gadget bidders: in a satisfying profile both bidders of every gadget
    exhaust their budgets and each clause good sells at price 1.
    """
    clauses, nv = _check_formula(clauses)
    nv = max(nv, n_vars or 0)
    gp = GadgetParams(k1=4.0, alpha=0.25, delta=0.0)
    g = gadget_values(gp)
    nc = len(clauses)
    n, m = 2 * nv + 1, 4 * nv + nc
    v = np.zeros((n, m))
    for k in range(nv):
        v[2 * k:2 * k + 2, 4 * k:4 * k + 4] = g
    for c, clause in enumerate(clauses):
        col = 4 * nv + c
        for lit in clause:
            row = 2 * (abs(lit) - 1) + (0 if lit > 0 else 1)
            v[row, col] = 1.0
        v[-1, col] = 2.0
    budgets = [gp.k1] * (2 * nv) + [np.inf]
    return PacingInstance(v, budgets), float(nc + 2 * gp.k1 * nv)


def brute_force_sat(clauses, n_vars: int | None = None) -> bool:
    clauses, nv = _check_formula(clauses)
    nv = max(nv, n_vars or 0)
    for bits in itertools.product((False, True), repeat=nv):
        if all(any(bits[abs(l) - 1] == (l > 0) for l in c) for c in clauses):
            return True
    return False


def random_3cnf(rng: np.random.Generator, max_vars: int = 4, max_clauses: int = 6) -> list[Clause]:
    nv = int(rng.integers(1, max_vars + 1))
    nc = int(rng.integers(1, max_clauses + 1))
    lits = rng.integers(1, nv + 1, size=(nc, 3)) * rng.choice([-1, 1], size=(nc, 3))
    return [tuple(int(l) for l in row) for row in lits]


def parse_dimacs(text: str) -> tuple[list[Clause], int]:
    """Parse a DIMACS CNF string whose clauses have exactly three literals."""
    n_vars = 0
    lits: list[int] = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) < 4 or parts[1] != "cnf":
                raise ValueError(f"bad problem line: {line!r}")
            n_vars = int(parts[2])
            continue
        lits.extend(int(t) for t in line.split())
    clauses, cur = [], []
    for l in lits:
        if l == 0:
            clauses.append(tuple(cur))
            cur = []
        else:
            cur.append(l)
    if cur:
        clauses.append(tuple(cur))
    clauses, nv = _check_formula(clauses)
    return clauses, max(n_vars, nv)
