"""Mixed-integer encoding of pacing equilibria.

Variables (per bidder i and good j):

* ``alpha_i`` in [0, 1]   pacing multiplier
* ``s_ij`` >= 0           spend of i on j
* ``p_j`` >= 0            price of j
* ``h_j`` >= 0            highest paced bid on j
* ``z_i`` in [0, 1]       complementarity slack (relaxed feasibility only)
* ``d_ij``                i may win part of j
* ``y_i``                 i exhausts its budget
* ``w_ij``                i is the designated winner of j
* ``r_ij``                i is the designated runner-up (price setter) of j

Constraint families are numbered 1..13 in the order they are emitted; the
row tag ``family`` records the number for diagnostics.  ``strengthen``
appends valid inequalities (14: ``p_j <= h_j``,
15: ``s_ij <= alpha_i v_ij``, 16: ``s_ij <= p_j``, 17: ``h_j <= sum_i v_ij d_ij``,
18: ``p_j <= sum_i v_ij r_ij``, 19: ``s_ij <= min(B_i, v_ij, max_k!=i v_kj) d_ij``) and ``d_ij``/``w_ij`` are
fixed to 0 when ``v_ij = 0`` but some other bidder values good j.  None of
these cut off an encoded equilibrium; they only tighten the relaxation.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np
from scipy import sparse

from ..market import PacingInstance


class Objective(str, Enum):
    FEASIBILITY = "feasibility"
    RELAXED_FEASIBILITY = "relaxed_feasibility"
    MAX_REVENUE = "max_revenue"
    MIN_REVENUE = "min_revenue"
    MAX_PACED_WELFARE = "max_paced_welfare"
    MIN_PACED_WELFARE = "min_paced_welfare"

    @property
    def maximize(self) -> bool:
        return self.value.startswith("max")


ALL_OBJECTIVES = tuple(Objective)
BINARY_FAMILIES = ("w", "r", "d", "y")  # branching priority order


@dataclass(frozen=True)
class Layout:
    n: int
    m: int
    relaxed: bool

    def __post_init__(self):
        n, m = self.n, self.m
        off = {}
        pos = 0
        for name, size in (("alpha", n), ("s", n * m), ("p", m), ("h", m),
                           ("z", n if self.relaxed else 0),
                           ("d", n * m), ("y", n), ("w", n * m), ("r", n * m)):
            off[name] = (pos, size)
            pos += size
        object.__setattr__(self, "_off", off)
        object.__setattr__(self, "size", pos)

    def block(self, name: str) -> slice:
        start, size = self._off[name]
        return slice(start, start + size)

    def alpha(self, i): return self._off["alpha"][0] + i
    def s(self, i, j): return self._off["s"][0] + i * self.m + j
    def p(self, j): return self._off["p"][0] + j
    def h(self, j): return self._off["h"][0] + j
    def z(self, i): return self._off["z"][0] + i
    def d(self, i, j): return self._off["d"][0] + i * self.m + j
    def y(self, i): return self._off["y"][0] + i
    def w(self, i, j): return self._off["w"][0] + i * self.m + j
    def r(self, i, j): return self._off["r"][0] + i * self.m + j

    def binary_indices(self) -> np.ndarray:
        """Binary columns in branching priority order (w, r, d, y)."""
        return np.concatenate([np.arange(*self._range(f)) for f in BINARY_FAMILIES])

    def _range(self, name):
        start, size = self._off[name]
        return start, start + size

    def names(self) -> list[str]:
        out = [""] * self.size
        n, m = self.n, self.m
        for i in range(n):
            out[self.alpha(i)] = f"alpha_{i}"
            out[self.y(i)] = f"y_{i}"
            if self.relaxed:
                out[self.z(i)] = f"z_{i}"
            for j in range(m):
                for fam in ("s", "d", "w", "r"):
                    out[getattr(self, fam)(i, j)] = f"{fam}_{i}_{j}"
        for j in range(m):
            out[self.p(j)] = f"p_{j}"
            out[self.h(j)] = f"h_{j}"
        return out


@dataclass(eq=False)
class MilpModel:
    instance: PacingInstance        # the instance actually encoded (padded if needed)
    original_n: int
    objective: Objective
    layout: Layout
    A: sparse.csr_matrix
    row_lo: np.ndarray
    row_hi: np.ndarray
    family: np.ndarray
    col_lo: np.ndarray
    col_hi: np.ndarray
    c: np.ndarray                   # minimisation costs
    budgets: np.ndarray             # finite budgets used in big-M terms
    vbar: np.ndarray
    integrality: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.integrality is None:
            integ = np.zeros(self.layout.size, dtype=bool)
            integ[self.layout.binary_indices()] = True
            self.integrality = integ

    @property
    def sense(self) -> int:
        return -1 if self.objective.maximize else 1

    def objective_value(self, x: np.ndarray) -> float:
        """Objective in its natural sense (revenue, paced welfare, sum of z)."""
        return float(self.sense * self.c @ x)

    def residuals(self, x: np.ndarray) -> np.ndarray:
        """Per-row violation (0 when satisfied)."""
        act = self.A @ x
        return np.maximum(np.maximum(self.row_lo - act, act - self.row_hi), 0.0)

    def bound_violation(self, x: np.ndarray) -> float:
        return float(max(np.max(self.col_lo - x, initial=0.0), np.max(x - self.col_hi, initial=0.0)))

    def integrality_violation(self, x: np.ndarray) -> float:
        xb = x[self.integrality]
        return float(np.max(np.abs(xb - np.round(xb)), initial=0.0))

    def is_feasible(self, x: np.ndarray, tol: float = 1e-6) -> bool:
        return (self.residuals(x).max(initial=0.0) <= tol and self.bound_violation(x) <= tol
                and self.integrality_violation(x) <= tol)

    def with_alpha_bounds(self, lower=None, upper=None) -> "MilpModel":
        """Copy of the model with tightened multiplier bounds."""
        col_lo, col_hi = self.col_lo.copy(), self.col_hi.copy()
        sl = self.layout.block("alpha")
        if lower is not None:
            col_lo[sl][: self.original_n] = np.maximum(col_lo[sl][: self.original_n], lower)
        if upper is not None:
            col_hi[sl][: self.original_n] = np.minimum(col_hi[sl][: self.original_n], upper)
        return MilpModel(self.instance, self.original_n, self.objective, self.layout, self.A,
                         self.row_lo, self.row_hi, self.family, col_lo, col_hi, self.c,
                         self.budgets, self.vbar, self.integrality)


def pad_instance(instance: PacingInstance) -> PacingInstance:
    """Add a zero-value bidder with unit budget so a runner-up always exists."""
    if instance.n >= 2:
        return instance
    values = np.vstack([instance.values, np.zeros((1, instance.m))])
    return PacingInstance(values, np.concatenate([instance.budgets, [1.0]]))


def model_budgets(instance: PacingInstance) -> np.ndarray:
    vbar = instance.values.max(axis=0)
    safe = float(vbar.sum()) + 1.0
    return np.where(np.isinf(instance.budgets), safe, instance.budgets)


def build_model(instance: PacingInstance, objective: Objective | str) -> MilpModel:
    objective = Objective(objective)
    original_n = instance.n
    inst = pad_instance(instance)
    n, m = inst.n, inst.m
    v = inst.values
    vbar = v.max(axis=0)
    B = model_budgets(inst)
    relaxed = objective is Objective.RELAXED_FEASIBILITY
    L = Layout(n, m, relaxed)

    rows, cols, vals = [], [], []
    lo, hi, fam = [], [], []
    INF = np.inf

    def add(entries, l, u, f):
        r = len(lo)
        for col, val in entries:
            if val != 0:
                rows.append(r)
                cols.append(col)
                vals.append(val)
        lo.append(l)
        hi.append(u)
        fam.append(f)

    for i in range(n):
        add([(L.s(i, j), 1.0) for j in range(m)], -INF, B[i], 1)
    for i in range(n):
        add([(L.s(i, j), 1.0) for j in range(m)] + [(L.y(i), -B[i])], 0.0, INF, 2)
    for i in range(n):
        e = [(L.alpha(i), 1.0), (L.y(i), 1.0)]
        if relaxed:
            e.append((L.z(i), 1.0))
        add(e, 1.0, INF, 3)
    for j in range(m):
        add([(L.s(i, j), 1.0) for i in range(n)] + [(L.p(j), -1.0)], 0.0, 0.0, 4)
    for i in range(n):
        for j in range(m):
            add([(L.s(i, j), 1.0), (L.d(i, j), -B[i])], -INF, 0.0, 5)
    for i in range(n):
        for j in range(m):
            add([(L.h(j), 1.0), (L.alpha(i), -v[i, j])], 0.0, INF, 6)
    for i in range(n):
        for j in range(m):
            add([(L.h(j), 1.0), (L.alpha(i), -v[i, j]), (L.d(i, j), vbar[j])], -INF, vbar[j], 7)
    for i in range(n):
        for j in range(m):
            add([(L.w(i, j), 1.0), (L.d(i, j), -1.0)], -INF, 0.0, 8)
    for i in range(n):
        for j in range(m):
            add([(L.p(j), 1.0), (L.alpha(i), -v[i, j]), (L.w(i, j), v[i, j])], 0.0, INF, 9)
    for i in range(n):
        for j in range(m):
            add([(L.p(j), 1.0), (L.alpha(i), -v[i, j]), (L.r(i, j), vbar[j])], -INF, vbar[j], 10)
    for j in range(m):
        add([(L.w(i, j), 1.0) for i in range(n)], 1.0, 1.0, 11)
    for j in range(m):
        add([(L.r(i, j), 1.0) for i in range(n)], 1.0, 1.0, 12)
    for i in range(n):
        for j in range(m):
            add([(L.r(i, j), 1.0), (L.w(i, j), 1.0)], -INF, 1.0, 13)

    A = sparse.csr_matrix((vals, (rows, cols)), shape=(len(lo), L.size))
    col_lo = np.zeros(L.size)
    col_hi = np.full(L.size, INF)
    for name in ("alpha", "z", "d", "y", "w", "r"):
        col_hi[L.block(name)] = 1.0
    c = np.zeros(L.size)
    if objective in (Objective.MAX_REVENUE, Objective.MIN_REVENUE):
        c[L.block("p")] = -1.0 if objective.maximize else 1.0
    elif objective in (Objective.MAX_PACED_WELFARE, Objective.MIN_PACED_WELFARE):
        c[L.block("h")] = -1.0 if objective.maximize else 1.0
    elif relaxed:
        c[L.block("z")] = 1.0
    return MilpModel(inst, original_n, objective, L, A, np.array(lo), np.array(hi),
                     np.array(fam), col_lo, col_hi, c, B, vbar)


def strengthen(model: MilpModel) -> MilpModel:
    """Append valid inequalities and fix binaries that no equilibrium can set.

    14: p_j <= h_j                        the price never exceeds the top bid
    15: s_ij <= alpha_i v_ij              a winner pays at most its own bid
    16: s_ij <= p_j
    17: h_j <= sum_i v_ij d_ij            the top bid belongs to a possible winner
    18: p_j <= sum_i v_ij r_ij            the price is the runner-up's bid
    19: s_ij <= min(B_i, v_ij, max rival value) d_ij

    d_ij = w_ij = 0 when v_ij = 0 and someone else values good j: every
    finite-budget bidder has alpha > 0 in equilibrium, so the top bid is positive.
    """
    L, inst = model.layout, model.instance
    n, m = inst.n, inst.m
    v, B, INF = inst.values, model.budgets, np.inf
    rows, cols, vals, lo, hi, fam = [], [], [], [], [], []

    def add(entries, l, u, f):
        r = len(lo)
        for col, val in entries:
            if val != 0:
                rows.append(r)
                cols.append(col)
                vals.append(val)
        lo.append(l)
        hi.append(u)
        fam.append(f)

    for j in range(m):
        add([(L.p(j), 1.0), (L.h(j), -1.0)], -INF, 0.0, 14)
    for i in range(n):
        for j in range(m):
            add([(L.s(i, j), 1.0), (L.alpha(i), -v[i, j])], -INF, 0.0, 15)
    for i in range(n):
        for j in range(m):
            add([(L.s(i, j), 1.0), (L.p(j), -1.0)], -INF, 0.0, 16)
    for j in range(m):
        add([(L.h(j), 1.0)] + [(L.d(i, j), -v[i, j]) for i in range(n)], -INF, 0.0, 17)
    for j in range(m):
        add([(L.p(j), 1.0)] + [(L.r(i, j), -v[i, j]) for i in range(n)], -INF, 0.0, 18)
    for i in range(n):
        for j in range(m):
            rival = np.delete(v[:, j], i).max()
            cap = min(B[i], v[i, j], rival)
            add([(L.s(i, j), 1.0), (L.d(i, j), -cap)], -INF, 0.0, 19)

    extra = sparse.csr_matrix((vals, (rows, cols)), shape=(len(lo), L.size))
    col_hi = model.col_hi.copy()
    vbar = model.vbar
    for i in range(n):
        for j in range(m):
            if v[i, j] == 0 and vbar[j] > 0:
                col_hi[L.d(i, j)] = 0.0
                col_hi[L.w(i, j)] = 0.0
    return replace(model, A=sparse.vstack([model.A, extra]).tocsr(),
                   row_lo=np.concatenate([model.row_lo, lo]),
                   row_hi=np.concatenate([model.row_hi, hi]),
                   family=np.concatenate([model.family, fam]), col_hi=col_hi)
