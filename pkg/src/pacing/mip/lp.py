"""LP relaxations of the pacing MIP, solved with the HiGHS dual simplex.

The engine keeps one HiGHS model alive for a whole search so that bound
changes at each node are warm-started from the previous basis.
"""
from __future__ import annotations

from dataclasses import dataclass

import highspy
import numpy as np

from .model import MilpModel

_INF = highspy.kHighsInf


@dataclass(frozen=True)
class LpResult:
    status: str            # "optimal" | "infeasible" | "error"
    objective: float       # minimisation objective (model.c @ x)
    x: np.ndarray | None
    iterations: int


def _finite(a: np.ndarray) -> np.ndarray:
    out = np.asarray(a, dtype=float).copy()
    out[np.isposinf(out)] = _INF
    out[np.isneginf(out)] = -_INF
    return out


class LpEngine:
    def __init__(self, model: MilpModel, feas_tol: float = 1e-7, opt_tol: float = 1e-7):
        self.model = model
        h = highspy.Highs()
        h.setOptionValue("output_flag", False)
        for opt, val in (("presolve", "off"), ("solver", "simplex"), ("threads", 1),
                         ("primal_feasibility_tolerance", feas_tol),
                         ("dual_feasibility_tolerance", opt_tol),
                         ("random_seed", 0)):
            h.setOptionValue(opt, val)
        lp = highspy.HighsLp()
        A = model.A.tocsr()
        lp.num_col_ = A.shape[1]
        lp.num_row_ = A.shape[0]
        lp.col_cost_ = model.c.astype(float)
        lp.col_lower_ = _finite(model.col_lo)
        lp.col_upper_ = _finite(model.col_hi)
        lp.row_lower_ = _finite(model.row_lo)
        lp.row_upper_ = _finite(model.row_hi)
        lp.a_matrix_.format_ = highspy.MatrixFormat.kRowwise
        lp.a_matrix_.start_ = A.indptr.astype(np.int32)
        lp.a_matrix_.index_ = A.indices.astype(np.int32)
        lp.a_matrix_.value_ = A.data.astype(float)
        h.passModel(lp)
        self.h = h
        self.total_iterations = 0

    def set_bounds(self, idx: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> None:
        idx = np.asarray(idx, dtype=np.int32)
        self.h.changeColsBounds(len(idx), idx, np.asarray(lo, float), np.asarray(hi, float))

    def solve(self) -> LpResult:
        h = self.h
        h.run()
        status = h.getModelStatus()
        info = h.getInfo()
        it = int(info.simplex_iteration_count)
        self.total_iterations += it
        if status == highspy.HighsModelStatus.kOptimal:
            x = np.array(h.getSolution().col_value)
            return LpResult("optimal", float(info.objective_function_value), x, it)
        if status in (highspy.HighsModelStatus.kInfeasible,
                      highspy.HighsModelStatus.kUnboundedOrInfeasible):
            return LpResult("infeasible", np.inf, None, it)
        # anything else: retry once from scratch before giving up
        h.clearSolver()
        h.run()
        status = h.getModelStatus()
        if status == highspy.HighsModelStatus.kOptimal:
            x = np.array(h.getSolution().col_value)
            return LpResult("optimal", float(h.getInfo().objective_function_value), x, it)
        if status == highspy.HighsModelStatus.kInfeasible:
            return LpResult("infeasible", np.inf, None, it)
        return LpResult("error", np.inf, None, it)


def lp_relax_solve(model: MilpModel, fixings: dict[int, float] | None = None,
                   feas_tol: float = 1e-7) -> LpResult:
    """Solve the continuous relaxation with some binaries fixed.

    ``fixings`` maps column index to 0 or 1.
    """
    eng = LpEngine(model, feas_tol=feas_tol)
    if fixings:
        idx = np.fromiter(fixings.keys(), dtype=np.int32)
        val = np.fromiter(fixings.values(), dtype=float)
        eng.set_bounds(idx, val, val)
    return eng.solve()
