"""Depth-first branch-and-bound over the binary variables of the pacing MIP."""
from __future__ import annotations

import dataclasses
import time
from dataclasses import dataclass, field

import numpy as np

from ..market import DEFAULT_TOL, PacingOutcome, Tolerance, verify_equilibrium
from .codec import ResidualError, decode
from .lp import LpEngine
from .model import MilpModel, Objective, strengthen

RESTART_EVERY = 1000


@dataclass(frozen=True)
class SolverConfig:
    time_limit: float = 300.0
    mip_gap: float = 1e-9
    feas_tol: float = 1e-7
    int_tol: float = 1e-6
    backend: str = "embedded"
    node_limit: int | None = None
    branching: str = "strong"            # or "most_fractional"
    strong_candidates: int = 16
    strengthen: bool = True               # add valid inequalities before searching

    def __post_init__(self):
        if not self.time_limit > 0:
            raise ValueError("time_limit must be positive")
        if self.branching not in ("strong", "most_fractional"):
            raise ValueError("branching must be 'strong' or 'most_fractional'")
        if self.backend not in ("embedded", "external"):
            raise ValueError("backend must be 'embedded' or 'external'")


@dataclass
class SolveStats:
    nodes: int = 0
    lp_iterations: int = 0
    wall_time: float = 0.0
    rejected_incumbents: int = 0
    lp_errors: int = 0

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class SolveResult:
    status: str                              # optimal | feasible | infeasible | timeout
    outcome: PacingOutcome | None = None
    objective_value: float | None = None
    raw: np.ndarray | None = None
    bound: float | None = None
    stats: SolveStats = field(default_factory=SolveStats)
    flags: tuple[str, ...] = ()

    @property
    def solved(self) -> bool:
        return self.status == "optimal"


class _Node:
    __slots__ = ("lo", "hi", "bound", "depth")

    def __init__(self, lo, hi, bound, depth):
        self.lo, self.hi, self.bound, self.depth = lo, hi, bound, depth


class _Propagator:
    """Bound propagation on the rows that involve binaries only.

    Works on all such rows at once: row activity ranges are computed from the
    current 0/1 bounds, and a free binary is fixed whenever moving it off its
    least (most) favourable value would push a row past its upper (lower) side.
    """

    def __init__(self, model: MilpModel, bin_pos: np.ndarray):
        A = model.A.tocsr()
        is_bin = model.integrality
        keep = []
        for r in range(A.shape[0]):
            cols = A.indices[A.indptr[r]:A.indptr[r + 1]]
            if cols.size and is_bin[cols].all():
                keep.append(r)
        sub = A[keep].tocoo()
        self.row = sub.row
        self.col = bin_pos[sub.col]
        self.coef = sub.data.astype(float)
        self.pos = self.coef > 0
        self.rlo = model.row_lo[keep]
        self.rhi = model.row_hi[keep]
        self.nrows = len(keep)
        self.val_kill = np.where(self.pos, 0.0, 1.0)
        self.val_force = np.where(self.pos, 1.0, 0.0)

    def __call__(self, lo: np.ndarray, hi: np.ndarray) -> bool:
        if self.nrows == 0:
            return True
        row, col, a, pos = self.row, self.col, self.coef, self.pos
        span = np.abs(a)
        for _ in range(100):
            l, h = lo[col], hi[col]
            cmin = np.where(pos, a * l, a * h)
            cmax = np.where(pos, a * h, a * l)
            smin = np.bincount(row, cmin, self.nrows)
            smax = np.bincount(row, cmax, self.nrows)
            if np.any(smin > self.rhi + 1e-9) or np.any(smax < self.rlo - 1e-9):
                return False
            free = l < h
            kill = free & (smin[row] + span > self.rhi[row] + 1e-9)
            force = free & (smax[row] - span < self.rlo[row] - 1e-9)
            if not (kill.any() or force.any()):
                return True
            # kill keeps the contribution at its minimum, force at its maximum
            for mask, val in ((kill, self.val_kill), (force, self.val_force)):
                idx = np.flatnonzero(mask)
                c, v = col[idx], val[idx]
                if np.any(((lo[c] == 1) & (v == 0)) | ((hi[c] == 0) & (v == 1))):
                    return False
                lo[c] = v
                hi[c] = v
        return True


def solve(model: MilpModel, config: SolverConfig | None = None,
          tol: Tolerance = DEFAULT_TOL, _exact_phase: bool = False) -> SolveResult:
    """Solve the model; every incumbent is decoded and verified before use."""
    config = config or SolverConfig()
    if config.strengthen and not _exact_phase:
        model = strengthen(model)
    if config.backend == "external":
        from .external import solve_external
        return solve_external(model, config, tol)
    if model.objective is Objective.RELAXED_FEASIBILITY and not _exact_phase:
        # an exact equilibrium is optimal (zero slack), so look for one first
        sub = dataclasses.replace(model, col_hi=model.col_hi.copy())
        sub.col_hi[model.layout.block("z")] = 0.0
        first = solve(sub, dataclasses.replace(config, time_limit=config.time_limit / 2), tol,
                      _exact_phase=True)
        if first.outcome is not None:
            first.status = "optimal"
            return first
        rest = dataclasses.replace(config, time_limit=max(config.time_limit - first.stats.wall_time,
                                                          1e-3))
        second = solve(model, rest, tol, _exact_phase=True)
        second.stats.nodes += first.stats.nodes
        second.stats.lp_iterations += first.stats.lp_iterations
        second.stats.wall_time += first.stats.wall_time
        return second
    t0 = time.perf_counter()
    stats = SolveStats()
    engine = LpEngine(model, feas_tol=config.feas_tol)
    bins = model.layout.binary_indices()
    nb = bins.size
    bin_pos = np.full(model.layout.size, -1)
    bin_pos[bins] = np.arange(nb)
    propagate = _Propagator(model, bin_pos)
    base_lo = model.col_lo[bins].copy()
    base_hi = model.col_hi[bins].copy()

    first_feasible = model.objective in (Objective.FEASIBILITY,)
    relaxed = model.objective is Objective.RELAXED_FEASIBILITY

    inc_obj = np.inf
    inc_x = None
    inc_outcome = None
    flags: list[str] = []

    lo0, hi0 = base_lo.copy(), base_hi.copy()
    if not propagate(lo0, hi0):
        stats.wall_time = time.perf_counter() - t0
        return SolveResult("infeasible", stats=stats)
    stack = [_Node(lo0, hi0, -np.inf, 0)]
    timed_out = False

    def gap_ok(bound):
        return bound >= inc_obj - config.mip_gap * max(1.0, abs(inc_obj))

    while stack:
        if time.perf_counter() - t0 > config.time_limit or (
                config.node_limit is not None and stats.nodes >= config.node_limit):
            timed_out = True
            break
        if stats.nodes and stats.nodes % RESTART_EVERY == 0:
            # best-bound restart: bring the most promising open node to the top
            stack.sort(key=lambda nd: (-nd.bound, nd.depth))
        node = stack.pop()
        if inc_x is not None and gap_ok(node.bound):
            continue
        stats.nodes += 1
        engine.set_bounds(bins, node.lo, node.hi)
        res = engine.solve()
        if res.status == "error":
            stats.lp_errors += 1
            continue
        if res.status == "infeasible":
            continue
        if inc_x is not None and gap_ok(res.objective):
            continue
        xb = res.x[bins]
        frac = np.abs(xb - np.round(xb))
        fractional = frac > config.int_tol
        if not fractional.any():
            outcome = _accept(model, res.x, tol, config)
            if outcome is None:
                stats.rejected_incumbents += 1
                # resolve with every binary pinned to its rounded value and retry once
                r = np.round(xb)
                engine.set_bounds(bins, r, r)
                res2 = engine.solve()
                outcome = _accept(model, res2.x, tol, config) if res2.status == "optimal" else None
                if outcome is None:
                    continue
                res = res2
            inc_obj, inc_x, inc_outcome = res.objective, res.x, outcome
            if first_feasible or (relaxed and inc_obj <= 1e-9):
                break
            continue
        # most fractional; argmax keeps the first index on ties, i.e. w, r, d, y order
        score = np.minimum(xb, 1 - xb)
        if config.branching == "strong":
            k = _strong_choice(engine, bins, node, score, fractional, res.objective,
                               propagate, config.strong_candidates)
        else:
            k = int(np.argmax(np.where(fractional, score, -1.0)))
        down_lo, down_hi = node.lo.copy(), node.hi.copy()
        down_hi[k] = 0.0
        up_lo, up_hi = node.lo.copy(), node.hi.copy()
        up_lo[k] = 1.0
        children = []
        for lo, hi in ((down_lo, down_hi), (up_lo, up_hi)):
            if propagate(lo, hi):
                children.append(_Node(lo, hi, res.objective, node.depth + 1))
            else:
                children.append(None)
        # explore the child closer to the relaxation value first
        first_up = xb[k] >= 0.5
        order = [children[0], children[1]] if first_up else [children[1], children[0]]
        for ch in order:
            if ch is not None:
                stack.append(ch)

    stats.lp_iterations = engine.total_iterations
    stats.wall_time = time.perf_counter() - t0
    bound = None
    if inc_x is None:
        status = "timeout" if timed_out else "infeasible"
        return SolveResult(status, stats=stats, flags=tuple(flags))
    value = model.objective_value(inc_x)
    if timed_out:
        open_bounds = [nd.bound for nd in stack if not gap_ok(nd.bound)]
        bound = min([inc_obj] + open_bounds) * model.sense
        status = "timeout"
    else:
        status = "optimal"
        bound = value
    if relaxed and value > 1e-9:
        flags.append("relaxed_slack_positive")
    return SolveResult(status, inc_outcome, value, inc_x, bound, stats, tuple(flags))


def _strong_choice(engine, bins, node, score, fractional, base, propagate, width):
    keyed = np.where(fractional, score, -1.0)
    cand = np.argsort(-keyed, kind="stable")[:width]
    cand = cand[fractional[cand]]
    frac_sum = score[fractional].sum()
    best_k, best_val = int(cand[0]), -1.0
    for k in cand:
        gains = []
        for side in (0.0, 1.0):
            lo, hi = node.lo.copy(), node.hi.copy()
            lo[k] = hi[k] = side
            if not propagate(lo, hi):
                return int(k)
            engine.set_bounds(bins, lo, hi)
            r = engine.solve()
            if r.status == "infeasible":
                return int(k)
            if r.status != "optimal":
                gains.append(0.0)
                continue
            xb = r.x[bins]
            child_frac = np.minimum(xb, 1 - xb)
            child_frac = child_frac[child_frac > 1e-6].sum()
            gains.append(max(r.objective - base, 0.0) / (1.0 + abs(base))
                         + 1e-3 * max(frac_sum - child_frac, 0.0))
        val = max(gains[0], 1e-9) * max(gains[1], 1e-9)
        if val > best_val:
            best_k, best_val = int(k), val
    return best_k


def _accept(model: MilpModel, x, tol: Tolerance, config: SolverConfig):
    try:
        outcome = decode(model, x, feas_tol=max(10 * config.feas_tol, 1e-6))
    except ResidualError:
        return None
    if model.objective is Objective.RELAXED_FEASIBILITY and model.objective_value(x) > 1e-9:
        return outcome  # approximate equilibrium; flagged by the caller
    if not verify_equilibrium(model.instance if model.original_n == model.instance.n
                              else _strip(model), outcome, tol).accepted:
        return None
    return outcome


def _strip(model: MilpModel):
    from ..market import PacingInstance
    inst = model.instance
    k = model.original_n
    return PacingInstance(inst.values[:k], inst.budgets[:k])
