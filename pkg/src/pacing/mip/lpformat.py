"""Plain-text export of a model in CPLEX LP format for external debugging."""
from __future__ import annotations

import math

import numpy as np

from .model import MilpModel


def _term(coef: float, name: str, first: bool) -> str:
    sign = "-" if coef < 0 else ("" if first else "+")
    mag = abs(coef)
    body = name if mag == 1 else f"{mag:.17g} {name}"
    return f"{sign} {body}".strip() if first else f"{sign} {body}"


def _expr(cols, coefs, names) -> str:
    parts = [_term(c, names[k], i == 0) for i, (k, c) in enumerate(zip(cols, coefs))]
    return " ".join(parts) if parts else "0"


def to_lp_string(model: MilpModel) -> str:
    names = model.layout.names()
    lines = ["\\ pacing equilibrium model, objective " + model.objective.value,
             "Maximize" if model.objective.maximize else "Minimize"]
    nz = np.flatnonzero(model.c)
    obj = model.sense * model.c
    lines.append(" obj: " + _expr(nz, obj[nz], names))
    lines.append("Subject To")
    A = model.A.tocsr()
    for r in range(A.shape[0]):
        s, e = A.indptr[r], A.indptr[r + 1]
        ex = _expr(A.indices[s:e], A.data[s:e], names)
        lo, hi = model.row_lo[r], model.row_hi[r]
        tag = f" c{r}_f{model.family[r]}"
        if lo == hi:
            lines.append(f"{tag}: {ex} = {lo:.17g}")
        else:
            if math.isfinite(lo):
                lines.append(f"{tag}_lo: {ex} >= {lo:.17g}")
            if math.isfinite(hi):
                lines.append(f"{tag}_hi: {ex} <= {hi:.17g}")
    lines.append("Bounds")
    for k, nm in enumerate(names):
        if model.integrality[k]:
            continue
        lo, hi = model.col_lo[k], model.col_hi[k]
        hi_s = "+inf" if math.isinf(hi) else f"{hi:.17g}"
        lines.append(f" {lo:.17g} <= {nm} <= {hi_s}")
    lines.append("Binaries")
    lines.append(" " + " ".join(names[k] for k in np.flatnonzero(model.integrality)))
    lines.append("End")
    return "\n".join(lines) + "\n"
