"""JSON encoding of instances, outcomes and competitive outcomes.

Instance schema::

    {"n": 2, "m": 1, "values": [[1.0], [0.5]], "budgets": [1.0, "inf"]}

Outcome schema::

    {"alphas": [...], "fractions": [[...]], "prices": [...]}
"""
from __future__ import annotations

import hashlib
import json
import math

import numpy as np

from .types import CompetitiveOutcome, PacingInstance, PacingOutcome


def _num(x: float):
    return "inf" if math.isinf(x) else float(x)


def instance_to_dict(instance: PacingInstance) -> dict:
    return {"n": instance.n, "m": instance.m,
            "values": instance.values.tolist(),
            "budgets": [_num(b) for b in instance.budgets]}


def instance_from_dict(d: dict) -> PacingInstance:
    try:
        values = np.array(d["values"], dtype=float).reshape(int(d["n"]), int(d["m"]))
        budgets = [math.inf if b in ("inf", "Infinity", None) else float(b) for b in d["budgets"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed instance: {exc}") from exc
    return PacingInstance(values, budgets)


def outcome_to_dict(outcome: PacingOutcome) -> dict:
    return {"alphas": outcome.alphas.tolist(),
            "fractions": outcome.fractions.tolist(),
            "prices": outcome.prices.tolist()}


def outcome_from_dict(d: dict) -> PacingOutcome:
    try:
        return PacingOutcome(d["alphas"], d["fractions"], d["prices"])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed outcome: {exc}") from exc


def ce_to_dict(ce: CompetitiveOutcome) -> dict:
    return {"prices": ce.prices.tolist(), "fractions": ce.fractions.tolist()}


def ce_from_dict(d: dict) -> CompetitiveOutcome:
    return CompetitiveOutcome(d["prices"], d["fractions"])


def dumps_canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def instance_hash(instance: PacingInstance) -> str:
    """Content hash used to tie report rows to their source instance."""
    return hashlib.sha256(dumps_canonical(instance_to_dict(instance)).encode()).hexdigest()[:16]


def save_instance(instance: PacingInstance, path) -> None:
    with open(path, "w") as fh:
        json.dump(instance_to_dict(instance), fh, indent=1)
        fh.write("\n")


def load_instance(path) -> PacingInstance:
    with open(path) as fh:
        return instance_from_dict(json.load(fh))


def load_outcome(path) -> PacingOutcome:
    with open(path) as fh:
        d = json.load(fh)
    return outcome_from_dict(d.get("outcome", d))
