"""Experiment reports: long-format rows, a summary table and run metadata.

Row and summary files are deterministic so identical runs diff cleanly; the
wall-clock timestamp lives only in the separate ``meta.json`` sidecar.
"""
from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


def _clean(v):
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return None if math.isnan(v) else v
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, np.ndarray):
        return [_clean(x) for x in v.tolist()]
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    return v


def _columns(rows: list[dict]) -> list[str]:
    cols: list[str] = []
    for r in rows:
        for k in r:
            if k not in cols:
                cols.append(k)
    return cols


def write_csv(rows: list[dict], path: Path) -> None:
    cols = _columns(rows)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            out = []
            for c in cols:
                v = _clean(r.get(c))
                if v is None:
                    out.append("")
                elif isinstance(v, float):
                    out.append(repr(v))
                elif isinstance(v, list):
                    out.append(json.dumps(v))
                else:
                    out.append(str(v))
            w.writerow(out)


def read_csv(path: Path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@dataclass
class ExperimentReport:
    kind: str                                # gap | misreport | scalability | warm_start
    rows: list[dict]
    summary: list[dict] = field(default_factory=list)
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "config": _clean_tree(self.config),
                "rows": [_clean_tree(r) for r in self.rows],
                "summary": [_clean_tree(r) for r in self.summary]}

    def write(self, out_dir: str | Path, figures: bool = True) -> list[Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        written = [out / "rows.csv", out / "summary.csv", out / "report.json", out / "meta.json"]
        write_csv(self.rows, written[0])
        write_csv(self.summary, written[1])
        written[2].write_text(json.dumps(self.to_dict(), indent=1) + "\n")
        meta = {"kind": self.kind, "created": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
                "rows": len(self.rows)}
        written[3].write_text(json.dumps(meta, indent=1, sort_keys=True) + "\n")
        if figures:
            from .plotting import render
            written += render(self, out)
        return written

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentReport":
        p = Path(path)
        if p.is_dir():
            p = p / "report.json"
        d = json.loads(p.read_text())
        return cls(d["kind"], d["rows"], d.get("summary", []), d.get("config", {}))


def _clean_tree(d):
    if isinstance(d, dict):
        return {str(k): _clean_tree(v) for k, v in d.items()}
    return _clean(d)
