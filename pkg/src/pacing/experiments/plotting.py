"""Figures for experiment reports, written as PNG next to the tables."""
from __future__ import annotations

from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {"figure.figsize": (5.0, 3.2), "axes.spines.top": False, "axes.spines.right": False,
         "font.size": 9, "legend.frameon": False, "savefig.dpi": 150}


def _num(x):
    try:
        return float(x)
    except (TypeError, ValueError):
        return np.nan


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def plot_gap(summary, path):
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        names = [r["objective"] for r in summary]
        x = np.arange(len(names))
        ax.bar(x - 0.2, [_num(r["no_gap_pct"]) for r in summary], 0.4, label="no gap (%)")
        ax.bar(x + 0.2, [_num(r["max_gap_pct"]) for r in summary], 0.4, label="max gap (%)")
        ax.set_xticks(x, names)
        ax.set_ylim(0, 105)
        ax.legend()
        return _save(fig, path)


def plot_misreport(summary, path):
    by_n = sorted((r for r in summary if r.get("level") == "n"), key=lambda r: _num(r["n"]))
    with plt.rc_context(STYLE):
        fig, (a1, a2) = plt.subplots(1, 2, figsize=(7.0, 3.0))
        ns = [_num(r["n"]) for r in by_n]
        a1.plot(ns, [_num(r["incentive_pct"]) for r in by_n], "o-")
        a1.set_xlabel("bidders")
        a1.set_ylabel("instances with incentive (%)")
        a2.plot(ns, [_num(r["max_utility_gain"]) for r in by_n], "s-")
        a2.set_xlabel("bidders")
        a2.set_ylabel("max utility gain")
        return _save(fig, path)


def plot_scalability(summary, path):
    acc = defaultdict(list)
    for r in summary:
        acc[(r["objective"], _num(r["m"]))].append(_num(r["solved_pct"]))
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for obj in sorted({k[0] for k in acc}):
            ms = sorted(m for o, m in acc if o == obj)
            ax.plot(ms, [np.mean(acc[(obj, m)]) for m in ms], "o-", label=obj)
        ax.set_xlabel("goods")
        ax.set_ylabel("solved (%)")
        ax.set_ylim(0, 105)
        ax.legend(fontsize=7)
        return _save(fig, path)


def plot_warm_start(summary, path):
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        inits = [str(r["init"]) for r in summary]
        ax.bar(inits, [_num(r["avg_max_relative_regret"]) for r in summary])
        ax.set_xlabel("initial multipliers")
        ax.set_ylabel("avg max relative regret")
        return _save(fig, path)


def plot_multipliers(multipliers, path, xlabel="iteration"):
    a = np.asarray(multipliers, dtype=float)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for i in range(a.shape[1]):
            ax.plot(np.arange(a.shape[0]), a[:, i], label=f"bidder {i + 1}", lw=1)
        ax.set_xlabel(xlabel)
        ax.set_ylabel("multiplier")
        ax.set_ylim(0, 1.05)
        ax.legend(fontsize=7)
        return _save(fig, path)


_RENDER = {"gap": plot_gap, "misreport": plot_misreport, "scalability": plot_scalability,
           "warm_start": plot_warm_start}


def render(report, out_dir) -> list[Path]:
    fn = _RENDER.get(report.kind)
    if fn is None or not report.summary:
        return []
    return [fn(report.summary, Path(out_dir) / f"{report.kind}.png")]
