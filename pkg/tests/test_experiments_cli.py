import hashlib
import json

import numpy as np
import pytest

from pacing import cli
from pacing.experiments import (ExperimentReport, MisreportGrid, ScaleGrid, gap_pct, pmap,
                                read_csv, reported_instance, run_gap_analysis,
                                run_misreport_study, run_scalability, run_warm_start,
                                worker_count, write_csv)
from pacing.dynamics import WarmStartGrid
from pacing.instances import fixtures
from pacing.market import PacingInstance, objectives
from pacing.market.io import instance_hash, outcome_to_dict, save_instance
from pacing.mip import solve_instance

FIX = fixtures()


def _square(x):
    return x * x


def test_pmap_serial_and_parallel(monkeypatch):
    assert pmap(_square, [1, 2, 3], workers=1) == [1, 4, 9]
    assert pmap(_square, [1, 2, 3], workers=2) == [1, 4, 9]
    monkeypatch.setenv("PACING_WORKERS", "3")
    assert worker_count() == 3


def test_csv_round_trip(tmp_path):
    rows = [{"a": 1, "b": 0.1, "c": float("nan"), "d": [1, 2]}, {"a": 2, "b": 1e-20}]
    write_csv(rows, tmp_path / "x.csv")
    back = read_csv(tmp_path / "x.csv")
    assert back[0] == {"a": "1", "b": "0.1", "c": "", "d": "[1, 2]"}
    assert float(back[1]["b"]) == 1e-20


def test_gap_report(tmp_path):
    inst = FIX["revenue_gap"].instance
    rep = run_gap_analysis([("revenue_gap", inst)], time_limit=30)
    row = rep.rows[0]
    assert row["instance_hash"] == instance_hash(inst)
    assert row["max_revenue_revenue"] == pytest.approx(102)
    assert row["min_revenue_revenue"] == pytest.approx(3)
    rev = next(s for s in rep.summary if s["objective"] == "revenue")
    assert rev["max_gap_pct"] == pytest.approx(gap_pct(3, 102))
    assert rev["max_gap_pct"] == pytest.approx(100 * 99 / 102)
    for s in rep.summary:
        assert 0 <= s["pairs_pct"] <= 100 and 0 <= s["no_gap_pct"] <= 100
    files = rep.write(tmp_path / "a")
    assert any(p.suffix == ".png" for p in files)
    rep.write(tmp_path / "b", figures=False)
    for name in ("rows.csv", "summary.csv", "report.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    loaded = ExperimentReport.load(tmp_path / "a")
    assert loaded.kind == "gap" and loaded.rows[0]["instance"] == "revenue_gap"


def test_misreport_grid_dimensions():
    grid = MisreportGrid()
    assert len(grid.betas) == 5 and len(grid.nus) == 10
    assert len(MisreportGrid.fine().betas) == 17
    inst = FIX["revenue_gap"].instance
    rep = reported_instance(inst, 1, 0.5, 2.0)
    assert rep.budgets[1] == 0.5 and np.array_equal(rep.values[1], 2 * inst.values[1])
    assert np.array_equal(rep.values[0], inst.values[0])


def test_misreport_truthful_cell_matches_objectives():
    f = FIX["misreport"]
    grid = MisreportGrid(betas=(1.0,), nus=(1.0, 1.01))
    rep = run_misreport_study([("m", f.instance)], grid, focal=1, time_limit=30)
    truth = next(r for r in rep.rows if r["nu"] == 1.0)
    sol = solve_instance(f.instance, "max_paced_welfare")
    o = sol.outcome
    expect = float(o.fractions[1] @ f.instance.values[1] - o.spends[1].sum())
    assert truth["utility"] == pytest.approx(expect)
    with pytest.raises(ValueError):
        run_misreport_study([("m", f.instance)], MisreportGrid(betas=(0.8,), nus=(1.0,)))


def test_scalability_summary():
    grid = ScaleGrid(kinds=("complete",), ns=(2,), ms=(2,), seeds=(0, 1),
                     objectives=("feasibility", "max_revenue"))
    rep = run_scalability(grid, time_limit=30)
    assert len(rep.rows) == 4 and all("seconds" not in r for r in rep.rows)
    assert all(s["solved_pct"] == 100.0 for s in rep.summary)


def test_warm_start_pipeline(tmp_path):
    inst = PacingInstance([[1.0, 0.4], [0.3, 1.0]], [0.5, 0.5])
    grid = WarmStartGrid(inits=("mip", 1.0), epsilons=(0.01,), alpha_mins=(0.05,),
                         time_limit=10)
    rep = run_warm_start([("w", inst)], factor=5, sigmas=(0.0,), grid=grid)
    assert len(rep.rows) == 2 and {s["init"] for s in rep.summary} == {"mip", "1.0"}
    rep.write(tmp_path)
    assert (tmp_path / "rows.csv").exists()


# --- CLI --------------------------------------------------------------------

def _run(argv):
    return cli.main([str(a) for a in argv])


def test_cli_generate_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert _run(["generate", "--kind", "complete", "--seed", 7, "-o", p]) == 0
    assert hashlib.sha256(a.read_bytes()).digest() == hashlib.sha256(b.read_bytes()).digest()


def test_cli_solve_and_verify(tmp_path):
    inst_path = tmp_path / "rg.json"
    assert _run(["generate", "--kind", "fixture", "--name", "revenue_gap", "-o", inst_path]) == 0
    out = tmp_path / "sol.json"
    assert _run(["solve", inst_path, "--objective", "max_revenue", "-o", out]) == 0
    sol = json.loads(out.read_text())
    assert sol["status"] == "optimal" and sol["objective_value"] == pytest.approx(102)

    eq = tmp_path / "eq.json"
    eq.write_text(json.dumps(outcome_to_dict(FIX["revenue_gap"].equilibria[1])))
    assert _run(["verify", inst_path, eq]) == 0
    bad = outcome_to_dict(FIX["revenue_gap"].equilibria[1])
    bad["prices"][0] += 1
    eq.write_text(json.dumps(bad))
    verdict = tmp_path / "verdict.json"
    assert _run(["verify", inst_path, eq, "-o", verdict]) == 1
    assert json.loads(verdict.read_text())["violations"][0]["code"] == "wrong_price"


def test_cli_error_codes(tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    assert _run(["solve", broken]) == 2
    hard = tmp_path / "hard.json"
    assert _run(["generate", "--kind", "complete", "--n", 4, "--m", 6, "--seed", 1,
                 "-o", hard]) == 0
    assert _run(["solve", hard, "--objective", "min_paced_welfare", "--time-limit", 1e-4]) == 3


def test_cli_dynamics_and_report(tmp_path):
    inst_path = tmp_path / "c.json"
    save_instance(FIX["cycling"].instance, inst_path)
    trace = tmp_path / "trace.jsonl"
    png = tmp_path / "m.png"
    assert _run(["dynamics", inst_path, "--init", "ones", "--max-iters", 5, "-o", trace,
                 "--plot", png]) == 0
    assert len(trace.read_text().splitlines()) == 5 and png.stat().st_size > 0
    assert _run(["dynamics", inst_path, "--mode", "adaptive", "--factor", 3,
                 "--init", "ones", "-o", tmp_path / "ad.jsonl"]) == 0

    out = tmp_path / "gap"
    assert _run(["gap", inst_path, "--time-limit", 30, "--out", out]) == 0
    assert (out / "rows.csv").exists() and list(out.glob("*.png"))
    again = tmp_path / "again"
    assert _run(["report", out, "--out", again]) == 0
    assert (again / "summary.csv").read_bytes() == (out / "summary.csv").read_bytes()
