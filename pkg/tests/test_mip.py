import numpy as np
import pytest

from pacing.instances import GenConfig, fixtures, gen_stylized
from pacing.market import PacingInstance, PacingOutcome, objectives, verify_equilibrium
from pacing.mip import (ALL_OBJECTIVES, SolverConfig, build_model, decode, encode_outcome,
                        lp_relax_solve, solve, solve_instance, to_lp_string)
from pacing.mip.model import strengthen

from oracles import revenue_extremes

FIX = fixtures()


def test_model_sizes_two_bidders_one_good():
    model = build_model(PacingInstance([[3.0], [7.0]], [1.0, 1.0]), "max_revenue")
    L = model.layout
    continuous = L.size - L.binary_indices().size
    assert continuous == 2 + 2 + 1 + 1
    assert L.binary_indices().size == 2 + 2 + 2 + 2
    assert set(np.unique(model.family)) == set(range(1, 14))
    assert model.vbar[0] == 7.0


def test_relaxed_mode_is_the_only_one_with_slack():
    inst = FIX["revenue_gap"].instance
    for obj in ALL_OBJECTIVES:
        model = build_model(inst, obj)
        size = model.layout.block("z").stop - model.layout.block("z").start
        assert size == (inst.n if obj.value == "relaxed_feasibility" else 0)


def test_strengthen_only_appends_rows():
    model = build_model(FIX["revenue_gap"].instance, "max_revenue")
    strong = strengthen(model)
    assert strong.layout.size == model.layout.size
    assert strong.A.shape[0] > model.A.shape[0]
    assert set(np.unique(strong.family)) == set(range(1, 20))


def test_unlimited_budget_bound():
    inst = FIX["ce_lower_rev"].instance
    model = build_model(inst, "feasibility")
    assert model.budgets[0] == pytest.approx(model.vbar.sum() + 1)


def test_lp_export_mentions_every_section():
    text = to_lp_string(build_model(FIX["single_bidder"].instance, "max_revenue"))
    for key in ("Maximize", "Subject To", "Bounds", "Binaries", "End"):
        assert key in text


@pytest.mark.parametrize("objective,expected", [("max_revenue", 102.0), ("min_revenue", 3.0)])
def test_revenue_gap_extremes(objective, expected):
    res = solve_instance(FIX["revenue_gap"].instance, objective)
    assert res.status == "optimal"
    assert res.objective_value == pytest.approx(expected, abs=1e-6)
    assert verify_equilibrium(FIX["revenue_gap"].instance, res.outcome)


def test_plain_formulation_and_most_fractional_branching_agree():
    inst = FIX["revenue_gap"].instance
    plain = SolverConfig(strengthen=False, branching="most_fractional")
    assert solve_instance(inst, "max_revenue", plain).objective_value == pytest.approx(102)
    assert solve_instance(inst, "min_revenue", plain).objective_value == pytest.approx(3)


def test_external_backend_matches():
    res = solve_instance(FIX["revenue_gap"].instance, "max_revenue",
                         SolverConfig(backend="external"))
    assert res.objective_value == pytest.approx(102, abs=1e-6)


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(time_limit=0)
    with pytest.raises(ValueError):
        SolverConfig(branching="random")


def test_decode_splits_by_spend():
    inst = PacingInstance([[1.0], [1.0]], [0.5, 0.5])
    eq = PacingOutcome([1.0, 1.0], [[0.5], [0.5]], [1.0])
    assert verify_equilibrium(inst, eq)
    model = build_model(inst, "feasibility")
    raw = encode_outcome(inst, eq, model=model)
    assert raw[model.layout.s(0, 0)] == pytest.approx(0.5)
    assert decode(model, raw).fractions[:, 0] == pytest.approx([0.5, 0.5])


def test_single_bidder_padding():
    f = FIX["single_bidder"]
    model = build_model(f.instance, "feasibility")
    assert model.instance.n == 2 and model.original_n == 1
    raw = encode_outcome(f.instance, f.equilibria[0], model=model)
    assert model.is_feasible(raw)
    assert raw[model.layout.r(1, 0)] == 1.0
    out = decode(model, raw)
    assert out.alphas.shape == (1,) and out.fractions[0, 0] == 1.0 and out.prices[0] == 0.0


def test_encode_rejects_non_equilibrium():
    f = FIX["revenue_gap"]
    bad = PacingOutcome([1, 1, 1], f.equilibria[0].fractions, f.equilibria[0].prices)
    with pytest.raises(ValueError):
        encode_outcome(f.instance, bad)


@pytest.mark.parametrize("name", [n for n in sorted(FIX) if FIX[n].equilibria])
def test_fixture_round_trip(name):
    f = FIX[name]
    for obj in ALL_OBJECTIVES:
        model = build_model(f.instance, obj)
        for eq in f.equilibria:
            raw = encode_outcome(f.instance, eq, model=model)
            assert model.is_feasible(raw, 1e-6)
            assert strengthen(model).is_feasible(raw, 1e-6)
            back = decode(model, raw)
            assert np.allclose(back.fractions, eq.fractions, atol=1e-6)
            assert np.allclose(back.prices, eq.prices, atol=1e-6)


def test_lp_with_incumbent_pattern_matches():
    inst = FIX["revenue_gap"].instance
    model = build_model(inst, "max_revenue")
    res = solve(model)
    bins = model.layout.binary_indices()
    fix = {int(k): float(round(res.raw[k])) for k in bins}
    lp = lp_relax_solve(model, fix)
    assert lp.status == "optimal"
    assert -lp.objective == pytest.approx(res.objective_value, abs=1e-6)


def test_contradictory_fixing_is_infeasible():
    model = build_model(FIX["revenue_gap"].instance, "max_revenue")
    L = model.layout
    assert lp_relax_solve(model, {L.w(0, 0): 1.0, L.r(0, 0): 1.0}).status == "infeasible"


@pytest.mark.parametrize("seed", range(8))
def test_relaxation_bounds_integer_optimum(seed):
    inst = gen_stylized(GenConfig(("complete", "sampled", "correlated")[seed % 3], 3, 3,
                                  seed=100 + seed))
    model = build_model(inst, "max_revenue")
    lp = lp_relax_solve(model)
    _, hi = revenue_extremes(inst.values, inst.budgets)
    assert -lp.objective >= hi - 1e-6


@pytest.mark.parametrize("seed", range(5))
def test_objective_monotonicity_and_determinism(seed):
    inst = gen_stylized(GenConfig("complete", 3, 4, seed=seed))
    lo = solve_instance(inst, "min_revenue")
    mid = solve_instance(inst, "feasibility")
    hi = solve_instance(inst, "max_revenue")
    rev = objectives(inst, mid.outcome).revenue
    assert lo.objective_value - 1e-6 <= rev <= hi.objective_value + 1e-6
    again = solve_instance(inst, "max_revenue")
    assert again.status == hi.status and again.objective_value == hi.objective_value


def test_relaxed_feasibility_finds_exact_equilibrium():
    inst = gen_stylized(GenConfig("correlated", 3, 4, seed=11))
    res = solve_instance(inst, "relaxed_feasibility")
    assert res.status == "optimal" and res.objective_value == pytest.approx(0, abs=1e-9)
    assert verify_equilibrium(inst, res.outcome)


def test_node_limit_reports_timeout():
    inst = gen_stylized(GenConfig("complete", 4, 6, seed=1))
    res = solve_instance(inst, "min_paced_welfare",
                         SolverConfig(node_limit=1, branching="most_fractional",
                                      strengthen=False))
    assert res.status in ("timeout", "optimal")
    if res.outcome is not None:
        assert verify_equilibrium(inst, res.outcome)
