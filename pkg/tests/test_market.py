import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pacing.instances import fixtures
from pacing.market import (CompetitiveOutcome, PacingInstance, PacingOutcome, SmoothedGameParams,
                           Tolerance, best_response, ce_to_pacing, objectives, pareto_probe,
                           pe_to_ce, smoothed_outcome, utility_at, verify_competitive,
                           verify_equilibrium)
from pacing.market.io import (dumps_canonical, instance_from_dict, instance_hash,
                              instance_to_dict, load_instance, outcome_from_dict, outcome_to_dict,
                              save_instance)

from oracles import grid_best_utility

FIX = fixtures()


# --- types and io -----------------------------------------------------------

def test_instance_validation():
    with pytest.raises(ValueError):
        PacingInstance([[1.0, -1.0]], [1.0])
    with pytest.raises(ValueError):
        PacingInstance([[1.0]], [0.0])
    with pytest.raises(ValueError):
        PacingInstance([[1.0], [2.0]], [1.0])
    with pytest.raises(ValueError):
        PacingOutcome([1.0], [[1.0, 0.0]], [1.0])


def test_instance_arrays_are_read_only():
    inst = FIX["revenue_gap"].instance
    with pytest.raises(ValueError):
        inst.values[0, 0] = 5.0


def test_json_round_trip_with_unlimited_budget(tmp_path):
    inst = FIX["ce_lower_rev"].instance
    d = instance_to_dict(inst)
    assert d["n"] == 3 and d["m"] == 3 and "inf" in d["budgets"]
    assert instance_from_dict(json.loads(json.dumps(d))) == inst
    path = tmp_path / "inst.json"
    save_instance(inst, path)
    assert load_instance(path) == inst
    out = FIX["revenue_gap"].equilibria[0]
    back = outcome_from_dict(outcome_to_dict(out))
    assert np.array_equal(back.alphas, out.alphas) and np.array_equal(back.prices, out.prices)


def test_instance_hash_is_content_based():
    a = FIX["revenue_gap"].instance
    b = PacingInstance(a.values.copy(), a.budgets.copy())
    assert instance_hash(a) == instance_hash(b)
    assert instance_hash(a) != instance_hash(a.with_budgets([1, 1, 99]))
    assert dumps_canonical({"b": 1, "a": 2}) == dumps_canonical({"a": 2, "b": 1})


# --- objectives and verification -------------------------------------------

def test_objectives_on_fixtures():
    high, low = FIX["revenue_gap"].equilibria
    inst = FIX["revenue_gap"].instance
    assert objectives(inst, high).revenue == pytest.approx(102, abs=1e-9)
    assert objectives(inst, low).revenue == pytest.approx(3, abs=1e-9)
    pw = FIX["paced_welfare_gap"]
    assert objectives(pw.instance, pw.equilibria[1]).paced_welfare == pytest.approx(300, abs=1e-9)
    assert objectives(pw.instance, pw.equilibria[0]).paced_welfare == pytest.approx(10200, abs=1e-9)


def test_objectives_empty_allocation():
    inst = FIX["revenue_gap"].instance
    empty = PacingOutcome(np.ones(3), np.zeros((3, 4)), np.zeros(4))
    o = objectives(inst, empty)
    assert (o.revenue, o.social_welfare, o.paced_welfare) == (0, 0, 0)


@pytest.mark.parametrize("name", sorted(FIX))
def test_fixture_equilibria_verify(name):
    f = FIX[name]
    for eq in f.equilibria:
        v = verify_equilibrium(f.instance, eq)
        assert v.accepted, v.to_dict()


def test_single_bidder_cases():
    inst = FIX["single_bidder"].instance
    assert verify_equilibrium(inst, PacingOutcome([1.0], [[1.0]], [0.0]))
    v = verify_equilibrium(inst, PacingOutcome([0.5], [[1.0]], [0.0]))
    assert not v.accepted
    assert [x.code for x in v.violations] == ["paced_while_underspending"]
    assert v.conditions() == {"c"}


def test_violation_codes():
    inst = FIX["revenue_gap"].instance
    high = FIX["revenue_gap"].equilibria[0]
    wrong_price = PacingOutcome(high.alphas, high.fractions, high.prices + [0, 0, 0, 1])
    codes = {x.code for x in verify_equilibrium(inst, wrong_price).violations}
    assert "wrong_price" in codes
    loser = np.array(high.fractions)
    loser[:, 0] = [0, 1, 0]
    codes = {x.code for x in verify_equilibrium(inst, PacingOutcome(high.alphas, loser,
                                                                    high.prices)).violations}
    assert "not_highest_bid" in codes
    half = np.array(high.fractions) * 0.5
    codes = {x.code for x in verify_equilibrium(inst, PacingOutcome(high.alphas, half,
                                                                    high.prices)).violations}
    assert "underallocated" in codes
    tight = FIX["budget_0.99"].instance
    codes = {x.code for x in verify_equilibrium(tight, PacingOutcome([1, 1], [[1], [0]],
                                                                      [1.0])).violations}
    assert codes == {"over_budget"}
    with pytest.raises(ValueError):
        verify_equilibrium(inst, PacingOutcome([1, np.nan, 1], high.fractions, high.prices))


def test_unvalued_good_may_stay_unsold():
    inst = PacingInstance([[1.0, 0.0]], [5.0])
    assert verify_equilibrium(inst, PacingOutcome([1.0], [[1.0, 0.0]], [0.0, 0.0]))


def test_tie_split_respects_budget():
    f = FIX["tie_overspend"]
    eq = f.equilibria[0]
    assert verify_equilibrium(f.instance, eq)
    greedy = PacingOutcome(eq.alphas, [[1, 1], [0, 0]], eq.prices)
    assert not verify_equilibrium(f.instance, greedy)


def test_budget_perturbation_fixtures():
    hi, lo = FIX["budget_1.01"], FIX["budget_0.99"]
    assert hi.equilibria[0].alphas[0] == 1.0
    assert lo.equilibria[0].alphas[0] == pytest.approx(0.01)
    assert objectives(hi.instance, hi.equilibria[0]).revenue == pytest.approx(1.0)


@st.composite
def shifted_case(draw):
    name = draw(st.sampled_from(["revenue_gap", "welfare_gap", "paced_welfare_gap",
                                 "tie_overspend", "budget_0.99", "misreport"]))
    f = FIX[name]
    eq = f.equilibria[draw(st.integers(0, len(f.equilibria) - 1))]
    i = draw(st.integers(0, f.instance.n - 1))
    beta = draw(st.floats(min_value=max(eq.alphas[i], 1e-3), max_value=1.0))
    return f.instance, eq, i, beta


def _shift(inst, eq, i, beta):
    v = np.array(inst.values)
    v[i] *= beta
    a = np.array(eq.alphas)
    a[i] = a[i] / beta
    return inst.with_values(v), PacingOutcome(a, eq.fractions, eq.prices)


@settings(max_examples=60, deadline=None)
@given(shifted_case())
def test_irrelevant_shift_keeps_outcome(case):
    inst, eq, i, beta = case
    inst2, eq2 = _shift(inst, eq, i, beta)
    assert verify_equilibrium(inst2, eq2).accepted
    o1, o2 = objectives(inst, eq), objectives(inst2, eq2)
    assert abs(o1.revenue - o2.revenue) <= 1e-9
    assert abs(o1.paced_welfare - o2.paced_welfare) <= 1e-9 * max(1.0, o1.paced_welfare)
    assert np.allclose(eq.spends, eq2.spends, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_paced_welfare_bounded_by_welfare(seed):
    rng = np.random.default_rng(seed)
    inst = PacingInstance(rng.uniform(0, 1, (3, 4)), [1.0, 1.0, 1.0])
    x = rng.dirichlet(np.ones(3), size=4).T
    a = rng.uniform(0, 1, 3)
    if seed % 3 == 0:
        a[:] = 1.0
    o = objectives(inst, PacingOutcome(a, x, np.zeros(4)))
    assert o.paced_welfare <= o.social_welfare + 1e-12
    if np.all(a == 1.0):
        assert o.paced_welfare == pytest.approx(o.social_welfare, abs=1e-12)


# --- best response ----------------------------------------------------------

def test_cycling_bidder_two_interval():
    inst = FIX["cycling"].instance
    br = best_response(inst, 1, inst.values.copy())
    assert 1300 / 6503 < br.alpha < 0.2
    assert br.contains(0.19995) and not br.contains(0.2) and not br.contains(0.1999)


def test_unlimited_budget_bids_truthfully():
    inst = FIX["cycling"].instance
    assert best_response(inst, 2, inst.values * 0.5).alpha == 1.0


def test_best_response_high_and_low():
    inst = FIX["cycling"].instance
    hi = best_response(inst, 1, inst.values, "high")
    lo = best_response(inst, 1, inst.values, "low")
    assert lo.alpha <= hi.alpha
    assert hi.utility == pytest.approx(lo.utility)


def test_invalid_bidder_index():
    inst = FIX["cycling"].instance
    with pytest.raises((IndexError, ValueError)):
        best_response(inst, 5, inst.values)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_best_response_matches_grid_oracle(seed):
    rng = np.random.default_rng(seed)
    v = np.round(rng.uniform(0.1, 2.0, size=(2, 3)), 3)
    # rival bids sit at grid multiples of the own values so every critical
    # multiplier lies on the oracle's grid
    k = rng.integers(1, 1300, size=3)
    rival = v[0] * k / 1000.0
    budget = float(rng.uniform(0.05, 1.5)) if seed % 4 else np.inf
    inst = PacingInstance(v, [budget, np.inf])
    bids = np.vstack([v[0], rival])
    br = best_response(inst, 0, bids)
    expect = grid_best_utility(v[0], budget, rival)
    assert br.utility == pytest.approx(expect, abs=1e-9)
    u, spend, ok = utility_at(inst, 0, bids, br.alpha)
    assert ok and spend <= budget + 1e-9
    assert u >= br.utility - 1e-9


@pytest.mark.parametrize("name", ["revenue_gap", "welfare_gap", "paced_welfare_gap",
                                  "tie_overspend", "budget_0.99", "misreport"])
def test_equilibrium_multipliers_are_best_responses(name):
    f = FIX[name]
    for eq in f.equilibria:
        bids = eq.bids(f.instance)
        for i in range(f.instance.n):
            br = best_response(f.instance, i, bids)
            u, _, ok = utility_at(f.instance, i, bids, eq.alphas[i])
            assert ok
            assert u >= br.utility - 1e-6


# --- competitive equilibrium ------------------------------------------------

def test_stated_ce_is_accepted():
    f = FIX["ce_lower_rev"]
    assert verify_competitive(f.instance, f.competitive)
    assert f.competitive.prices.sum() == pytest.approx(22)


def test_ce_with_lowered_price_rejected():
    f = FIX["ce_lower_rev"]
    cheap = CompetitiveOutcome([9, 10, 1], f.competitive.fractions)
    v = verify_competitive(f.instance, cheap)
    assert not v.accepted


def test_ce_with_item_one_at_101():
    f = FIX["ce_lower_rev"]
    alt = CompetitiveOutcome([101, 10, 1], f.competitive.fractions)
    assert verify_competitive(f.instance, alt)
    assert float((alt.fractions * alt.prices).sum()) == pytest.approx(112)


def test_empty_market_ce():
    inst = PacingInstance(np.zeros((2, 2)), [1.0, 1.0])
    assert verify_competitive(inst, CompetitiveOutcome([0, 0], np.zeros((2, 2))))


def test_ce_to_pacing_revenue_22():
    f = FIX["ce_lower_rev"]
    aug, out, _ = ce_to_pacing(f.instance, f.competitive)
    assert aug.n == 4 and np.all(out.fractions[-1] == 0) and out.alphas[-1] == 1.0
    assert np.array_equal(aug.values[-1], f.competitive.prices)
    assert verify_equilibrium(aug, out)
    assert objectives(aug, out).revenue == pytest.approx(22, abs=1e-6)


def test_ce_with_zero_prices():
    inst = PacingInstance([[1.0, 0.0], [0.0, 2.0]], [1.0, 1.0])
    ce = CompetitiveOutcome([0, 0], [[1, 0], [0, 1]])
    aug, out, _ = ce_to_pacing(inst, ce)
    assert np.all(aug.values[-1] == 0)
    assert np.array_equal(out.fractions[:2], ce.fractions)
    assert verify_equilibrium(aug, out)


@pytest.mark.parametrize("name", ["revenue_gap", "welfare_gap", "paced_welfare_gap",
                                  "tie_overspend", "single_bidder"])
def test_pe_ce_round_trip(name):
    f = FIX[name]
    for eq in f.equilibria:
        ce = pe_to_ce(f.instance, eq)
        assert verify_competitive(f.instance, ce)
        assert np.allclose(ce.fractions * ce.prices, eq.spends)
        aug, out, _ = ce_to_pacing(f.instance, ce)
        assert verify_equilibrium(aug, out)


def test_pe_to_ce_rejects_non_equilibrium():
    f = FIX["revenue_gap"]
    bad = PacingOutcome([1, 1, 1], f.equilibria[0].fractions, f.equilibria[0].prices)
    with pytest.raises(ValueError):
        pe_to_ce(f.instance, bad)


def test_pareto_probe():
    f = FIX["revenue_gap"]
    for eq in f.equilibria:
        assert pareto_probe(f.instance, eq, trials=1000, seed=1).label == "no-dominating-found"
    single = FIX["single_bidder"]
    assert not pareto_probe(single.instance, single.equilibria[0]).dominated
    # the good goes to the lower-value bidder at the higher bidder's price
    inst = PacingInstance([[2.0], [1.0]], [np.inf, np.inf])
    corrupted = PacingOutcome([1.0, 1.0], [[0.0], [1.0]], [1.0])
    verdict = pareto_probe(inst, corrupted, trials=1000, seed=1)
    assert verdict.dominated and verdict.label == "counterexample"


# --- smoothed game ----------------------------------------------------------

def test_smoothed_single_bidder():
    inst = PacingInstance([[1.0]], [10.0])
    params = SmoothedGameParams.for_instance(inst, 0.1)
    x, s, _ = smoothed_outcome(inst, [1.0], params)
    assert x[0, 0] == pytest.approx(1.0)
    assert s[0, 0] == pytest.approx(0.1)


@pytest.mark.parametrize("eps", [0.1, 0.2, 1 / 3])
def test_smoothed_symmetric_split(eps):
    inst = PacingInstance([[1.0], [1.0]], [10.0, 10.0])
    x, _, _ = smoothed_outcome(inst, [1.0, 1.0], SmoothedGameParams.for_instance(inst, eps))
    assert x[:, 0] == pytest.approx([0.5, 0.5])


def test_smoothed_limit_is_second_price():
    inst = PacingInstance([[1.0]], [10.0])
    prices = []
    for eps in (0.1, 0.01, 0.001):
        x, s, _ = smoothed_outcome(inst, [1.0], SmoothedGameParams.for_instance(inst, eps))
        assert x[0, 0] == pytest.approx(1.0)
        prices.append(s[0, 0])
    assert prices == sorted(prices, reverse=True) and prices[-1] < 2e-3
    assert verify_equilibrium(inst, PacingOutcome([1.0], x, [0.0]))


def test_smoothed_params_validation():
    with pytest.raises(ValueError):
        SmoothedGameParams(0.1, 1.0, 1.0)
    inst = PacingInstance([[1.0]], [1.0])
    with pytest.raises(ValueError):
        smoothed_outcome(inst, [1.5], SmoothedGameParams.for_instance(inst, 0.1))


def test_smoothed_utility_quasiconcave_and_continuous():
    inst = FIX["revenue_gap"].instance
    params = SmoothedGameParams.for_instance(inst, 0.05)
    grid = np.linspace(0, 1, 10_001)
    u = np.array([smoothed_outcome(inst, [a, 0.01, 1.0], params)[2][0] for a in grid])
    tol = 1e-7 * max(1.0, np.abs(u).max())
    peak = int(np.argmax(u))
    assert np.all(np.diff(u[:peak + 1]) >= -tol)
    assert np.all(np.diff(u[peak:]) <= tol)
    for a in (0.1, 0.5, 0.99):
        u0 = smoothed_outcome(inst, [a, 0.01, 1.0], params)[2][0]
        jumps = [abs(smoothed_outcome(inst, [a + h, 0.01, 1.0], params)[2][0] - u0)
                 for h in (1e-3, 1e-5, 1e-7)]
        assert jumps[2] <= jumps[1] <= jumps[0] and jumps[2] < 1e-2
