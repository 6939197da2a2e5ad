import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import random_finite_scenario, random_welfare
from safetymargin.alternatives import Alternative, Discrete, LogNormal, PointMass, Scenario, Uniform
from safetymargin.errors import ConvergenceWarning, EmptyPortfolioError, ParamError, SameAlternativeError
from safetymargin.evaluation import (
    Evaluation,
    Label,
    NegligenceCase,
    Verdict,
    classify_portfolio,
    evaluate_alternative,
    hand_rule,
    margin_of_safety,
    point_slope_bound,
    reliability_premium,
    select_optimal,
)
from safetymargin.montecarlo import EstimationConfig, EstimationMode
from safetymargin.welfare import Family, WelfareFunction, affine_transform

LINEAR = WelfareFunction(Family.LINEAR)


def ev(id, c_good, c_fail, p):
    return Evaluation.from_parts(id, c_good, c_fail, p)


def test_point_mass_decomposition():
    a = Alternative("A", 0.1, PointMass(10.0), PointMass(100.0))
    e = evaluate_alternative(a, LINEAR)
    assert (e.c_good, e.c_fail, e.c_premium) == (10.0, 100.0, 90.0)
    assert e.expected_social_cost == pytest.approx(19.0, abs=1e-12)
    assert e.stderr == 0.0


def test_catastrophe_free_limit():
    a = Alternative("A", 0.0, PointMass(10.0), PointMass(100.0))
    assert evaluate_alternative(a, LINEAR).expected_social_cost == 10.0


def test_lognormal_clean_cost():
    a = Alternative("A", 0.2, LogNormal(2.0, 0.5), PointMass(100.0))
    with pytest.warns(ConvergenceWarning):
        e = evaluate_alternative(a, LINEAR, EstimationConfig(seed=4))
    assert abs(e.c_good - math.exp(2.125)) <= 3 * (e.stderr / 0.8)
    assert e.stderr > 0


def test_stderr_propagation():
    a = Alternative("A", 0.25, Uniform(0.0, 1.0), Uniform(10.0, 20.0))
    cfg = EstimationConfig(max_samples=4000, seed=1)
    with pytest.warns(ConvergenceWarning):
        e = evaluate_alternative(a, LINEAR, cfg)
    # stderr of (1-p) G + p F with independent streams
    g_se = math.sqrt(1 / 12 / 4000)
    f_se = math.sqrt(100 / 12 / 4000)
    assert e.stderr == pytest.approx(math.hypot(0.75 * g_se, 0.25 * f_se), rel=0.1)


def test_decomposition_identity_holds_exactly():
    rng = np.random.default_rng(2)
    for _ in range(200):
        s = random_finite_scenario(rng, random_welfare(rng))
        for e in classify_portfolio(s).evaluations:
            assert e.c_premium == e.c_fail - e.c_good
            assert abs(e.expected_social_cost - (e.c_good + e.c_premium * e.p_cat)) <= 1e-9


def test_select_optimal_by_cost():
    a = ev("A", 10.0, 100.0, 0.1)
    b = ev("B", 15.0, 100.0, 0.01)
    assert a.expected_social_cost == pytest.approx(19.0)
    assert b.expected_social_cost == pytest.approx(15.85)
    assert select_optimal([a, b]) == "B"


def test_select_single():
    assert select_optimal([ev("only", 1.0, 2.0, 0.5)]) == "only"


def test_tie_goes_to_safer_then_id():
    a = Evaluation("A", 0, 0, 0, 0.2, 5.0)
    b = Evaluation("B", 0, 0, 0, 0.1, 5.0)
    c = Evaluation("C", 0, 0, 0, 0.1, 5.0)
    assert select_optimal([a, b]) == "B"
    assert select_optimal([c, a, b]) == "B"


def test_select_empty():
    with pytest.raises(EmptyPortfolioError):
        select_optimal([])


def test_reliability_premium():
    assert reliability_premium(ev("O", 12.0, 50.0, 0.1), ev("R", 10.0, 50.0, 0.1)) == 2.0
    assert reliability_premium(ev("O", 10.0, 50.0, 0.1), ev("R", 12.0, 50.0, 0.1)) == -2.0
    assert reliability_premium(ev("O", 10.0, 50.0, 0.1), ev("R", 10.0, 50.0, 0.1)) == 0.0


def test_margin_of_safety():
    assert margin_of_safety(ev("O", 1, 2, 0.05), ev("R", 1, 2, 0.02)) == pytest.approx(0.03)
    assert margin_of_safety(ev("O", 1, 2, 0.05), ev("R", 1, 2, 0.08)) == pytest.approx(-0.03)
    assert margin_of_safety(ev("O", 1, 2, 0.05), ev("R", 1, 2, 0.05)) == 0.0


@pytest.mark.parametrize("fn", [reliability_premium, margin_of_safety, point_slope_bound])
def test_same_alternative_rejected(fn):
    e = ev("X", 1.0, 2.0, 0.1)
    with pytest.raises(SameAlternativeError):
        fn(e, e)


def test_symmetric_bound_reduces_to_probability_comparison():
    opt = ev("O", 10.0, 60.0, 0.1)
    for p, ok in ((0.2, True), (0.1, True), (0.05, False)):
        check = point_slope_bound(opt, ev("R", 10.0, 60.0, p))
        assert (check.slope, check.intercept) == (1.0, 0.0)
        assert check.satisfied is ok and not check.degenerate


def test_bound_degenerate_premiums():
    zero = point_slope_bound(ev("O", 10.0, 10.0, 0.1), ev("R", 5.0, 50.0, 0.1))
    assert zero.degenerate and not zero.satisfied
    negative = point_slope_bound(ev("O", 10.0, 4.0, 0.1), ev("R", 5.0, 50.0, 0.1))
    assert negative.degenerate and not negative.satisfied
    assert negative.slope == pytest.approx(45.0 / -6.0)


def test_bound_matches_direct_inequality():
    # the rearranged bound agrees with the un-rearranged comparison for positive premiums
    rng = np.random.default_rng(8)
    for _ in range(1000):
        g = rng.uniform(0, 100, 2)
        f = g + rng.uniform(1, 500, 2)
        p = rng.uniform(0, 1, 2)
        opt, riv = ev("O", g[0], f[0], p[0]), ev("R", g[1], f[1], p[1])
        direct = opt.c_good + opt.c_premium * opt.p_cat <= riv.c_good + riv.c_premium * riv.p_cat
        gap = abs(opt.expected_social_cost - riv.expected_social_cost)
        if gap > 1e-6:
            assert point_slope_bound(opt, riv).satisfied == direct


def test_classify_one_alternative():
    s = Scenario((Alternative("solo", 0.3, PointMass(1.0), PointMass(2.0)),))
    pa = classify_portfolio(s)
    assert pa.optimal_id == "solo"
    assert pa.labels == {"solo": Label.SOCIALLY_OPTIMAL}
    assert pa.margins == {"solo": 0.0}
    assert pa.reliability_premiums == {} and pa.bound_checks == ()


def test_classify_safer_costlier_rival_is_super_optimal():
    cheap = Alternative("cheap", 0.2, PointMass(10.0), PointMass(20.0))
    safe = Alternative("safe", 0.05, PointMass(50.0), PointMass(60.0))
    pa = classify_portfolio(Scenario((cheap, safe)))
    assert pa.optimal_id == "cheap"
    assert pa.labels["safe"] is Label.SUPER_OPTIMAL
    assert pa.margins["safe"] == pytest.approx(0.15)
    assert pa.reliability_premiums["safe"] == -40.0


def test_classify_parallel_matches_sequential():
    alts = tuple(
        Alternative(f"a{i}", 0.01 * (i + 1), LogNormal(2.0 + 0.1 * i, 0.3), Uniform(100.0, 200.0 + i)) for i in range(6)
    )
    s = Scenario(alts, seed=5, samples_per_alternative=5000)
    with pytest.warns(ConvergenceWarning):
        seq = classify_portfolio(s)
    with pytest.warns(ConvergenceWarning):
        par = classify_portfolio(s, workers=4)
    assert seq == par


def test_forced_monte_carlo_close_to_exact():
    alt = Alternative("A", 0.3, Discrete((10.0, 30.0), (0.5, 0.5)), PointMass(100.0))
    exact = evaluate_alternative(alt, LINEAR)
    cfg = EstimationConfig(mode=EstimationMode.FORCE_MONTE_CARLO, seed=2)
    with pytest.warns(ConvergenceWarning):
        mc = evaluate_alternative(alt, LINEAR, cfg)
    assert abs(mc.expected_social_cost - exact.expected_social_cost) <= 4 * mc.stderr


def _check_analysis(pa):
    opt = pa.optimal
    assert pa.count(Label.SOCIALLY_OPTIMAL) == 1
    for e in pa.evaluations:
        assert e.expected_social_cost >= opt.expected_social_cost - 1e-9
        if e.id == pa.optimal_id:
            continue
        assert (pa.labels[e.id] is Label.SUPER_OPTIMAL) == (e.p_cat < opt.p_cat)
        assert (pa.margins[e.id] > 0) == (pa.labels[e.id] is Label.SUPER_OPTIMAL)


@given(seed=st.integers(0, 2**32 - 1))
def test_portfolio_invariants(seed):
    rng = np.random.default_rng(seed)
    _check_analysis(classify_portfolio(random_finite_scenario(rng, random_welfare(rng))))


@given(seed=st.integers(0, 2**32 - 1))
def test_optimum_satisfies_every_bound(seed):
    rng = np.random.default_rng(seed)
    pa = classify_portfolio(random_finite_scenario(rng, random_welfare(rng), positive_premium=True))
    assert all(c.satisfied and not c.degenerate for c in pa.bound_checks)


@given(
    seed=st.integers(0, 2**32 - 1),
    scale=st.floats(1e-2, 1e3),
    shift=st.floats(-1e3, 1e3),
)
def test_selection_affine_invariant(seed, scale, shift):
    rng = np.random.default_rng(seed)
    w = random_welfare(rng)
    s = random_finite_scenario(rng, w)
    moved = Scenario(s.alternatives, affine_transform(w, scale, shift), s.seed)
    assert classify_portfolio(s).optimal_id == classify_portfolio(moved).optimal_id


def test_hand_rule_cases():
    assert hand_rule(NegligenceCase(560.0, 0.001, 7e9)) is Verdict.NEGLIGENT
    assert hand_rule(NegligenceCase(100.0, 0.1, 1000.0)) is Verdict.NOT_NEGLIGENT
    assert hand_rule(NegligenceCase(0.0, 0.0, 1e12)) is Verdict.NOT_NEGLIGENT


@given(
    p=st.floats(0.0, 1.0),
    loss=st.floats(0.0, 1e9),
    burdens=st.lists(st.floats(0.0, 2e9), min_size=2, max_size=20),
)
def test_hand_rule_single_flip(p, loss, burdens):
    verdicts = [hand_rule(NegligenceCase(b, p, loss)) for b in sorted(burdens)]
    flips = sum(1 for x, y in zip(verdicts, verdicts[1:]) if x != y)
    assert flips <= 1
    if flips:
        assert verdicts[0] is Verdict.NEGLIGENT
    assert hand_rule(NegligenceCase(p * loss, p, loss)) is Verdict.NOT_NEGLIGENT


@pytest.mark.parametrize("args", [(-1.0, 0.1, 1.0), (1.0, 1.5, 1.0), (1.0, 0.1, -5.0), (math.nan, 0.1, 1.0)])
def test_negligence_case_bounds(args):
    with pytest.raises(ParamError):
        NegligenceCase(*args)
