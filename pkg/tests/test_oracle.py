import numpy as np
import pytest
from pydantic import ValidationError

from convexprice.distribution import UniformInterval
from convexprice.errors import EmptyMarket
from convexprice.oracle import (
    CheckResult,
    SuiteReport,
    SweepConfig,
    choose_at_alpha,
    focal_shares,
    frontier_bruteforce,
    grid_choices,
    price_grid_oracle,
    run_oracle_suite,
    sweep_shares,
)
from convexprice.pricing import PricingProblem, share_at_price
from tests.helpers import market_of


@pytest.mark.parametrize("alpha, expected", [(0.0, "A"), (0.3, "A"), (0.5, "M"), (0.7, "B"), (1.0, "B")])
def test_choose_at_alpha(three_vertex, alpha, expected):
    assert choose_at_alpha(alpha, three_vertex) == expected


def test_choose_at_alpha_ties(symmetric_pair):
    # equal utilities at alpha = 0.5: the higher reputation wins
    assert choose_at_alpha(0.5, symmetric_pair) == "A"
    twins = market_of(("b", 0.5, 0.5), ("a", 0.5, 0.5))
    assert choose_at_alpha(0.2, twins) == "a"


def test_choose_at_alpha_never_picks_interior(interior_market):
    assert {choose_at_alpha(alpha, interior_market) for alpha in np.linspace(0.0, 1.0, 101)} == {"A", "C"}


def test_choose_from_nothing():
    with pytest.raises(EmptyMarket):
        choose_at_alpha(0.5, None)


def test_sweep_config_validation():
    assert SweepConfig().grid_points == 10001
    with pytest.raises(ValidationError):
        SweepConfig(grid_points=1)


def test_sweep_shares_three_vertex(three_vertex, uniform):
    shares = sweep_shares(three_vertex, uniform)
    assert shares["A"] == pytest.approx(0.42428, abs=2e-4)
    assert shares["M"] == pytest.approx(0.13383, abs=2e-4)
    assert shares["B"] == pytest.approx(0.44188, abs=2e-4)
    assert sum(shares.values()) == pytest.approx(1.0, abs=1e-12)


def test_sweep_shares_symmetric_and_single(symmetric_pair, uniform):
    shares = sweep_shares(symmetric_pair, uniform)
    assert shares == pytest.approx({"A": 0.5, "B": 0.5}, abs=1e-4)
    assert sweep_shares(market_of(("solo", 0.3, 0.3)), uniform) == {"solo": 1.0}


def test_sweep_shares_interior_gets_nothing(interior_market):
    shares = sweep_shares(interior_market, UniformInterval(lo=0.2, hi=0.8), SweepConfig(grid_points=501))
    assert shares["X"] == 0.0
    assert shares["A"] + shares["C"] == pytest.approx(1.0)


def test_grid_choices(three_vertex):
    alphas, ids = grid_choices(three_vertex, SweepConfig(grid_points=11))
    assert alphas.tolist() == pytest.approx([i / 10 for i in range(11)])
    assert ids[0] == "A" and ids[5] == "M" and ids[-1] == "B"


def test_frontier_bruteforce(three_vertex, interior_market):
    assert frontier_bruteforce(three_vertex) == {"A", "M", "B"}
    assert frontier_bruteforce(interior_market) == {"A", "C"}


def test_focal_shares_match_share_at_price(symmetric_pair, uniform, rng):
    problem = PricingProblem(symmetric_pair, 0.5, 1.0, uniform)
    prices = np.sort(rng.uniform(0.01, 1.0, 200))
    brute = focal_shares(problem, prices)
    analytic = [share_at_price(float(p), problem.intervals, uniform) for p in prices]
    np.testing.assert_allclose(brute, analytic, atol=1e-9)


def test_focal_shares_without_competitors(uniform):
    problem = PricingProblem(None, 0.4, 1.0, uniform)
    assert focal_shares(problem, np.array([0.1, 0.5, 1.0])).tolist() == [1.0, 1.0, 1.0]


def test_price_grid_oracle(uniform):
    monopoly = PricingProblem(None, 1.0, 1.0, uniform)
    p, profit = price_grid_oracle(monopoly, 1001)
    assert p == pytest.approx(1e-6)
    assert profit == pytest.approx(1.0 - 1e-6)

    single = PricingProblem(market_of(("V", 0.5, 0.5)), 1.0, 1.0, uniform)
    p, profit = price_grid_oracle(single, 100001)
    assert p == pytest.approx(0.5, abs=1e-4)
    assert profit == pytest.approx(0.5, abs=1e-4)

    with pytest.raises(ValueError):
        price_grid_oracle(single, 1)


def test_run_oracle_suite_passes(three_vertex, symmetric_pair, uniform):
    report = run_oracle_suite(three_vertex, uniform, cfg=SweepConfig(grid_points=2001))
    assert report.passed
    assert [check.name for check in report.checks] == [
        "frontier_builders_agree",
        "frontier_bruteforce",
        "interior_never_chosen",
        "shares_sum_to_one",
        "sweep_shares",
    ]

    problem = PricingProblem(symmetric_pair, 0.5, 1.0, uniform)
    report = run_oracle_suite(symmetric_pair, uniform, problem, SweepConfig(grid_points=2001), 20001)
    assert report.passed, report.failures()
    assert {"optimizer_dominates_grid", "price_share_agreement"} <= {check.name for check in report.checks}


def test_suite_report_failures():
    report = SuiteReport((CheckResult("ok", True, ""), CheckResult("broken", False, "off by one")))
    assert not report.passed
    assert [check.name for check in report.failures()] == ["broken"]
