import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from convexprice.distribution import MixtureComponent, MixtureOfUniforms, Uniform01
from convexprice.errors import InputFormatError, OutOfDomain, OutOfRangePrice
from convexprice.frontier import upper_frontier
from convexprice.market_model import NormalizationConfig, RawListing
from convexprice.oracle import price_grid_oracle
from convexprice.pricing import (
    CompetitorInterval,
    IntervalKind,
    PricingProblem,
    build_problem,
    competitor_intervals,
    edge_intersections,
    golden_section_max,
    insert_focal,
    optimize_interval,
    optimize_price,
    profit_curve,
    share_at_price,
)
from tests.helpers import market_of, random_market


@pytest.fixture
def two_competitors(symmetric_pair):
    return PricingProblem(symmetric_pair, 0.5, 1.0, Uniform01())


@pytest.fixture
def single_competitor():
    return PricingProblem(market_of(("V", 0.5, 0.5)), 1.0, 1.0, Uniform01())


def test_edge_intersections(symmetric_pair):
    frontier = upper_frontier(symmetric_pair)
    assert edge_intersections(frontier, 0.5) == pytest.approx([0.5])
    assert edge_intersections(upper_frontier(market_of(("V", 1.0, 0.5))), 0.3) == []
    assert edge_intersections(None, 0.5) == []


def test_edge_intersections_include_dominance_onsets():
    frontier = upper_frontier(market_of(("V", 0.5, 0.5)))
    assert edge_intersections(frontier, 1.0) == pytest.approx([0.5])
    assert edge_intersections(frontier, 0.3) == pytest.approx([0.5])


def test_two_competitor_intervals(two_competitors):
    intervals = two_competitors.intervals
    assert len(intervals) == 2
    below, above = intervals
    assert below.kind is IntervalKind.INTERIOR
    assert (below.p_lo, below.p_hi) == pytest.approx((0.0, 0.5))
    assert above.kind is IntervalKind.ACTIVE
    assert (above.left.id, above.right.id) == ("A", "B")
    assert above.p_hi == 1.0
    assert intervals.breakpoints == pytest.approx([0.5])
    for p in (0.3, 0.7):
        placement = insert_focal(intervals.frontier, p, 0.5)
        interval = intervals[intervals.locate(p)]
        assert placement.on_frontier is (interval.kind is IntervalKind.ACTIVE)


def test_single_competitor_intervals(single_competitor):
    first, second = single_competitor.intervals
    assert first.kind is IntervalKind.ACTIVE
    assert first.left is None and first.right.id == "V"
    assert first.p_hi == pytest.approx(0.5)
    assert second.monopoly
    assert not first.monopoly


def test_empty_market_is_one_monopoly_interval():
    (only,) = competitor_intervals(None, 0.7)
    assert (only.p_lo, only.p_hi) == (0.0, 1.0)
    assert only.monopoly
    assert only.contains(1.0) and not only.contains(0.0)


def test_share_at_price(two_competitors, single_competitor):
    intervals = two_competitors.intervals
    assert share_at_price(2 ** -0.5, intervals, Uniform01()) == pytest.approx(0.26667, abs=1e-4)
    assert share_at_price(0.3, intervals, Uniform01()) == 0.0
    assert share_at_price(0.9, single_competitor.intervals, Uniform01()) == 1.0
    assert share_at_price(0.25, single_competitor.intervals, Uniform01()) == pytest.approx(0.5)
    # exactly on the dominance boundary the focal seller wins the tie
    assert share_at_price(0.5, single_competitor.intervals, Uniform01()) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("p", [0.0, -0.1, 1.5])
def test_share_at_price_range(two_competitors, p):
    with pytest.raises(OutOfRangePrice):
        share_at_price(p, two_competitors.intervals, Uniform01())


def test_insert_focal_ties():
    frontier = upper_frontier(market_of(("A", 0.25, 1.0), ("B", 1.0, 0.25)))
    same_point = insert_focal(frontier, 0.25, 1.0)
    assert same_point.on_frontier
    assert same_point.left is None and same_point.right.id == "B"

    same_price = insert_focal(frontier, 1.0, 0.5)
    assert same_price.on_frontier
    assert same_price.left.id == "A" and same_price.right is None

    assert not insert_focal(frontier, 0.2, 0.9).on_frontier
    assert insert_focal(None, 0.2, 0.9).on_frontier


def test_insert_focal_on_a_chord_counts_as_frontier():
    frontier = upper_frontier(market_of(("A", 0.25, 1.0), ("B", 1.0, 0.25)))
    placement = insert_focal(frontier, 0.5, 0.5)
    assert placement.on_frontier
    assert (placement.left.id, placement.right.id) == ("A", "B")


def test_optimize_interval_conventions(single_competitor):
    interior = CompetitorInterval(0.1, 0.4, None, None, IntervalKind.INTERIOR)
    assert optimize_interval(interior, single_competitor) == (0.4, 0.0)

    monopoly = single_competitor.intervals[1]
    p, profit = optimize_interval(monopoly, single_competitor)
    assert p == pytest.approx(0.5)
    assert profit == pytest.approx(0.5)

    first = single_competitor.intervals[0]
    p, profit = optimize_interval(first, single_competitor)
    assert p == pytest.approx(0.5, abs=1e-6)
    assert profit == pytest.approx(0.5, abs=1e-6)


def test_interior_interval_below_the_price_floor_is_never_chosen(symmetric_pair):
    # every admissible price loses money, so an interior interval under the floor must not win with 0.0
    problem = PricingProblem(symmetric_pair, 0.5, 0.1, Uniform01(), p_min_admissible=0.6)
    below, above = problem.intervals[0], problem.intervals[1]
    assert below.kind is IntervalKind.INTERIOR and below.p_hi < 0.6
    assert above.kind is IntervalKind.ACTIVE
    assert optimize_interval(below, problem)[1] == -math.inf

    solution = optimize_price(problem)
    assert solution.p_star >= 0.6
    assert solution.profit <= 0.0


def test_single_competitor_optimum(single_competitor):
    solution = optimize_price(single_competitor)
    assert solution.p_star == pytest.approx(0.5, abs=1e-9)
    assert solution.profit == pytest.approx(0.5, abs=1e-9)
    assert solution.share == pytest.approx(1.0, abs=1e-6)
    assert solution.interval_index == 0
    assert solution.curve is None


def test_profit_just_below_the_optimum_is_smaller(single_competitor):
    intervals = single_competitor.intervals
    assert (1.0 - 0.25) * share_at_price(0.25, intervals, Uniform01()) == pytest.approx(0.375)
    assert (1.0 - 0.49) * share_at_price(0.49, intervals, Uniform01()) < 0.5


def test_two_competitor_optimum_matches_dense_grid(two_competitors):
    solution = optimize_price(two_competitors)
    grid_p, grid_profit = price_grid_oracle(two_competitors, 100001)
    assert 0.5 < solution.p_star <= 1.0
    assert solution.profit >= grid_profit - 1e-6
    assert solution.profit == pytest.approx(grid_profit, abs=1e-6)
    assert solution.interval.left.id == "A"


def test_monopoly_prices_at_the_floor():
    problem = PricingProblem(None, 1.0, 1.0, Uniform01())
    solution = optimize_price(problem)
    assert solution.p_star == pytest.approx(1e-6)
    assert solution.profit == pytest.approx(1.0, abs=1e-5)
    assert solution.share == 1.0


def test_profit_curve(two_competitors):
    solution = optimize_price(two_competitors, curve_points=101)
    assert len(solution.curve) == 101
    assert solution.curve[0][0] == pytest.approx(1e-6)
    assert solution.curve[-1][0] == 1.0
    assert all(profit <= solution.profit + 1e-12 for _, _, profit in solution.curve)
    assert profit_curve(two_competitors, 101) == solution.curve


def test_golden_section_max():
    p, value = golden_section_max(lambda x: -((x - 0.3) ** 2), 0.0, 1.0)
    assert p == pytest.approx(0.3, abs=1e-8)
    assert value == pytest.approx(0.0, abs=1e-15)


def test_problem_validation(symmetric_pair):
    with pytest.raises(OutOfDomain):
        PricingProblem(symmetric_pair, 0.0, 1.0, Uniform01())
    with pytest.raises(OutOfDomain):
        PricingProblem(symmetric_pair, 0.5, -1.0, Uniform01())


def test_build_problem_normalizes_around_the_focal_seller():
    listings = [RawListing("a", 10.0, 4.0), RawListing("b", 20.0, 2.0), RawListing("me", 15.0, 8.0)]
    problem = build_problem(listings, None, NormalizationConfig(), 1.0, Uniform01(), focal_id="me")
    assert problem.competitors.ids() == ["a", "b"]
    assert problem.competitors.get("a").p == 1.0
    assert problem.competitors.get("b").p == 0.5
    assert problem.competitors.get("a").r == 0.5
    assert problem.r_i == 1.0

    explicit = build_problem(listings[:2], 2.0, NormalizationConfig(), 1.0, Uniform01())
    assert explicit.r_i == 0.5


def test_build_problem_needs_a_reputation():
    with pytest.raises(InputFormatError):
        build_problem([RawListing("a", 1.0, 1.0)], None, NormalizationConfig(), 1.0, Uniform01())


def test_build_problem_without_competitors():
    problem = build_problem([RawListing("me", 3.0, 2.0)], None, NormalizationConfig(), 1.0, Uniform01(), focal_id="me")
    assert problem.competitors is None
    assert problem.r_i == 1.0


@st.composite
def pricing_problems(draw):
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    rng = np.random.default_rng(seed)
    market = random_market(rng, int(rng.integers(1, 12)))
    r_i = float(rng.uniform(0.01, 1.0))
    if rng.random() < 0.5:
        cdf = Uniform01()
    else:
        cuts = np.sort(rng.uniform(0.0, 1.0, 2))
        weights = rng.uniform(0.1, 1.0, 3)
        weights = weights / weights.sum()
        edges = [0.0, float(cuts[0]), float(cuts[1]), 1.0]
        components = [
            MixtureComponent(lo=lo, hi=hi, weight=float(w))
            for lo, hi, w in zip(edges, edges[1:], weights)
            if hi > lo
        ]
        total = sum(c.weight for c in components)
        components = [MixtureComponent(lo=c.lo, hi=c.hi, weight=c.weight / total) for c in components]
        cdf = MixtureOfUniforms(components=tuple(components))
    return PricingProblem(market, r_i, float(rng.uniform(0.5, 2.0)), cdf)


@settings(max_examples=50, deadline=None)
@given(pricing_problems(), st.floats(min_value=0.05, max_value=0.95))
def test_interval_competitors_are_constant(problem, t):
    for interval in problem.intervals:
        p = interval.p_lo + t * (interval.p_hi - interval.p_lo)
        if not interval.p_lo < p < interval.p_hi:
            continue
        placement = insert_focal(problem.frontier, p, problem.r_i)
        assert placement.on_frontier is (interval.kind is IntervalKind.ACTIVE)
        if placement.on_frontier:
            assert placement.left == interval.left
            assert placement.right == interval.right


@settings(max_examples=30, deadline=None)
@given(pricing_problems(), st.floats(min_value=0.0, max_value=0.5))
def test_larger_ceiling_never_lowers_profit_by_more_than_the_raise(problem, delta):
    raised = PricingProblem(problem.competitors, problem.r_i, problem.ceiling + delta, problem.cdf)
    before = optimize_price(problem).profit
    after = optimize_price(raised).profit
    assert before - 1e-7 <= after <= before + delta + 1e-7


def test_breakpoints_are_sorted_and_inside_unit_interval(rng):
    for _ in range(20):
        market = random_market(rng, 15)
        bps = edge_intersections(upper_frontier(market), float(rng.uniform(0.01, 1.0)))
        assert bps == sorted(set(bps))
        assert all(0.0 < p < 1.0 for p in bps)
        assert all(math.isfinite(p) for p in bps)
