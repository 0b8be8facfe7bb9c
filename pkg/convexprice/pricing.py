"""Profit-maximizing price for a focal seller with fixed reputation.

As the focal seller's normalized price p moves along the line ln r = ln r_i,
its neighbours on the market frontier (its key competitors) only change at a
finite set of breakpoints: crossings of frontier edge lines, and the prices
at which the focal point starts to dominate a competitor. Between two
breakpoints the market share is a smooth function of p, so the objective
``(C - p) * share(p)`` is maximized interval by interval and the best
interval optimum wins.
"""

from __future__ import annotations

import bisect
import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterator, Optional, Sequence

import numpy as np

from convexprice.distribution import PreferenceCdf
from convexprice.errors import InputFormatError, OutOfDomain, OutOfRangePrice
from convexprice.frontier import Frontier, upper_frontier
from convexprice.logs import get_logger
from convexprice.market_model import (
    MarketSnapshot,
    NormalizationConfig,
    NormalizedItem,
    RawListing,
    check_listings,
    normalize_prices,
    normalize_reputations,
)
from convexprice.preference import alpha_of_k, alpha_of_k_array

log = get_logger(__name__)

P_MIN_ADMISSIBLE = 1e-6
GRID_POINTS = 1024
REFINE_TOL = 1e-9
REFINE_CANDIDATES = 4
BOUND_RTOL = 1e-12

INV_PHI = (math.sqrt(5) - 1) / 2
INV_PHI_SQUARE = (3 - math.sqrt(5)) / 2


@dataclass(frozen=True)
class PricingProblem:
    """Everything the optimizer needs; ``competitors`` is ``None`` for an empty market."""

    competitors: Optional[MarketSnapshot]
    r_i: float
    ceiling: float
    cdf: PreferenceCdf
    p_min_admissible: float = P_MIN_ADMISSIBLE

    def __post_init__(self) -> None:
        if not 0.0 < self.r_i <= 1.0:
            raise OutOfDomain(f"focal reputation r_i={self.r_i} is outside (0, 1]")
        if not self.ceiling > 0.0:
            raise OutOfDomain(f"profit ceiling C={self.ceiling} must be > 0")
        if not 0.0 < self.p_min_admissible < 1.0:
            raise OutOfDomain(f"p_min_admissible={self.p_min_admissible} must lie in (0, 1)")

    @cached_property
    def frontier(self) -> Optional[Frontier]:
        return upper_frontier(self.competitors) if self.competitors is not None else None

    @cached_property
    def intervals(self) -> "PriceIntervals":
        return competitor_intervals(self.frontier, self.r_i)


def build_problem(
    listings: Sequence[RawListing],
    focal_reputation: Optional[float],
    config: NormalizationConfig,
    ceiling: float,
    cdf: PreferenceCdf,
    focal_id: Optional[str] = None,
    p_min_admissible: float = P_MIN_ADMISSIBLE,
) -> PricingProblem:
    """Assemble a problem from raw competitor listings.

    The focal seller is dropped from ``listings`` when ``focal_id`` is given;
    its reputation is then read from its row unless ``focal_reputation`` is
    set. Competitor prices are normalized among the competitors only, since
    the focal price is the unknown; reputations are normalized together with
    the focal seller's.
    """
    focal_rows = [listing for listing in listings if focal_id is not None and listing.id == focal_id]
    competitors = [listing for listing in listings if focal_id is None or listing.id != focal_id]
    if focal_reputation is None:
        if not focal_rows:
            raise InputFormatError("focal reputation is required (give --rep or a focal id present in the listings)")
        focal_reputation = focal_rows[0].reputation

    floor_rule = config.reputation_rule == "minmax_with_floor"
    if not (focal_reputation >= 0.0 if floor_rule else focal_reputation > 0.0):
        raise OutOfDomain(f"focal reputation {focal_reputation} is not admissible")

    if not competitors:
        return PricingProblem(None, 1.0, ceiling, cdf, p_min_admissible)

    check_listings(competitors, config)
    p = normalize_prices([listing.price for listing in competitors], config)
    r = normalize_reputations([listing.reputation for listing in competitors] + [focal_reputation], config)
    items = tuple(NormalizedItem.create(listing.id, pi, ri) for listing, pi, ri in zip(competitors, p, r))
    return PricingProblem(MarketSnapshot(items), float(r[-1]), ceiling, cdf, p_min_admissible)


@dataclass(frozen=True)
class Placement:
    """Where the focal point lands when inserted into the competitor frontier."""

    on_frontier: bool
    left: Optional[NormalizedItem] = None
    right: Optional[NormalizedItem] = None


def insert_focal(frontier: Optional[Frontier], p: float, r_i: float) -> Placement:
    """Direct hull insertion of the focal point ``(p, r_i)``.

    The focal seller wins exact ties: an identical competitor point, or one
    with equal price and lower reputation, is dropped. A focal point lying on
    a frontier chord counts as on the frontier.
    """
    if frontier is None:
        return Placement(True)
    x, y = math.log(p), math.log(r_i)
    vertices = frontier.vertices
    xs = [vertex.ln_p for vertex in vertices]

    first_right = bisect.bisect_left(xs, x)
    if first_right < len(vertices):
        vertex = vertices[first_right]
        if vertex.ln_r >= y and not (vertex.ln_p == x and vertex.ln_r == y):
            return Placement(False)
        if vertex.ln_p == x:
            first_right += 1

    left = None
    best = math.inf
    for vertex in vertices[: bisect.bisect_left(xs, x)]:
        if vertex.ln_r <= y:
            break
        k = (y - vertex.ln_r) / (x - vertex.ln_p)
        if k < best:
            left, best = vertex, k

    right = None
    best_right = -math.inf
    for vertex in reversed(vertices[first_right:]):
        k = (vertex.ln_r - y) / (vertex.ln_p - x)
        if k > best_right:
            right, best_right = vertex, k

    if left is not None and right is not None and best < best_right:
        return Placement(False)
    return Placement(True, left, right)


class IntervalKind(str, enum.Enum):
    INTERIOR = "interior"
    ACTIVE = "active"


@dataclass(frozen=True)
class CompetitorInterval:
    """Prices ``p_lo < p <= p_hi`` over which the key competitors stay fixed."""

    p_lo: float
    p_hi: float
    left: Optional[NormalizedItem]
    right: Optional[NormalizedItem]
    kind: IntervalKind

    @property
    def monopoly(self) -> bool:
        return self.kind is IntervalKind.ACTIVE and self.left is None and self.right is None

    def contains(self, p: float) -> bool:
        return self.p_lo < p <= self.p_hi

    def signature(self) -> tuple:
        return (
            self.kind,
            self.left.id if self.left is not None else None,
            self.right.id if self.right is not None else None,
        )


@dataclass(frozen=True)
class PriceIntervals:
    """Tiling of (0, 1] into competitor intervals, with the frontier it came from."""

    intervals: tuple[CompetitorInterval, ...]
    frontier: Optional[Frontier]
    r_i: float
    _upper: list = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_upper", [interval.p_hi for interval in self.intervals])

    def __len__(self) -> int:
        return len(self.intervals)

    def __iter__(self) -> Iterator[CompetitorInterval]:
        return iter(self.intervals)

    def __getitem__(self, index: int) -> CompetitorInterval:
        return self.intervals[index]

    @property
    def breakpoints(self) -> list[float]:
        return self._upper[:-1]

    def locate(self, p: float) -> int:
        if not 0.0 < p <= 1.0:
            raise OutOfRangePrice(f"price {p} is outside (0, 1]")
        return bisect.bisect_left(self._upper, p)


def edge_intersections(frontier: Optional[Frontier], r_i: float) -> list[float]:
    """Candidate breakpoint prices in (0, 1), ascending and deduplicated.

    Contains the crossings of every frontier edge line with ln r = ln r_i,
    the prices where the focal point starts to dominate a competitor vertex,
    and the price of the rightmost vertex when the focal point passes below it.
    """
    if frontier is None:
        return []
    y = math.log(r_i)
    vertices = frontier.vertices
    crossings = [
        a.ln_p + (y - a.ln_r) / k for a, k in zip(vertices, frontier.edge_slopes)
    ]
    crossings += [vertex.ln_p for vertex in vertices if vertex.ln_r <= y]
    if y < vertices[-1].ln_r:
        crossings.append(vertices[-1].ln_p)
    prices = {math.exp(x) for x in crossings if x < 0.0}
    return sorted(p for p in prices if 0.0 < p < 1.0)


def competitor_intervals(frontier: Optional[Frontier], r_i: float) -> PriceIntervals:
    """Split (0, 1] at the breakpoints and name the key competitors of each piece.

    Each piece is classified by inserting its midpoint into the frontier;
    neighbouring pieces with identical competitors are merged.
    """
    bounds = [0.0] + edge_intersections(frontier, r_i) + [1.0]
    merged: list[CompetitorInterval] = []
    for lo, hi in zip(bounds, bounds[1:]):
        placement = insert_focal(frontier, 0.5 * (lo + hi), r_i)
        kind = IntervalKind.ACTIVE if placement.on_frontier else IntervalKind.INTERIOR
        interval = CompetitorInterval(lo, hi, placement.left, placement.right, kind)
        if merged and merged[-1].signature() == interval.signature():
            previous = merged.pop()
            interval = CompetitorInterval(previous.p_lo, hi, previous.left, previous.right, kind)
        merged.append(interval)
    log.debug("competitor_intervals", count=len(merged), breakpoints=len(bounds) - 2)
    return PriceIntervals(tuple(merged), frontier, r_i)


def _placement_share(placement: Placement, p: float, r_i: float, cdf: PreferenceCdf) -> float:
    if not placement.on_frontier:
        return 0.0
    x, y = math.log(p), math.log(r_i)
    lo = 0.0 if placement.left is None else alpha_of_k((y - placement.left.ln_r) / (x - placement.left.ln_p))
    hi = 1.0 if placement.right is None else alpha_of_k((placement.right.ln_r - y) / (placement.right.ln_p - x))
    return max(float(cdf.evaluate(hi)) - float(cdf.evaluate(lo)), 0.0)


def share_at_price(p: float, intervals: PriceIntervals, cdf: PreferenceCdf) -> float:
    """Market share of the focal seller at normalized price ``p``.

    Inside an interval the declared competitors are used; at (or within
    rounding of) an interval bound the point is inserted into the frontier
    directly.

    Raises:
        OutOfRangePrice: ``p`` outside (0, 1].
    """
    interval = intervals[intervals.locate(p)]
    margin = BOUND_RTOL * p
    if interval.p_lo + margin < p < interval.p_hi - margin:
        placement = Placement(interval.kind is IntervalKind.ACTIVE, interval.left, interval.right)
    else:
        placement = insert_focal(intervals.frontier, p, intervals.r_i)
    return _placement_share(placement, p, intervals.r_i, cdf)


def _interval_shares(interval: CompetitorInterval, p: np.ndarray, r_i: float, cdf: PreferenceCdf) -> np.ndarray:
    """Vectorized share for prices strictly inside an Active interval."""
    x, y = np.log(p), math.log(r_i)
    left, right = interval.left, interval.right
    with np.errstate(divide="ignore", invalid="ignore"):
        lo = 0.0 if left is None else alpha_of_k_array((y - left.ln_r) / (x - left.ln_p))
        hi = 1.0 if right is None else alpha_of_k_array((right.ln_r - y) / (right.ln_p - x))
    share = np.asarray(cdf.evaluate(hi)) - np.asarray(cdf.evaluate(lo))
    return np.maximum(np.broadcast_to(share, p.shape), 0.0)


def golden_section_max(f: Callable[[float], float], a: float, b: float, tol: float = REFINE_TOL) -> tuple[float, float]:
    """Golden-section search for a maximum of ``f`` on (a, b).

    Returns the best evaluated point and its value. Only interior points
    are evaluated. Ties move towards ``a``.
    """
    h = b - a
    if h <= tol:
        m = 0.5 * (a + b)
        return m, f(m)
    steps = int(math.ceil(math.log(tol / h) / math.log(INV_PHI)))
    c = a + INV_PHI_SQUARE * h
    d = a + INV_PHI * h
    yc, yd = f(c), f(d)
    for _ in range(steps - 1):
        if yc >= yd:
            b, d, yd = d, c, yc
            h *= INV_PHI
            c = a + INV_PHI_SQUARE * h
            yc = f(c)
        else:
            a, c, yc = c, d, yd
            h *= INV_PHI
            d = a + INV_PHI * h
            yd = f(d)
    return (c, yc) if yc >= yd else (d, yd)


def _better(candidate: tuple[float, float], best: Optional[tuple[float, float]]) -> bool:
    p, profit = candidate
    return best is None or profit > best[1] or (profit == best[1] and p < best[0])


def optimize_interval(interval: CompetitorInterval, problem: PricingProblem) -> tuple[float, float]:
    """Best ``(p, profit)`` over the closed interval ``[p_lo, p_hi]``.

    A uniform grid locates the promising cells, golden-section search
    refines the best few. Interior intervals sell nothing and report
    ``(p_hi, 0.0)``; an interval lying wholly below the admissible price
    floor reports a profit of ``-inf``.
    """
    lo = max(interval.p_lo, problem.p_min_admissible)
    hi = interval.p_hi
    if hi < lo:
        return hi, -math.inf
    if interval.kind is IntervalKind.INTERIOR:
        return hi, 0.0

    ceiling, r_i, cdf = problem.ceiling, problem.r_i, problem.cdf
    intervals = problem.intervals

    def at_bound(p: float) -> float:
        placement = insert_focal(intervals.frontier, p, r_i)
        return (ceiling - p) * _placement_share(placement, p, r_i, cdf)

    def inside(p: float) -> float:
        return float((ceiling - p) * _interval_shares(interval, np.asarray([p]), r_i, cdf)[0])

    if hi == lo:
        return lo, at_bound(lo)

    grid = np.linspace(lo, hi, GRID_POINTS)
    values = np.empty_like(grid)
    values[1:-1] = (ceiling - grid[1:-1]) * _interval_shares(interval, grid[1:-1], r_i, cdf)
    values[0], values[-1] = at_bound(lo), at_bound(hi)

    best: Optional[tuple[float, float]] = None
    for index in range(len(grid)):
        if _better((float(grid[index]), float(values[index])), best):
            best = (float(grid[index]), float(values[index]))

    peaks = [
        index
        for index in range(len(grid))
        if (index == 0 or values[index] >= values[index - 1])
        and (index == len(grid) - 1 or values[index] >= values[index + 1])
    ]
    peaks.sort(key=lambda index: (-values[index], index))
    for index in peaks[:REFINE_CANDIDATES]:
        a = float(grid[max(index - 1, 0)])
        b = float(grid[min(index + 1, len(grid) - 1)])
        candidate = golden_section_max(inside, a, b)
        if _better(candidate, best):
            best = candidate
    return best


@dataclass(frozen=True)
class PricingSolution:
    p_star: float
    profit: float
    share: float
    interval_index: int
    interval: CompetitorInterval
    curve: Optional[tuple[tuple[float, float, float], ...]] = None


def profit_curve(problem: PricingProblem, points: int) -> tuple[tuple[float, float, float], ...]:
    """``(p, share, profit)`` samples on a uniform grid over [p_min, 1]."""
    intervals = problem.intervals
    rows = []
    for p in np.linspace(problem.p_min_admissible, 1.0, points):
        p = float(p)
        share = share_at_price(p, intervals, problem.cdf)
        rows.append((p, share, (problem.ceiling - p) * share))
    return tuple(rows)


def optimize_price(problem: PricingProblem, curve_points: int = 0) -> PricingSolution:
    """Globally optimal normalized price: the best of all interval optima.

    Every interval upper bound is also evaluated by direct insertion, so
    isolated prices where the focal seller ties a competitor are not missed.
    Equal profits resolve to the smaller price.
    """
    intervals = problem.intervals
    best: Optional[tuple[float, float]] = None
    for interval in intervals:
        candidate = optimize_interval(interval, problem)
        if candidate[1] != -math.inf and _better(candidate, best):
            best = candidate
        if interval.p_hi >= problem.p_min_admissible:
            p = interval.p_hi
            share = share_at_price(p, intervals, problem.cdf)
            if _better((p, (problem.ceiling - p) * share), best):
                best = (p, (problem.ceiling - p) * share)

    p_star = best[0]
    share = share_at_price(p_star, intervals, problem.cdf)
    index = intervals.locate(p_star)
    solution = PricingSolution(
        p_star=p_star,
        profit=(problem.ceiling - p_star) * share,
        share=share,
        interval_index=index,
        interval=intervals[index],
        curve=profit_curve(problem, curve_points) if curve_points else None,
    )
    log.info("price_optimized", p_star=p_star, profit=solution.profit, share=share, intervals=len(intervals))
    return solution
