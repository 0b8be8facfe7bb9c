"""Brute-force reference computations.

Everything here is derived from the utility definition alone, by exhaustive
evaluation on alpha and price grids, and shares no geometry with the
frontier and pricing code it is used to check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from convexprice.distribution import PreferenceCdf
from convexprice.errors import EmptyMarket
from convexprice.fileio import fmt
from convexprice.frontier import classify, upper_frontier_chain, upper_frontier_scan
from convexprice.logs import get_logger
from convexprice.market_model import MarketSnapshot
from convexprice.preference import alpha_intervals, market_shares
from convexprice.pricing import PricingProblem, optimize_price, share_at_price

log = get_logger(__name__)

TIE_RTOL = 1e-12
PRICE_CHUNK = 4096


class SweepConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    grid_points: int = Field(default=10001, ge=2)


def _tie_order(market: MarketSnapshot) -> list:
    """Items in tie-break order: higher r first, then lower id."""
    return sorted(market, key=lambda item: (-item.r, item.id))


def _winners(alphas: np.ndarray, market: MarketSnapshot) -> tuple[list, np.ndarray]:
    order = _tie_order(market)
    ln_p = np.array([item.ln_p for item in order])
    ln_r = np.array([item.ln_r for item in order])
    u = alphas[:, None] * ln_p + (1.0 - alphas[:, None]) * ln_r
    best = u.max(axis=1, keepdims=True)
    near = u >= best - TIE_RTOL * (1.0 + np.abs(best))
    return order, np.argmax(near, axis=1)


def choose_at_alpha(alpha: float, market: Optional[MarketSnapshot]) -> str:
    """Id of the item maximizing ``alpha * ln p + (1 - alpha) * ln r``.

    Near-ties (relative 1e-12) go to the higher reputation, then the lower id.
    """
    if market is None or len(market) == 0:
        raise EmptyMarket("cannot choose from an empty market")
    order, index = _winners(np.array([float(alpha)]), market)
    return order[int(index[0])].id


def _alpha_grid(cfg: SweepConfig) -> np.ndarray:
    return np.linspace(0.0, 1.0, cfg.grid_points)


def sweep_shares(market: MarketSnapshot, cdf: PreferenceCdf, cfg: SweepConfig = SweepConfig()) -> dict[str, float]:
    """Shares from the grid argmax: each grid alpha owns the cell between its
    neighbours' midpoints, and a run of equal winners gets the mass of its cells."""
    alphas = _alpha_grid(cfg)
    order, winners = _winners(alphas, market)
    edges = np.concatenate(([0.0], 0.5 * (alphas[1:] + alphas[:-1]), [1.0]))
    mass = np.asarray(cdf.evaluate(edges), dtype=float)

    shares = {item.id: 0.0 for item in market}
    start = 0
    for stop in range(1, len(alphas) + 1):
        if stop == len(alphas) or winners[stop] != winners[start]:
            shares[order[winners[start]].id] += float(mass[stop] - mass[start])
            start = stop
    return shares


def grid_choices(market: MarketSnapshot, cfg: SweepConfig = SweepConfig()) -> tuple[np.ndarray, list[str]]:
    """The alpha grid and the id chosen at each grid point."""
    alphas = _alpha_grid(cfg)
    order, winners = _winners(alphas, market)
    return alphas, [order[index].id for index in winners]


def frontier_bruteforce(market: MarketSnapshot, cfg: SweepConfig = SweepConfig()) -> set[str]:
    """Ids chosen by at least one grid alpha."""
    order, winners = _winners(_alpha_grid(cfg), market)
    return {order[index].id for index in np.unique(winners)}


def _pareto(problem: PricingProblem) -> tuple[np.ndarray, np.ndarray]:
    if problem.competitors is None:
        return np.empty(0), np.empty(0)
    kept_x: list[float] = []
    kept_y: list[float] = []
    best_y = -math.inf
    for item in sorted(problem.competitors, key=lambda item: (-item.ln_p, -item.ln_r)):
        if item.ln_r > best_y:
            kept_x.append(item.ln_p)
            kept_y.append(item.ln_r)
            best_y = item.ln_r
    return np.array(kept_x), np.array(kept_y)


def focal_shares(problem: PricingProblem, prices: np.ndarray) -> np.ndarray:
    """Focal share at each price from ``U(alpha, focal) >= U(alpha, j)`` for all j.

    Each competitor contributes a linear constraint ``a_j + alpha * b_j >= 0``;
    the feasible alphas form an interval whose CDF mass is the share.
    """
    prices = np.asarray(prices, dtype=float)
    xj, yj = _pareto(problem)
    y = math.log(problem.r_i)
    out = np.empty_like(prices)
    for start in range(0, prices.size, PRICE_CHUNK):
        x = np.log(prices[start : start + PRICE_CHUNK])
        if xj.size == 0:
            out[start : start + x.size] = 1.0
            continue
        a = y - yj
        b = (x[:, None] - xj) - a
        with np.errstate(divide="ignore", invalid="ignore"):
            bound = -a / b
        lo = np.maximum(np.max(np.where(b > 0.0, bound, 0.0), axis=1), 0.0)
        hi = np.minimum(np.min(np.where(b < 0.0, bound, 1.0), axis=1), 1.0)
        blocked = np.any((b == 0.0) & (a < 0.0), axis=1)
        share = np.asarray(problem.cdf.evaluate(hi)) - np.asarray(problem.cdf.evaluate(lo))
        out[start : start + x.size] = np.where(blocked | (hi <= lo), 0.0, np.maximum(share, 0.0))
    return out


def price_grid_oracle(problem: PricingProblem, grid_points: int) -> tuple[float, float]:
    """Best ``(p, profit)`` on a uniform price grid over [p_min, 1]; first maximum wins."""
    if grid_points < 2:
        raise ValueError("grid_points must be >= 2")
    prices = np.linspace(problem.p_min_admissible, 1.0, grid_points)
    profit = (problem.ceiling - prices) * focal_shares(problem, prices)
    best = int(np.argmax(profit))
    return float(prices[best]), float(profit[best])


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class SuiteReport:
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def failures(self) -> list[CheckResult]:
        return [check for check in self.checks if not check.passed]


def _market_checks(market: MarketSnapshot, cdf: PreferenceCdf, cfg: SweepConfig) -> list[CheckResult]:
    checks = []
    chain = upper_frontier_chain(market)
    scan = upper_frontier_scan(market)
    checks.append(
        CheckResult("frontier_builders_agree", chain.ids() == scan.ids(), f"chain={chain.ids()} scan={scan.ids()}")
    )

    vertices = set(chain.ids())
    chosen = frontier_bruteforce(market, cfg)
    step = 1.0 / (cfg.grid_points - 1)
    resolvable = all(interval.width > step for _, interval in alpha_intervals(chain))
    ok = chosen <= vertices and (chosen == vertices or not resolvable)
    checks.append(
        CheckResult("frontier_bruteforce", ok, f"chosen={sorted(chosen)} vertices={sorted(vertices)}")
    )

    interior = set(classify(market, chain).interior_ids())
    checks.append(
        CheckResult("interior_never_chosen", not (chosen & interior), f"chosen interior={sorted(chosen & interior)}")
    )

    table = market_shares(chain, cdf)
    checks.append(CheckResult("shares_sum_to_one", abs(table.total - 1.0) <= 1e-9, f"total={fmt(table.total)}"))

    swept = sweep_shares(market, cdf, cfg)
    alphas = _alpha_grid(cfg)
    edges = np.concatenate(([0.0], 0.5 * (alphas[1:] + alphas[:-1]), [1.0]))
    tolerance = 2.0 * float(np.max(np.diff(np.asarray(cdf.evaluate(edges))))) + 1e-12
    error = max(abs(swept[item.id] - table.share_of(item.id)) for item in market)
    checks.append(
        CheckResult("sweep_shares", error <= tolerance, f"max error={fmt(error)} tolerance={fmt(tolerance)}")
    )
    return checks


def _pricing_checks(problem: PricingProblem, price_grid_points: int) -> list[CheckResult]:
    checks = []
    solution = optimize_price(problem)
    grid_p, grid_profit = price_grid_oracle(problem, price_grid_points)
    slack = 1e-6 * problem.ceiling
    checks.append(
        CheckResult(
            "optimizer_dominates_grid",
            solution.profit >= grid_profit - slack,
            f"optimizer p={fmt(solution.p_star)} profit={fmt(solution.profit)}; "
            f"grid p={fmt(grid_p)} profit={fmt(grid_profit)}",
        )
    )

    intervals = problem.intervals
    sample_prices = [solution.p_star, grid_p]
    sample_prices += [0.5 * (interval.p_lo + interval.p_hi) for interval in intervals]
    sample_prices += [interval.p_hi for interval in intervals]
    analytic = np.array([share_at_price(p, intervals, problem.cdf) for p in sample_prices])
    brute = focal_shares(problem, np.array(sample_prices))
    error = float(np.max(np.abs(analytic - brute)))
    checks.append(CheckResult("price_share_agreement", error <= 1e-9, f"max error={fmt(error)} at {len(sample_prices)} prices"))
    return checks


def run_oracle_suite(
    market: MarketSnapshot,
    cdf: PreferenceCdf,
    problem: Optional[PricingProblem] = None,
    cfg: SweepConfig = SweepConfig(),
    price_grid_points: int = 100001,
) -> SuiteReport:
    """Every analytic-versus-brute-force agreement check for one market (and pricing problem)."""
    checks = _market_checks(market, cdf, cfg)
    if problem is not None:
        checks += _pricing_checks(problem, price_grid_points)
    report = SuiteReport(tuple(checks))
    log.info("oracle_suite_finished", checks=len(checks), failed=len(report.failures()))
    return report
