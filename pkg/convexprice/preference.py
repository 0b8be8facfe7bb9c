"""Log-linear utility, the alpha <-> slope correspondence and market shares.

A consumer with preference weight ``alpha`` scores an item as
``alpha * ln p + (1 - alpha) * ln r`` and buys the best one. An indifference
line of that consumer has slope ``k = -alpha / (1 - alpha)`` in the log plane,
so each frontier vertex wins exactly for the alphas between the slopes of its
two adjacent edges.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from convexprice.errors import InvalidCdf, OutOfDomain, PositiveSlope
from convexprice.frontier import Frontier
from convexprice.market_model import NormalizedItem

if TYPE_CHECKING:
    from convexprice.distribution import PreferenceCdf

NEG_INF_SLOPE = -math.inf


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 <= alpha <= 1.0:
        raise OutOfDomain(f"preference weight {alpha} is outside [0, 1]")
    return alpha


def utility(alpha: float, item: NormalizedItem) -> float:
    alpha = _check_alpha(alpha)
    return alpha * item.ln_p + (1.0 - alpha) * item.ln_r


def k_of_alpha(alpha: float) -> float:
    """Indifference slope for ``alpha``; ``alpha == 1`` maps to ``-inf``."""
    alpha = _check_alpha(alpha)
    if alpha == 1.0:
        return NEG_INF_SLOPE
    return -alpha / (1.0 - alpha) + 0.0


def alpha_of_k(k: float) -> float:
    """Inverse of ``k_of_alpha``: ``alpha = k / (k - 1)``.

    Raises:
        PositiveSlope: ``k > 0``.
    """
    k = float(k)
    if k > 0.0 or math.isnan(k):
        raise PositiveSlope(f"slope {k} is not <= 0")
    if k == NEG_INF_SLOPE:
        return 1.0
    return k / (k - 1.0) + 0.0


def alpha_of_k_array(k: np.ndarray) -> np.ndarray:
    """Vectorized ``alpha_of_k`` for slopes already known to be <= 0."""
    k = np.asarray(k, dtype=float)
    with np.errstate(invalid="ignore"):
        alpha = k / (k - 1.0)
    return np.where(np.isneginf(k), 1.0, alpha) + 0.0


@dataclass(frozen=True)
class AlphaInterval:
    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.lo <= self.hi <= 1.0):
            raise OutOfDomain(f"invalid alpha interval ({self.lo}, {self.hi})")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, alpha: float) -> bool:
        return self.lo <= alpha <= self.hi


def alpha_intervals(frontier: Frontier) -> list[tuple[str, AlphaInterval]]:
    """Alpha range over which each vertex is the best choice.

    Boundaries are computed once per edge, so adjacent intervals share their
    endpoint exactly.
    """
    boundaries = [0.0] + [alpha_of_k(k) for k in frontier.edge_slopes] + [1.0]
    return [
        (vertex.id, AlphaInterval(boundaries[i], boundaries[i + 1]))
        for i, vertex in enumerate(frontier.vertices)
    ]


def best_vertex(frontier: Frontier, alpha: float) -> NormalizedItem:
    """The vertex a consumer with weight ``alpha`` picks.

    At a shared boundary both neighbours tie; the one with the higher
    reputation (the left one) wins.
    """
    alpha = _check_alpha(alpha)
    inner = [alpha_of_k(k) for k in frontier.edge_slopes]
    return frontier.vertices[bisect.bisect_left(inner, alpha)]


@dataclass(frozen=True)
class ShareRow:
    id: str
    interval: AlphaInterval
    share: float


@dataclass(frozen=True)
class ShareTable:
    rows: tuple[ShareRow, ...]

    def share_of(self, item_id: str) -> float:
        for row in self.rows:
            if row.id == item_id:
                return row.share
        return 0.0

    @property
    def total(self) -> float:
        return math.fsum(row.share for row in self.rows)

    def as_dict(self) -> dict[str, float]:
        return {row.id: row.share for row in self.rows}


def market_shares(frontier: Frontier, cdf: "PreferenceCdf") -> ShareTable:
    """Share of each vertex: the population mass of its alpha interval.

    Interior items are absent from the table and have share 0.
    """
    evaluate = getattr(cdf, "evaluate", None)
    if evaluate is None:
        raise InvalidCdf(f"{type(cdf).__name__} is not a preference distribution")
    if float(evaluate(0.0)) != 0.0 or float(evaluate(1.0)) != 1.0:
        raise InvalidCdf("distribution must satisfy F(0) = 0 and F(1) = 1")

    rows = []
    for item_id, interval in alpha_intervals(frontier):
        share = float(evaluate(interval.hi)) - float(evaluate(interval.lo))
        rows.append(ShareRow(item_id, interval, max(share, 0.0)))
    return ShareTable(tuple(rows))

