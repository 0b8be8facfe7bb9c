"""Upper convex frontier of a market in (ln p, ln r) space.

Only frontier vertices can ever be a consumer's best choice; everything
strictly below the frontier is interior. Two builders are provided: the
max-slope scan, which walks the reputation-sorted items one vertex at a time,
and a monotone chain, which is O(N log N). They must agree on every input.

Tie policy applied before either builder runs: among items with the same
``ln_p`` only the highest ``ln_r`` survives, and identical points collapse to
the lowest id. Collinear middle points are not vertices.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from convexprice.errors import EmptyFrontier, EmptyMarket, InvariantViolation, MismatchedMarket, VerticalPair
from convexprice.logs import get_logger
from convexprice.market_model import MarketSnapshot, NormalizedItem

log = get_logger(__name__)

SLOPE_RTOL = 1e-9


def slope(a: NormalizedItem, b: NormalizedItem) -> float:
    """Slope of the line through ``a`` and ``b`` in the log plane."""
    dx = b.ln_p - a.ln_p
    if dx == 0.0:
        raise VerticalPair(f"items {a.id!r} and {b.id!r} share ln_p={a.ln_p}")
    return (b.ln_r - a.ln_r) / dx


@dataclass(frozen=True)
class Frontier:
    vertices: tuple[NormalizedItem, ...]
    edge_slopes: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.vertices:
            raise EmptyFrontier("a frontier needs at least one vertex")
        if len(self.edge_slopes) != len(self.vertices) - 1:
            raise InvariantViolation("edge_slopes must have one entry per consecutive vertex pair")
        for a, b in zip(self.vertices, self.vertices[1:]):
            if not (a.ln_p < b.ln_p and a.ln_r > b.ln_r):
                raise InvariantViolation(f"vertices {a.id!r}, {b.id!r} are not ordered along the frontier")
        for k in self.edge_slopes:
            if not k < 0.0:
                raise InvariantViolation(f"edge slope {k} is not negative")
        for k1, k2 in zip(self.edge_slopes, self.edge_slopes[1:]):
            if not k1 > k2:
                raise InvariantViolation(f"edge slopes {k1}, {k2} are not strictly decreasing")

    @classmethod
    def from_vertices(cls, vertices: Iterable[NormalizedItem]) -> "Frontier":
        vertices = tuple(vertices)
        return cls(vertices, tuple(slope(a, b) for a, b in zip(vertices, vertices[1:])))

    def __len__(self) -> int:
        return len(self.vertices)

    def ids(self) -> list[str]:
        return [vertex.id for vertex in self.vertices]

    def position(self, item_id: str) -> Optional[int]:
        for index, vertex in enumerate(self.vertices):
            if vertex.id == item_id:
                return index
        return None


def representatives(items: Iterable[NormalizedItem]) -> list[NormalizedItem]:
    """Apply the tie policy: one item per ``ln_p``, the highest ``ln_r``, then lowest id."""
    best: dict[float, NormalizedItem] = {}
    for item in items:
        current = best.get(item.ln_p)
        if (
            current is None
            or item.ln_r > current.ln_r
            or (item.ln_r == current.ln_r and item.id < current.id)
        ):
            best[item.ln_p] = item
    return list(best.values())


def _cross_terms(ox, oy, ax, ay, bx, by):
    """The two products whose difference is the cross product of (a - o) and (b - o)."""
    return (ax - ox) * (by - oy), (ay - oy) * (bx - ox)


def _collinear(lhs, rhs):
    """Shared collinearity test of both builders; works on scalars and arrays."""
    return np.abs(lhs - rhs) <= SLOPE_RTOL * (np.abs(lhs) + np.abs(rhs))


def _turns_right(o: NormalizedItem, a: NormalizedItem, b: NormalizedItem) -> bool:
    lhs, rhs = _cross_terms(o.ln_p, o.ln_r, a.ln_p, a.ln_r, b.ln_p, b.ln_r)
    return bool(lhs < rhs and not _collinear(lhs, rhs))


def upper_frontier_scan(market: MarketSnapshot) -> Frontier:
    """Max-slope scan over the items sorted by increasing reputation.

    Starts at the most reputable item and repeatedly jumps to the
    lower-reputation, higher-price item with the largest slope; equal slopes
    resolve to the farthest item so collinear points are skipped.
    """
    if market is None or len(market) == 0:
        raise EmptyMarket("cannot build a frontier of an empty market")
    order = sorted(representatives(market), key=lambda item: (item.ln_r, item.ln_p))
    x = np.array([item.ln_p for item in order])
    y = np.array([item.ln_r for item in order])

    index = len(order) - 1
    vertices = [order[index]]
    while True:
        ahead = np.nonzero(x[:index] > x[index])[0]
        if ahead.size == 0:
            break
        k = (y[ahead] - y[index]) / (x[ahead] - x[index])
        best = ahead[np.argmax(k)]
        lhs, rhs = _cross_terms(x[index], y[index], x[ahead], y[ahead], x[best], y[best])
        ties = ahead[_collinear(lhs, rhs)]
        index = int(ties[np.argmax(x[ties])])
        vertices.append(order[index])

    frontier = Frontier.from_vertices(vertices)
    log.debug("frontier_built", method="scan", items=len(market), vertices=len(frontier))
    return frontier


def upper_frontier_chain(market: MarketSnapshot) -> Frontier:
    """Monotone-chain construction of the same frontier."""
    if market is None or len(market) == 0:
        raise EmptyMarket("cannot build a frontier of an empty market")
    reps = representatives(market)
    top = max(reps, key=lambda item: (item.ln_r, item.ln_p))
    hull: list[NormalizedItem] = []
    for item in sorted((item for item in reps if item.ln_p >= top.ln_p), key=lambda item: item.ln_p):
        while len(hull) >= 2 and not _turns_right(hull[-2], hull[-1], item):
            hull.pop()
        hull.append(item)

    frontier = Frontier.from_vertices(hull)
    log.debug("frontier_built", method="chain", items=len(market), vertices=len(frontier))
    return frontier


upper_frontier = upper_frontier_chain


class Role(str, enum.Enum):
    VERTEX = "vertex"
    INTERIOR = "interior"
    DOMINATED = "dominated"


@dataclass(frozen=True)
class Classification:
    role: Role
    position: Optional[int] = None


@dataclass(frozen=True)
class FrontierClassification:
    entries: dict[str, Classification]

    def role_of(self, item_id: str) -> Role:
        return self.entries[item_id].role

    def ids_with(self, role: Role) -> list[str]:
        return [item_id for item_id, entry in self.entries.items() if entry.role is role]

    def vertex_ids(self) -> list[str]:
        return self.ids_with(Role.VERTEX)

    def interior_ids(self) -> list[str]:
        return self.ids_with(Role.INTERIOR)

    def rows(self) -> list[tuple[str, Classification]]:
        return list(self.entries.items())


def classify(market: MarketSnapshot, frontier: Frontier) -> FrontierClassification:
    """Label every market item as a frontier vertex, interior, or a dominated duplicate.

    Raises:
        MismatchedMarket: a frontier vertex is not an item of ``market``.
    """
    positions = {vertex.id: index for index, vertex in enumerate(frontier.vertices)}
    for vertex in frontier.vertices:
        if vertex.id not in market or market.get(vertex.id) != vertex:
            raise MismatchedMarket(f"frontier vertex {vertex.id!r} is not part of this market")

    kept = {item.ln_p: item for item in representatives(market)}
    entries: dict[str, Classification] = {}
    for item in market:
        if item.id in positions:
            entries[item.id] = Classification(Role.VERTEX, positions[item.id])
        elif kept[item.ln_p] is not item:
            entries[item.id] = Classification(Role.DOMINATED)
        else:
            entries[item.id] = Classification(Role.INTERIOR)
    return FrontierClassification(entries)
