"""Raw listings, attractiveness normalization and the log-attribute projection.

A market is a set of sellers described by price and reputation. Both are
mapped into (0, 1] so that a larger value is always more attractive, then
projected to ``(ln p, ln r)`` where every later computation takes place.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from convexprice.errors import DuplicateId, EmptyMarket, NonPositiveAttribute, OutOfDomain
from convexprice.logs import get_logger

log = get_logger(__name__)

PriceRule = Literal["reciprocal_min", "inverse_minmax"]
ReputationRule = Literal["max_ratio", "minmax_with_floor"]


class NormalizationConfig(BaseModel):
    """How raw prices and reputations become attractiveness values in (0, 1].

    ``epsilon`` is the floor of the two min-max rules: the least attractive
    listing maps to ``epsilon`` instead of 0, which has no logarithm.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    price_rule: PriceRule = "reciprocal_min"
    reputation_rule: ReputationRule = "max_ratio"
    epsilon: float = Field(default=0.01, gt=0.0, lt=1.0)


@dataclass(frozen=True)
class RawListing:
    id: str
    price: float
    reputation: float


@dataclass(frozen=True, slots=True)
class NormalizedItem:
    """A seller in attractiveness space.

    Build instances with ``NormalizedItem.create`` so that ``ln_p`` and
    ``ln_r`` always come from the same routine.
    """

    id: str
    p: float
    r: float
    ln_p: float
    ln_r: float

    @classmethod
    def create(cls, item_id: str, p: float, r: float) -> "NormalizedItem":
        p = float(p)
        r = float(r)
        for name, value in (("p", p), ("r", r)):
            if not value > 0.0:
                raise NonPositiveAttribute(item_id, name, value)
            if value > 1.0:
                raise OutOfDomain(f"item {item_id!r} has {name}={value}, expected <= 1")
        return cls(item_id, p, r, math.log(p), math.log(r))

    @property
    def point(self) -> tuple[float, float]:
        return (self.ln_p, self.ln_r)


@dataclass(frozen=True)
class MarketSnapshot:
    items: tuple[NormalizedItem, ...]
    label: Optional[str] = None
    _index: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        items = tuple(self.items)
        if not items:
            raise EmptyMarket("a market needs at least one item")
        index: dict[str, NormalizedItem] = {}
        for item in items:
            if item.id in index:
                raise DuplicateId(item.id)
            index[item.id] = item
        object.__setattr__(self, "items", items)
        object.__setattr__(self, "_index", index)

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self) -> Iterator[NormalizedItem]:
        return iter(self.items)

    def __contains__(self, item_id: object) -> bool:
        return item_id in self._index

    def ids(self) -> list[str]:
        return [item.id for item in self.items]

    def get(self, item_id: str) -> NormalizedItem:
        return self._index[item_id]

    def without(self, item_id: str) -> Optional["MarketSnapshot"]:
        """The market minus one seller, or ``None`` when nothing is left."""
        rest = tuple(item for item in self.items if item.id != item_id)
        return MarketSnapshot(rest, self.label) if rest else None

    def coordinates(self) -> tuple[np.ndarray, np.ndarray]:
        ln_p = np.fromiter((item.ln_p for item in self.items), dtype=float, count=len(self.items))
        ln_r = np.fromiter((item.ln_r for item in self.items), dtype=float, count=len(self.items))
        return ln_p, ln_r


def _floor_minmax(values: np.ndarray, epsilon: float, larger_is_better: bool) -> np.ndarray:
    low, high = values.min(), values.max()
    if high == low:
        return np.ones_like(values)
    scaled = (values - low) / (high - low) if larger_is_better else (high - values) / (high - low)
    out = epsilon + (1.0 - epsilon) * scaled
    # the best listing maps to exactly 1
    out = np.minimum(out, 1.0)
    out[values == (high if larger_is_better else low)] = 1.0
    return out


def normalize_prices(prices: Sequence[float], config: NormalizationConfig) -> np.ndarray:
    values = np.asarray(prices, dtype=float)
    if config.price_rule == "reciprocal_min":
        return values.min() / values
    return _floor_minmax(values, config.epsilon, larger_is_better=False)


def normalize_reputations(reputations: Sequence[float], config: NormalizationConfig) -> np.ndarray:
    values = np.asarray(reputations, dtype=float)
    if config.reputation_rule == "max_ratio":
        return values / values.max()
    return _floor_minmax(values, config.epsilon, larger_is_better=True)


def check_listings(listings: Sequence[RawListing], config: NormalizationConfig) -> None:
    """Raise on empty input, duplicate ids and attributes the rules cannot map."""
    if not listings:
        raise EmptyMarket("no listings supplied")
    seen: set[str] = set()
    for listing in listings:
        if listing.id in seen:
            raise DuplicateId(listing.id)
        seen.add(listing.id)
        if not listing.price > 0.0:
            raise NonPositiveAttribute(listing.id, "price", listing.price)
        if config.reputation_rule == "minmax_with_floor":
            if not listing.reputation >= 0.0:
                raise NonPositiveAttribute(listing.id, "reputation", listing.reputation)
        elif not listing.reputation > 0.0:
            raise NonPositiveAttribute(listing.id, "reputation", listing.reputation)


def normalize_market(
    listings: Iterable[RawListing],
    config: NormalizationConfig = NormalizationConfig(),
    label: Optional[str] = None,
) -> MarketSnapshot:
    """Normalize raw listings into a market snapshot, preserving input order.

    Raises:
        EmptyMarket: no listings.
        NonPositiveAttribute: a price (or, for ``max_ratio``, a reputation) is not > 0.
        DuplicateId: two listings share an id.
    """
    listings = list(listings)
    check_listings(listings, config)
    p = normalize_prices([listing.price for listing in listings], config)
    r = normalize_reputations([listing.reputation for listing in listings], config)
    items = tuple(NormalizedItem.create(listing.id, pi, ri) for listing, pi, ri in zip(listings, p, r))
    log.debug("market_normalized", items=len(items), price_rule=config.price_rule, reputation_rule=config.reputation_rule)
    return MarketSnapshot(items, label)


def raw_price_for(p: float, prices: Sequence[float], config: NormalizationConfig) -> Optional[float]:
    """Invert the price rule: the raw price whose normalized value is ``p``.

    ``prices`` are the raw prices the normalization was anchored on (the
    competitors). Returns ``None`` when there is no anchor.
    """
    if len(prices) == 0:
        return None
    values = np.asarray(prices, dtype=float)
    if config.price_rule == "reciprocal_min":
        return float(values.min() / p)
    low, high = float(values.min()), float(values.max())
    if high == low:
        return low
    return high - (p - config.epsilon) / (1.0 - config.epsilon) * (high - low)


def log_project(market: MarketSnapshot) -> list[tuple[str, float, float]]:
    return [(item.id, item.ln_p, item.ln_r) for item in market]


@dataclass(frozen=True)
class MarketReport:
    """Informational findings about a market; nothing here is an error."""

    duplicate_coordinates: tuple[str, ...] = ()
    duplicate_points: tuple[tuple[str, ...], ...] = ()
    dominated: tuple[str, ...] = ()

    @property
    def clean(self) -> bool:
        return not (self.duplicate_coordinates or self.duplicate_points or self.dominated)


def validate_market(market: MarketSnapshot) -> MarketReport:
    items = list(market)

    by_point: dict[tuple[float, float], list[str]] = {}
    p_count: dict[float, int] = {}
    r_count: dict[float, int] = {}
    for item in items:
        by_point.setdefault((item.p, item.r), []).append(item.id)
        p_count[item.p] = p_count.get(item.p, 0) + 1
        r_count[item.r] = r_count.get(item.r, 0) + 1

    duplicate_points = tuple(tuple(ids) for ids in by_point.values() if len(ids) > 1)
    duplicate_coordinates = tuple(
        item.id for item in items if p_count[item.p] > 1 or r_count[item.r] > 1
    )

    # sweep from the most attractive price down; an item is dominated when an
    # item with strictly larger p has strictly larger r
    dominated: set[str] = set()
    ordered = sorted(items, key=lambda item: -item.p)
    best_r = -math.inf
    start = 0
    while start < len(ordered):
        stop = start
        while stop < len(ordered) and ordered[stop].p == ordered[start].p:
            stop += 1
        group = ordered[start:stop]
        for item in group:
            if best_r > item.r:
                dominated.add(item.id)
        best_r = max(best_r, max(item.r for item in group))
        start = stop

    return MarketReport(
        duplicate_coordinates=duplicate_coordinates,
        duplicate_points=duplicate_points,
        dominated=tuple(item.id for item in items if item.id in dominated),
    )
