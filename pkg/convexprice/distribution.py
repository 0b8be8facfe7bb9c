"""Population distribution of the preference weight alpha.

Each purchase record pins the buyer's alpha to the interval over which the
chosen vertex is the best choice; treating every buyer as uniform on that
interval and superimposing the buyers gives a mixture of uniforms. Histogram
counts give a piecewise-linear alternative.

All variants are continuous on [0, 1] with F(0) = 0 and F(1) = 1 exactly.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Annotated, Iterable, Literal, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError, model_validator

from convexprice.errors import (
    AllRecordsInconsistent,
    AllZeroCounts,
    EmptyHistory,
    InvalidCdf,
    MismatchedMarket,
    OutOfDomain,
)
from convexprice.frontier import Frontier, upper_frontier
from convexprice.logs import get_logger
from convexprice.market_model import MarketSnapshot
from convexprice.preference import AlphaInterval, alpha_intervals

log = get_logger(__name__)

WEIGHT_ATOL = 1e-9


def _finish(values: np.ndarray, alpha: np.ndarray):
    values = np.clip(values, 0.0, 1.0)
    values = np.where(alpha <= 0.0, 0.0, np.where(alpha >= 1.0, 1.0, values))
    return float(values) if values.ndim == 0 else values


class _Cdf(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    def evaluate(self, alpha):
        """F(alpha) for a scalar or an array of alphas (clamped to [0, 1])."""
        raise NotImplementedError

    def density(self, alpha: float) -> float:
        """f(alpha), taken from the right at breakpoints."""
        raise NotImplementedError


class Uniform01(_Cdf):
    variant: Literal["uniform01"] = "uniform01"

    def evaluate(self, alpha):
        alpha = np.asarray(alpha, dtype=float)
        return _finish(alpha, alpha)

    def density(self, alpha: float) -> float:
        return 1.0 if 0.0 <= alpha <= 1.0 else 0.0


class UniformInterval(_Cdf):
    """A single buyer: alpha uniform on [lo, hi]."""

    variant: Literal["uniform_interval"] = "uniform_interval"
    lo: float
    hi: float

    @model_validator(mode="after")
    def _bounds(self) -> "UniformInterval":
        if not (0.0 <= self.lo < self.hi <= 1.0):
            raise InvalidCdf(f"uniform interval needs 0 <= lo < hi <= 1, got ({self.lo}, {self.hi})")
        return self

    def evaluate(self, alpha):
        alpha = np.asarray(alpha, dtype=float)
        return _finish((alpha - self.lo) / (self.hi - self.lo), alpha)

    def density(self, alpha: float) -> float:
        if self.lo <= alpha < self.hi or (alpha == self.hi == 1.0):
            return 1.0 / (self.hi - self.lo)
        return 0.0


class MixtureComponent(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    lo: float
    hi: float
    weight: float


class MixtureOfUniforms(_Cdf):
    variant: Literal["mixture_of_uniforms"] = "mixture_of_uniforms"
    components: tuple[MixtureComponent, ...]

    @model_validator(mode="after")
    def _weights(self) -> "MixtureOfUniforms":
        if not self.components:
            raise InvalidCdf("a mixture needs at least one component")
        for component in self.components:
            if not (0.0 <= component.lo < component.hi <= 1.0):
                raise InvalidCdf(f"component ({component.lo}, {component.hi}) is not inside [0, 1] with lo < hi")
            if not component.weight >= 0.0:
                raise InvalidCdf(f"component weight {component.weight} is negative")
        total = math.fsum(component.weight for component in self.components)
        if abs(total - 1.0) > WEIGHT_ATOL:
            raise InvalidCdf(f"mixture weights sum to {total}, expected 1")
        return self

    @classmethod
    def from_intervals(
        cls, intervals: Iterable[AlphaInterval], weights: Optional[Sequence[float]] = None
    ) -> "MixtureOfUniforms":
        """Superimpose per-buyer intervals, equal weights unless given.

        Identical intervals are merged and components are sorted by (lo, hi),
        so the result does not depend on the order of ``intervals``.
        """
        intervals = list(intervals)
        merged: dict[tuple[float, float], float] = {}
        if weights is None:
            counts = Counter((interval.lo, interval.hi) for interval in intervals)
            merged = {key: count / len(intervals) for key, count in counts.items()}
        else:
            for interval, weight in zip(intervals, weights, strict=True):
                key = (interval.lo, interval.hi)
                merged[key] = merged.get(key, 0.0) + weight
        return cls(
            components=tuple(
                MixtureComponent(lo=lo, hi=hi, weight=weight) for (lo, hi), weight in sorted(merged.items())
            )
        )

    def _arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        lo = np.array([c.lo for c in self.components])
        hi = np.array([c.hi for c in self.components])
        weight = np.array([c.weight for c in self.components])
        return lo, hi, weight

    def evaluate(self, alpha):
        alpha = np.asarray(alpha, dtype=float)
        lo, hi, weight = self._arrays()
        parts = np.clip((alpha[..., None] - lo) / (hi - lo), 0.0, 1.0)
        return _finish(np.sum(parts * weight, axis=-1), alpha)

    def density(self, alpha: float) -> float:
        return math.fsum(
            UniformInterval(lo=c.lo, hi=c.hi).density(alpha) * c.weight for c in self.components
        )


class PiecewiseLinear(_Cdf):
    variant: Literal["piecewise_linear"] = "piecewise_linear"
    knots: tuple[tuple[float, float], ...]

    @model_validator(mode="after")
    def _knots(self) -> "PiecewiseLinear":
        if len(self.knots) < 2:
            raise InvalidCdf("piecewise-linear CDF needs at least two knots")
        if self.knots[0] != (0.0, 0.0) or self.knots[-1] != (1.0, 1.0):
            raise InvalidCdf("piecewise-linear CDF must start at (0, 0) and end at (1, 1)")
        for (a0, f0), (a1, f1) in zip(self.knots, self.knots[1:]):
            if not a1 > a0:
                raise InvalidCdf(f"knot alphas must be strictly increasing ({a0} then {a1})")
            if not f1 >= f0:
                raise InvalidCdf(f"knot values must be nondecreasing ({f0} then {f1})")
        return self

    def evaluate(self, alpha):
        alpha = np.asarray(alpha, dtype=float)
        xs = [a for a, _ in self.knots]
        fs = [f for _, f in self.knots]
        return _finish(np.interp(alpha, xs, fs), alpha)

    def density(self, alpha: float) -> float:
        if not 0.0 <= alpha <= 1.0:
            return 0.0
        for (a0, f0), (a1, f1) in zip(self.knots, self.knots[1:]):
            if a0 <= alpha < a1 or (alpha == a1 == 1.0):
                return (f1 - f0) / (a1 - a0)
        return 0.0


PreferenceCdf = Annotated[
    Union[Uniform01, UniformInterval, MixtureOfUniforms, PiecewiseLinear],
    Field(discriminator="variant"),
]
_cdf_adapter: TypeAdapter = TypeAdapter(PreferenceCdf)


def cdf_to_json(cdf: PreferenceCdf) -> str:
    return cdf.model_dump_json()


def cdf_from_json(text: Union[str, bytes]) -> PreferenceCdf:
    try:
        return _cdf_adapter.validate_json(text)
    except ValidationError as exc:
        raise InvalidCdf(str(exc)) from exc


def cdf_eval(cdf: PreferenceCdf, alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 <= alpha <= 1.0:
        raise OutOfDomain(f"alpha={alpha} is outside [0, 1]")
    return float(cdf.evaluate(alpha))


def check_cdf(cdf: PreferenceCdf, grid_points: int = 1001) -> None:
    """Raise ``InvalidCdf`` unless F(0) = 0, F(1) = 1 and F is nondecreasing on a grid."""
    if not isinstance(cdf, _Cdf):
        raise InvalidCdf(f"{type(cdf).__name__} is not a preference distribution")
    values = np.asarray(cdf.evaluate(np.linspace(0.0, 1.0, grid_points)))
    if values[0] != 0.0 or values[-1] != 1.0:
        raise InvalidCdf(f"F(0)={values[0]}, F(1)={values[-1]}")
    if np.any(np.diff(values) < 0.0):
        raise InvalidCdf("F is not nondecreasing")


@dataclass(frozen=True)
class PurchaseRecord:
    market: MarketSnapshot
    chosen_id: str
    user_id: Optional[str] = None

    def __post_init__(self) -> None:
        if self.chosen_id not in self.market:
            raise MismatchedMarket(f"chosen item {self.chosen_id!r} is not in the record's market")


@dataclass(frozen=True)
class MixtureEstimate:
    cdf: MixtureOfUniforms
    used: int
    excluded: int
    excluded_records: tuple[PurchaseRecord, ...] = ()


def _chosen_interval(record: PurchaseRecord, frontier: Frontier) -> Optional[AlphaInterval]:
    intervals = dict(alpha_intervals(frontier))
    if record.chosen_id in intervals:
        return intervals[record.chosen_id]
    chosen = record.market.get(record.chosen_id)
    for vertex in frontier.vertices:
        if vertex.point == chosen.point:
            return intervals[vertex.id]
    return None


def estimate_mixture(history: Iterable[PurchaseRecord]) -> MixtureEstimate:
    """Equal-weight mixture of the chosen vertices' alpha intervals.

    A record whose chosen item is not on its market's frontier cannot be
    explained by any alpha; it is left out and counted in ``excluded``.

    Raises:
        EmptyHistory: no records.
        AllRecordsInconsistent: every record chose an item off the frontier.
    """
    records = list(history)
    if not records:
        raise EmptyHistory("purchase history is empty")

    frontiers: dict[MarketSnapshot, Frontier] = {}
    intervals: list[AlphaInterval] = []
    excluded: list[PurchaseRecord] = []
    for record in records:
        frontier = frontiers.get(record.market)
        if frontier is None:
            frontier = frontiers[record.market] = upper_frontier(record.market)
        interval = _chosen_interval(record, frontier)
        if interval is None:
            excluded.append(record)
        else:
            intervals.append(interval)

    if not intervals:
        raise AllRecordsInconsistent(f"all {len(records)} records chose items inside the frontier")
    if excluded:
        log.warning("history_records_excluded", excluded=len(excluded), total=len(records))
    cdf = MixtureOfUniforms.from_intervals(intervals)
    log.info("mixture_estimated", used=len(intervals), components=len(cdf.components))
    return MixtureEstimate(cdf, used=len(intervals), excluded=len(excluded), excluded_records=tuple(excluded))


def cdf_from_histogram(counts: Sequence[float]) -> PiecewiseLinear:
    """Piecewise-linear CDF with knots at the edges of equal-width alpha bins."""
    values = np.asarray(counts, dtype=float)
    if values.ndim != 1 or values.size == 0:
        raise InvalidCdf("histogram counts must be a nonempty list")
    if np.any(values < 0.0) or not np.all(np.isfinite(values)):
        raise InvalidCdf("histogram counts must be finite and nonnegative")
    total = values.sum()
    if total == 0.0:
        raise AllZeroCounts("histogram has no mass")

    edges = np.linspace(0.0, 1.0, values.size + 1)
    cumulative = np.concatenate(([0.0], np.cumsum(values) / total))
    cumulative[-1] = 1.0
    cumulative = np.minimum(cumulative, 1.0)
    return PiecewiseLinear(knots=tuple((float(a), float(f)) for a, f in zip(edges, cumulative)))


def density(cdf: PreferenceCdf, alpha: float) -> float:
    """f(alpha) implied by ``cdf``; 0 outside [0, 1]."""
    return float(cdf.density(float(alpha)))
