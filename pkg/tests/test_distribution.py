import numpy as np
import pytest

from convexprice.distribution import (
    MixtureComponent,
    MixtureOfUniforms,
    PiecewiseLinear,
    PurchaseRecord,
    Uniform01,
    UniformInterval,
    cdf_eval,
    cdf_from_histogram,
    cdf_from_json,
    cdf_to_json,
    check_cdf,
    density,
    estimate_mixture,
)
from convexprice.errors import (
    AllRecordsInconsistent,
    AllZeroCounts,
    EmptyHistory,
    InvalidCdf,
    MismatchedMarket,
    OutOfDomain,
)
from convexprice.preference import AlphaInterval
from tests.helpers import market_of

HALVES = MixtureOfUniforms(
    components=(
        MixtureComponent(lo=0.0, hi=0.5, weight=0.5),
        MixtureComponent(lo=0.5, hi=1.0, weight=0.5),
    )
)


def test_evaluate_examples():
    assert Uniform01().evaluate(0.37) == pytest.approx(0.37)
    assert UniformInterval(lo=0.2, hi=0.6).evaluate(0.4) == pytest.approx(0.5)
    assert HALVES.evaluate(0.5) == pytest.approx(0.5)


@pytest.mark.parametrize(
    "cdf",
    [Uniform01(), UniformInterval(lo=0.2, hi=0.6), HALVES, PiecewiseLinear(knots=((0.0, 0.0), (0.3, 0.8), (1.0, 1.0)))],
)
def test_endpoints_are_exact_and_arrays_work(cdf):
    assert cdf.evaluate(0.0) == 0.0
    assert cdf.evaluate(1.0) == 1.0
    assert cdf.evaluate(-0.5) == 0.0
    assert cdf.evaluate(1.5) == 1.0
    values = cdf.evaluate(np.linspace(0.0, 1.0, 11))
    assert values.shape == (11,)
    assert np.all(np.diff(values) >= 0.0)
    check_cdf(cdf)


def test_invalid_parameters():
    with pytest.raises(InvalidCdf):
        UniformInterval(lo=0.6, hi=0.2)
    with pytest.raises(InvalidCdf):
        MixtureOfUniforms(components=(MixtureComponent(lo=0.0, hi=0.5, weight=0.7),))
    with pytest.raises(InvalidCdf):
        MixtureOfUniforms(components=())
    with pytest.raises(InvalidCdf):
        PiecewiseLinear(knots=((0.0, 0.0), (0.5, 0.7), (0.6, 0.4), (1.0, 1.0)))
    with pytest.raises(InvalidCdf):
        PiecewiseLinear(knots=((0.0, 0.1), (1.0, 1.0)))


def test_cdf_eval_domain():
    assert cdf_eval(Uniform01(), 0.25) == 0.25
    with pytest.raises(OutOfDomain):
        cdf_eval(Uniform01(), 1.2)


def test_json_round_trip_keeps_variant():
    restored = cdf_from_json(cdf_to_json(HALVES))
    assert restored == HALVES
    assert '"variant":"mixture_of_uniforms"' in cdf_to_json(HALVES)


@pytest.mark.parametrize(
    "text",
    ["{not json", '{"variant": "gaussian"}', '{"variant": "uniform_interval", "lo": 0.9, "hi": 0.1}'],
)
def test_bad_json(text):
    with pytest.raises(InvalidCdf):
        cdf_from_json(text)


def test_check_cdf_rejects_other_objects():
    with pytest.raises(InvalidCdf):
        check_cdf(object())


def test_from_intervals_merges_and_sorts():
    intervals = [AlphaInterval(0.5, 1.0), AlphaInterval(0.0, 0.5), AlphaInterval(0.0, 0.5)]
    mixture = MixtureOfUniforms.from_intervals(intervals)
    assert [(c.lo, c.hi) for c in mixture.components] == [(0.0, 0.5), (0.5, 1.0)]
    assert [c.weight for c in mixture.components] == pytest.approx([2 / 3, 1 / 3])


def test_histogram_examples():
    flat = cdf_from_histogram([1, 1, 1, 1])
    np.testing.assert_allclose(flat.evaluate(np.linspace(0.0, 1.0, 9)), np.linspace(0.0, 1.0, 9))
    first = cdf_from_histogram([1, 0, 0, 0])
    assert first.evaluate(0.25) == 1.0
    assert first.evaluate(0.125) == pytest.approx(0.5)
    assert cdf_from_histogram([1, 3]).evaluate(0.5) == pytest.approx(0.25)


def test_histogram_errors():
    with pytest.raises(AllZeroCounts):
        cdf_from_histogram([0, 0])
    with pytest.raises(InvalidCdf):
        cdf_from_histogram([1, -1])
    with pytest.raises(InvalidCdf):
        cdf_from_histogram([])


def test_density():
    assert density(Uniform01(), 0.3) == 1.0
    assert density(UniformInterval(lo=0.2, hi=0.6), 0.4) == pytest.approx(2.5)
    assert density(UniformInterval(lo=0.2, hi=0.6), 0.7) == 0.0
    assert density(HALVES, 0.25) == pytest.approx(1.0)
    assert density(cdf_from_histogram([1, 3]), 0.75) == pytest.approx(1.5)


def test_single_record_gives_single_component(three_vertex):
    estimate = estimate_mixture([PurchaseRecord(three_vertex, "M")])
    assert estimate.used == 1 and estimate.excluded == 0
    (component,) = estimate.cdf.components
    assert (component.lo, component.hi) == pytest.approx((0.42430, 0.55810), abs=1e-3)
    assert estimate.cdf.evaluate(0.5 * (component.lo + component.hi)) == pytest.approx(0.5)


def test_symmetric_records(symmetric_pair):
    records = [PurchaseRecord(symmetric_pair, "A"), PurchaseRecord(symmetric_pair, "B")]
    assert estimate_mixture(records).cdf.evaluate(0.5) == pytest.approx(0.5)


def test_interior_choice_is_excluded(interior_market):
    records = [PurchaseRecord(interior_market, "X"), PurchaseRecord(interior_market, "A")]
    estimate = estimate_mixture(records)
    assert (estimate.used, estimate.excluded) == (1, 1)
    assert estimate.excluded_records[0].chosen_id == "X"


def test_duplicate_of_vertex_is_credited():
    market = market_of(("A", 0.25, 1.0), ("A2", 0.25, 1.0), ("B", 1.0, 0.25))
    estimate = estimate_mixture([PurchaseRecord(market, "A2")])
    assert estimate.used == 1
    assert (estimate.cdf.components[0].lo, estimate.cdf.components[0].hi) == pytest.approx((0.0, 0.5))


def test_estimate_is_order_independent(three_vertex, symmetric_pair):
    records = [
        PurchaseRecord(three_vertex, "A"),
        PurchaseRecord(symmetric_pair, "B"),
        PurchaseRecord(three_vertex, "M"),
        PurchaseRecord(three_vertex, "A"),
    ]
    assert estimate_mixture(records).cdf == estimate_mixture(records[::-1]).cdf


def test_estimate_errors(interior_market):
    with pytest.raises(EmptyHistory):
        estimate_mixture([])
    with pytest.raises(AllRecordsInconsistent):
        estimate_mixture([PurchaseRecord(interior_market, "X")])
    with pytest.raises(MismatchedMarket):
        PurchaseRecord(interior_market, "nobody")
