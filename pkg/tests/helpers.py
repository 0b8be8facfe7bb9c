import numpy as np
from hypothesis import strategies as st

from convexprice.market_model import MarketSnapshot, NormalizedItem


def market_of(*points, label=None):
    """A snapshot from ``(id, p, r)`` triples or bare ``(p, r)`` pairs."""
    items = []
    for index, point in enumerate(points):
        if len(point) == 3:
            items.append(NormalizedItem.create(*point))
        else:
            items.append(NormalizedItem.create(f"s{index}", *point))
    return MarketSnapshot(tuple(items), label)


def random_market(rng, n, low=0.01):
    p = rng.uniform(low, 1.0, n)
    r = rng.uniform(low, 1.0, n)
    return market_of(*[(f"s{i:03d}", float(pi), float(ri)) for i, (pi, ri) in enumerate(zip(p, r))])


@st.composite
def markets(draw, min_size=1, max_size=40):
    n = draw(st.integers(min_value=min_size, max_value=max_size))
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    rng = np.random.default_rng(seed)
    if draw(st.booleans()):
        # coarse lattice: lots of shared coordinates, duplicates and collinear points
        p = rng.integers(1, 9, n) / 8.0
        r = rng.integers(1, 9, n) / 8.0
    else:
        p = rng.uniform(0.01, 1.0, n)
        r = rng.uniform(0.01, 1.0, n)
    return market_of(*[(f"s{i:02d}", float(a), float(b)) for i, (a, b) in enumerate(zip(p, r))])
