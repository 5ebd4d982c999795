import numpy as np
import pytest
from hypothesis import strategies as st

from speedpd.model import EnergyModel, Instance


@st.composite
def agreeable_instances(draw, max_n=8, integer=False):
    n = draw(st.integers(1, max_n))
    alpha = draw(st.sampled_from([2.0, 2.5, 3.0]))
    g = draw(st.sampled_from([0.5, 1.0, 2.0]))
    L = draw(st.sampled_from([0.05, 0.5, 2.0, 10.0]))
    if integer:
        gaps = draw(st.lists(st.integers(0, 3), min_size=n, max_size=n))
        slack = draw(st.lists(st.integers(1, 5), min_size=n, max_size=n))
        work = draw(st.lists(st.sampled_from([0.25, 0.5, 1.0, 2.0]), min_size=n, max_size=n))
    else:
        gaps = draw(st.lists(st.floats(0.0, 3.0), min_size=n, max_size=n))
        slack = draw(st.lists(st.floats(0.1, 5.0), min_size=n, max_size=n))
        work = draw(st.lists(st.floats(0.1, 2.0), min_size=n, max_size=n))
    # times on a 2^-10 grid: windows never shrink to a few ulps
    r = (np.round(np.cumsum([0.0] + list(gaps[1:])) * 1024) / 1024).tolist()
    d = []
    prev = -np.inf
    for k in range(n):
        prev = max(prev, r[k] + max(round(slack[k] * 1024), 1) / 1024)
        d.append(prev)
    return Instance.from_triples(EnergyModel(alpha, L, g), zip(r, d, work))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def worked():
    """Single job r=0, d=2, w=1 with alpha=2, g=1, L=10."""
    return Instance.from_triples(EnergyModel(2.0, 10.0, 1.0), [(0.0, 2.0, 1.0)])
