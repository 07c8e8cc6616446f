import numpy as np
import pytest
from hypothesis import strategies as st

from hbsumma.hb import HbContext
from hbsumma.pair import preset_pair
from hbsumma.series import TaylorSeries


@pytest.fixture(scope="session")
def halfshift():
    return preset_pair("halfshift", phi_order=256)


@pytest.fixture(scope="session")
def ctx(halfshift):
    return HbContext.from_pair(halfshift)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_poly(rng, degree):
    return TaylorSeries(rng.normal(size=degree + 1) + 1j * rng.normal(size=degree + 1))


finite = st.floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False)
complexes = st.builds(complex, finite, finite)


def polys(max_degree=12):
    return st.lists(complexes, min_size=1, max_size=max_degree + 1).map(TaylorSeries)
