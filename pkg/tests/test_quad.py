import math

import numpy as np
import pytest

from hbsumma.errors import QuadratureError
from hbsumma.quad import adaptive_simpson


def test_log_singular_weight():
    r = 0.9
    value, err, panels = adaptive_simpson(lambda t: 1.0 / (1.0 - t), 0.0, r, tol=1e-12)
    assert abs(value - math.log(10.0)) < 1e-12
    assert err < 1e-12 and panels > 1


def test_vector_integrand():
    ks = np.arange(5.0)
    value, _, _ = adaptive_simpson(lambda t: t**ks, 0.0, 1.0, tol=1e-13)
    np.testing.assert_allclose(value.real, 1.0 / (ks + 1.0), atol=1e-13)


def test_complex_and_reversed():
    value, _, _ = adaptive_simpson(lambda t: np.exp(1j * t), math.pi, 0.0, tol=1e-12)
    assert abs(value - (-2j)) < 1e-11


def test_empty_interval():
    assert adaptive_simpson(lambda t: t, 1.0, 1.0)[0] == 0


def test_panel_cap():
    with pytest.raises(QuadratureError):
        adaptive_simpson(lambda t: 1.0 / (1.0 - t), 0.0, 1.0 - 1e-12, tol=1e-14, max_intervals=50)


def test_bad_tolerance():
    with pytest.raises(ValueError):
        adaptive_simpson(lambda t: t, 0.0, 1.0, tol=0.0)
