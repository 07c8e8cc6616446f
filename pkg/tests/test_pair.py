import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hbsumma.errors import ValidationError
from hbsumma.pair import (
    PythagoreanPair,
    check_nonextreme,
    circle_values,
    fejer_riesz,
    mate,
    outer_from_log_modulus,
    phi_coefficients,
    phi_residual,
    preset_pair,
)
from hbsumma.series import TaylorSeries, cauchy_product


def gap(b, n=4096):
    return 1.0 - np.abs(circle_values(b, n)) ** 2


class TestNonExtreme:
    def test_constant(self):
        rep = check_nonextreme(TaylorSeries([0.5]))
        assert rep.log_integral_estimate == pytest.approx(math.log(0.75), abs=1e-12)
        assert rep.verdict == "non-extreme"

    def test_inner(self):
        assert check_nonextreme(TaylorSeries([0.0, 1.0])).verdict == "extreme"

    def test_halfshift(self):
        rep = check_nonextreme(TaylorSeries([0.5, 0.5]))
        assert rep.log_integral_estimate == pytest.approx(-2 * math.log(2), abs=1e-3)
        assert rep.verdict == "non-extreme"
        assert rep.min_modulus_gap >= 0

    def test_refinement_converges(self):
        est = check_nonextreme(TaylorSeries([0.5, 0.5])).level_estimates
        errs = [abs(e + 2 * math.log(2)) for e in est]
        assert errs[0] > errs[1] > errs[2]

    def test_outside_ball(self):
        with pytest.raises(ValidationError, match="symbol exceeds unit ball"):
            check_nonextreme(TaylorSeries([0.8, 0.8]))


class TestFejerRiesz:
    def test_constant(self):
        p = fejer_riesz(TaylorSeries([0.5]))
        np.testing.assert_allclose(p.a.coeffs, [math.sqrt(0.75)], atol=1e-15)

    def test_zero(self):
        p = fejer_riesz(TaylorSeries([0.0]))
        np.testing.assert_allclose(p.a.coeffs, [1.0], atol=1e-15)

    def test_halfshift(self):
        p = fejer_riesz(TaylorSeries([0.5, 0.5]), tol=1e-12)
        np.testing.assert_allclose(p.a.padded(2), [0.5, -0.5], atol=1e-12)
        assert p.grid_residual < 1e-12

    @pytest.mark.parametrize("b", [[0.3, 0.4], [0.2, -0.3j, 0.25], [0.1, 0.2, 0.3, 0.1], [0.5, 0.5j]])
    def test_invariants(self, b):
        p = fejer_riesz(TaylorSeries(b), tol=1e-10)
        a0 = p.a.coeffs[0]
        assert a0.real > 0 and a0.imag == 0
        assert p.grid_residual < 1e-10
        np.testing.assert_allclose(np.abs(circle_values(p.a, 4096)) ** 2, gap(p.b), atol=1e-10)
        if p.a.nominal_degree > 0:
            roots = np.roots(p.a.coeffs[::-1])
            assert np.all(np.abs(roots) >= 1 - 1e-10)
        order = p.phi.nominal_degree
        back = cauchy_product(TaylorSeries(p.phi.coeffs), p.a).padded(order + 1)
        assert np.max(np.abs(back - p.b.padded(order + 1))) < 1e-10

    @given(st.lists(st.tuples(st.floats(-1, 1), st.floats(-1, 1)), min_size=1, max_size=4))
    @settings(max_examples=30, deadline=None)
    def test_random_symbols(self, parts):
        c = np.array([complex(x, y) for x, y in parts])
        b = TaylorSeries(0.9 * c / max(1.0, np.sum(np.abs(c))))
        p = fejer_riesz(b, tol=1e-9)
        assert p.grid_residual < 1e-9 and p.a.coeffs[0].real > 0

    def test_outside_ball(self):
        with pytest.raises(ValidationError):
            fejer_riesz(TaylorSeries([0.9, 0.9]))

    def test_inner_rejected(self):
        with pytest.raises(ValidationError):
            fejer_riesz(TaylorSeries([0.0, 1.0]))


class TestOuter:
    def test_constant(self):
        a = outer_from_log_modulus(np.full(256, 0.75), 8)
        np.testing.assert_allclose(a.coeffs, [math.sqrt(3) / 2] + [0] * 8, atol=1e-14)

    def test_matches_fejer_riesz_with_boundary_zero(self):
        a = outer_from_log_modulus(gap(TaylorSeries([0.5, 0.5])), 64)
        ref = np.zeros(65)
        ref[:2] = [0.5, -0.5]
        assert np.max(np.abs(a.coeffs - ref)) < 1e-8

    def test_residual(self):
        b = TaylorSeries([0.3, 0.4])
        a = outer_from_log_modulus(gap(b), 64)
        res = np.max(np.abs(np.abs(circle_values(TaylorSeries(a.coeffs), 4096)) ** 2 - gap(b)))
        assert res < 1e-8
        assert a.coeffs[0].real > 0 and a.coeffs[0].imag == 0

    def test_agrees_with_fejer_riesz(self):
        b = TaylorSeries([0.2, 0.3, -0.25j])
        a = outer_from_log_modulus(gap(b), 32)
        ref = fejer_riesz(b).a.padded(33)
        assert np.max(np.abs(a.coeffs - ref)) < 1e-6

    def test_negative_samples(self):
        with pytest.raises(ValidationError):
            outer_from_log_modulus(np.array([0.5, -0.1, 0.5, 0.5]), 2)

    def test_mate_outer_route(self):
        p = mate(TaylorSeries([0.3, 0.4]), method="outer", order=32)
        assert p.grid_residual < 1e-8


class TestPhi:
    def test_halfshift_phi(self):
        p = fejer_riesz(TaylorSeries([0.5, 0.5]))
        np.testing.assert_allclose(phi_coefficients(p, 5).coeffs, [1, 2, 2, 2, 2, 2], atol=1e-12)

    def test_zero_symbol(self):
        assert not np.any(phi_coefficients(fejer_riesz(TaylorSeries([0.0])), 4).coeffs)

    def test_constant(self):
        c = phi_coefficients(fejer_riesz(TaylorSeries([0.5])), 3).coeffs
        np.testing.assert_allclose(c, [0.5 / math.sqrt(0.75), 0, 0, 0], atol=1e-15)

    def test_preset_tail_and_residual(self, halfshift):
        assert halfshift.phi.tail_bound == (2.0, 1.0)
        assert phi_residual(halfshift) < 1e-12

    def test_unknown_preset(self):
        with pytest.raises(ValidationError):
            preset_pair("nope")


def test_pair_json_roundtrip(halfshift):
    data = json.loads(halfshift.to_json())
    assert {"b", "a", "phi", "residual"} <= set(data)
    back = PythagoreanPair.from_dict(data)
    np.testing.assert_array_equal(back.phi.coeffs, halfshift.phi.coeffs)
    assert back.phi.tail_bound == (2.0, 1.0)
    with pytest.raises(ValidationError):
        PythagoreanPair.from_dict({"b": []})
