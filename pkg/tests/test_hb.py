import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import polys, random_poly
from hbsumma.errors import CertificationError, ValidationError
from hbsumma.hb import (
    HbContext,
    dilate_bound_constant,
    f_plus,
    f_plus_at_zero_dilated,
    fit_growth,
    hb_norm,
    sn_growth_table,
)
from hbsumma.series import TaylorSeries, dilate, h2_norm

ZERO = HbContext(TaylorSeries([0.0]))


class TestFPlus:
    def test_constant(self, ctx):
        np.testing.assert_allclose(f_plus(TaylorSeries([1.0]), ctx).coeffs, [1.0])

    def test_z(self, ctx):
        np.testing.assert_allclose(f_plus(TaylorSeries([0.0, 1.0]), ctx).coeffs, [2.0, 1.0])

    def test_zero_symbol(self, rng):
        assert not np.any(f_plus(random_poly(rng, 5), ZERO).coeffs)

    def test_phi_order_too_small(self):
        short = HbContext(TaylorSeries.truncated([1.0, 2.0], (2.0, 1.0)))
        with pytest.raises(ValidationError, match="phi order too small"):
            f_plus(TaylorSeries([1, 1, 1]), short)

    def test_brute_force(self, rng, ctx):
        f = random_poly(rng, 7)
        a, c = f.coeffs, ctx.phi.padded(8)
        ref = [sum(a[j + n] * np.conj(c[j]) for j in range(8 - n)) for n in range(8)]
        np.testing.assert_allclose(f_plus(f, ctx).coeffs, ref, atol=1e-12)


class TestNorm:
    def test_exact_values(self, ctx):
        assert abs(hb_norm(TaylorSeries([1.0]), ctx).norm_b ** 2 - 2) < 1e-12
        assert abs(hb_norm(TaylorSeries([0.0, 1.0]), ctx).norm_b ** 2 - 6) < 1e-12

    def test_zero_symbol_is_h2(self, rng):
        f = random_poly(rng, 6)
        assert hb_norm(f, ZERO).norm_b == pytest.approx(h2_norm(f), rel=1e-15)

    def test_zero_function(self, ctx):
        v = hb_norm(TaylorSeries([0.0, 0.0]), ctx)
        assert v.norm_b == 0.0

    def test_to_dict(self, ctx):
        d = hb_norm(TaylorSeries([1.0]), ctx).to_dict(ctx.order)
        assert set(d) == {"h2", "plus", "norm_b", "phi_order", "tail_error"}

    @given(polys(10))
    @settings(max_examples=60, deadline=None)
    def test_parseval_and_domination(self, f):
        from hbsumma.pair import preset_pair

        ctx = HbContext.from_pair(preset_pair("halfshift", 32))
        v = hb_norm(f, ctx)
        assert v.norm_b >= v.h2_part
        assert abs(v.norm_b**2 - v.h2_part**2 - h2_norm(v.f_plus) ** 2) <= 1e-12 * max(1.0, v.norm_b**2)

    @given(polys(8), polys(8), st.floats(-5, 5))
    @settings(max_examples=60, deadline=None)
    def test_seminorm_axioms(self, f, g, lam):
        from hbsumma.pair import preset_pair

        ctx = HbContext.from_pair(preset_pair("halfshift", 32))
        nf, ng = hb_norm(f, ctx).norm_b, hb_norm(g, ctx).norm_b
        assert hb_norm(f.scale(lam), ctx).norm_b == pytest.approx(abs(lam) * nf, rel=1e-10, abs=1e-10)
        assert hb_norm(f + g, ctx).norm_b <= nf + ng + 1e-10

    def test_truncation_error_interval(self):
        phi_full = TaylorSeries(0.5 ** np.arange(200))
        ctx = HbContext(TaylorSeries.truncated(phi_full.coeffs[:40], (1.0, 0.5)))
        a = 0.5 ** np.arange(200)
        full = hb_norm(TaylorSeries(a), HbContext(phi_full)).norm_b
        v = hb_norm(TaylorSeries.truncated(a[:20], (1.0, 0.5)), ctx)
        assert 0 < v.tail_error < 1e-4
        assert abs(v.norm_b - full) <= v.tail_error

    def test_bound_free_rejected(self, ctx):
        with pytest.raises(CertificationError):
            hb_norm(TaylorSeries.truncated([1.0]), ctx)


class TestDilated:
    def test_r_zero(self, ctx):
        assert f_plus_at_zero_dilated(TaylorSeries([3.0, 1.0]), ctx, 0.0) == 3.0

    def test_single_term(self, ctx):
        assert f_plus_at_zero_dilated(TaylorSeries([0.0, 1.0]), ctx, 0.5) == pytest.approx(1.0, abs=1e-15)

    def test_cross_path_exact(self, ctx, rng):
        for r in (0.0, 0.3, 0.9):
            f = random_poly(rng, 9)
            lhs = f_plus_at_zero_dilated(f, ctx, r)
            rhs = f_plus(dilate(f, r), ctx).coeffs[0]
            assert lhs == rhs

    def test_truncation_tail_certified(self):
        ctx = HbContext(TaylorSeries.truncated(0.5 ** np.arange(60), (1.0, 0.5)), tol=1e-12)
        f = TaylorSeries.truncated(0.9 ** np.arange(60), (1.0, 0.9))
        full = np.sum(0.9 ** np.arange(400) * 0.5 ** np.arange(400) * 0.5 ** np.arange(400))
        assert abs(f_plus_at_zero_dilated(f, ctx, 0.5) - full) < 1e-12
        short = TaylorSeries.truncated(f.coeffs[:10], (1.0, 0.9))
        with pytest.raises(CertificationError):
            f_plus_at_zero_dilated(short, ctx, 0.5)


class TestBoundConstant:
    def test_values(self, ctx):
        assert dilate_bound_constant(ctx, 0.0) == pytest.approx(2.0, abs=1e-14)
        assert dilate_bound_constant(ctx, 0.5) == pytest.approx(11.0, rel=1e-12)
        assert dilate_bound_constant(ZERO, 0.7) == 1.0

    def test_monotone(self, ctx):
        rs = np.linspace(0, 0.95, 30)
        cs = [dilate_bound_constant(ctx, r) for r in rs]
        assert all(b >= a for a, b in zip(cs, cs[1:]))

    def test_dilate_bound(self, ctx, rng):
        for _ in range(20):
            f = random_poly(rng, 12)
            for r in (0.0, 0.25, 0.5, 0.75, 0.9):
                lhs = hb_norm(dilate(f, r), ctx).norm_b ** 2
                assert lhs <= dilate_bound_constant(ctx, r) * h2_norm(f) ** 2 + 1e-10

    def test_range(self, ctx):
        with pytest.raises(ValidationError):
            dilate_bound_constant(ctx, 1.0)


class TestGrowth:
    def test_polynomial_stabilizes(self, ctx):
        f = TaylorSeries([1.0, -1.0, 2.0])
        t = sn_growth_table(f, ctx, 8)
        np.testing.assert_allclose(t.norms[2:], hb_norm(f, ctx).norm_b, rtol=1e-14)

    def test_ones_nondecreasing(self, ctx):
        t = sn_growth_table(TaylorSeries.truncated(np.ones(65), (1.0, 1.0)), ctx, 64)
        assert np.all(np.diff(t.norms) >= 0)
        assert math.isfinite(t.log_rate) and t.log_rate < math.log(1.1)

    def test_insufficient_data(self, ctx):
        with pytest.raises(ValidationError):
            sn_growth_table(TaylorSeries.truncated(np.ones(10), (1.0, 1.0)), ctx, 20)

    def test_fit(self):
        n = np.arange(40)
        log_rate, rate = fit_growth(n, 3.0 * 1.5**n)
        assert rate == pytest.approx(1.5, rel=1e-12)
        assert log_rate == pytest.approx(math.log(1.5), rel=1e-12)
