import math

import numpy as np
import pytest

from conftest import random_poly
from hbsumma import lab, summ
from hbsumma.errors import CertificationError, ValidationError
from hbsumma.hb import HbContext, dilate_bound_constant, hb_norm
from hbsumma.pair import preset_pair
from hbsumma.series import TaylorSeries, h2_norm

LEB = lab.MeasureMoments.lebesgue()
GRID = [1.0 - 10.0**-k for k in np.linspace(0.5, 4.0, 15)]
CLOSED = 2.0 * (math.log(2.0) - 0.5) / math.log(2.0)


class TestMoments:
    def test_abel_in_log(self):
        rep = lab.borwein_check(summ.logarithmic(), summ.abel(), LEB, 1.0, 0, 512)
        assert rep.passed and rep.identity_max_rel < 1e-10
        assert "scalar-included" in rep.verdict

    def test_reverse_fails_at_one(self):
        rep = lab.borwein_check(summ.abel(), summ.logarithmic(), LEB)
        assert not rep.identity_ok and rep.identity_first_failure == 1

    def test_positive_measure_delta_one(self):
        mm = lab.MeasureMoments.mixture(lab.MeasureMoments.point_mass(0.5, 2.0), LEB)
        rep = lab.borwein_check(lambda n: np.zeros(np.shape(n)), lambda n: np.zeros(np.shape(n)), mm)
        assert rep.positivity_ok and rep.positivity_max_violation == 0.0

    def test_signed_measure_fails_positivity(self):
        mm = lab.MeasureMoments.mixture(lab.MeasureMoments.point_mass(1.0, 1.0),
                                        lab.MeasureMoments.point_mass(0.5, -0.5))
        rep = lab.borwein_check(lambda n: np.ones(np.shape(n)), lambda n: np.ones(np.shape(n)), mm, delta=0.9)
        assert not rep.positivity_ok

    def test_conditions_ab(self):
        assert lab.conditions_AB_check(summ.gen_abel(0), LEB).passed
        assert lab.conditions_AB_check(summ.logarithmic(), lab.MeasureMoments.point_mass(1.0)).passed
        rep = lab.conditions_AB_check(lambda n: 0.5 ** np.asarray(n, float), LEB)
        assert rep.identity_first_failure == 1

    def test_density_moments(self):
        mm = lab.MeasureMoments.density(lambda t: 2.0 * t)
        np.testing.assert_allclose(mm.moments(np.arange(5)), 2.0 / (np.arange(5) + 2.0), atol=1e-12)
        np.testing.assert_allclose(mm.abs_moments([3]), [0.4], atol=1e-12)

    def test_horizon_validation(self):
        with pytest.raises(ValidationError):
            lab.borwein_check(summ.abel(), summ.abel(), LEB, N=10, horizon=5)


class TestInclusion:
    def test_alternating(self):
        rep = lab.empirical_inclusion(summ.abel(), summ.logarithmic(), summ.VectorSequence.periodic([1.0, 0.0]), GRID)
        assert abs(rep.k_limit - 0.5) < 1e-3 and abs(rep.h_limit - 0.5) < 1e-3
        assert rep.difference < 1e-3 and rep.agrees
        r = GRID[-1]
        assert rep.h_last == pytest.approx(math.atanh(r) / -math.log1p(-r), abs=1e-12)

    def test_constant_vector(self):
        seq = summ.VectorSequence.constant(np.array([1.0, -2.0]))
        rep = lab.empirical_inclusion(summ.abel(), summ.logarithmic(), seq, GRID)
        assert rep.raw_difference < 1e-13 and rep.difference < 1e-10

    def test_partial_sums_in_hb(self, ctx):
        f = TaylorSeries([1.0, -2.0, 0.5, 3.0])
        seq = summ.VectorSequence.partial_sums(f, ctx)
        rep = lab.empirical_inclusion(summ.gen_abel(2.0), summ.logarithmic(), seq, GRID)
        assert rep.agrees
        assert hb_norm(TaylorSeries(np.asarray(rep.k_limit) - f.coeffs), ctx).norm_b < 1e-6
        assert hb_norm(TaylorSeries(np.asarray(rep.h_limit) - f.coeffs), ctx).norm_b < 1e-3

    def test_not_summable(self):
        seq = summ.VectorSequence(lambda ns: np.asarray(ns, float), growth=(1.0, 1.0 + 1e-9))
        grid = [0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99, 0.999]
        with pytest.raises(CertificationError, match="K-summability not evidenced"):
            lab.empirical_inclusion(summ.abel(), summ.logarithmic(), seq, grid)

    def test_report_json(self):
        import json

        rep = lab.empirical_inclusion(summ.abel(), summ.logarithmic(), summ.VectorSequence.periodic([1.0, 0.0]), GRID)
        json.dumps(rep.to_dict())


class TestIdentity:
    def test_constant(self, ctx):
        assert lab.lr_plus_identity_check(TaylorSeries([1.0]), ctx, 0.7) < 1e-12

    def test_z(self, ctx):
        assert lab.lr_plus_identity_check(TaylorSeries([0.0, 1.0]), ctx, 0.5) < 1e-9

    def test_random(self, ctx, rng):
        for _ in range(5):
            assert lab.lr_plus_identity_check(random_poly(rng, 8), ctx, 0.9) < 1e-8

    def test_truncated_input_path(self):
        ctx = HbContext(TaylorSeries.truncated(0.5 ** np.arange(80), (1.0, 0.5)), tol=1e-13)
        f = TaylorSeries.truncated(0.5 ** np.arange(60), (1.0, 0.5))
        assert lab.lr_plus_identity_check(f, ctx, 0.9) < 1e-9


class TestScan:
    def test_constant_function(self, ctx):
        table = lab.scan_divergence(TaylorSeries([1.0]), ctx, [0.1, 0.5, 0.9, 0.99])
        for row in table.rows:
            assert row.norm_b == pytest.approx(math.sqrt(2.0), rel=1e-14)
            assert row.fplus0 == pytest.approx(1.0, abs=1e-14)

    def test_closed_form(self, ctx):
        row = lab.scan_divergence(TaylorSeries([0.0, 1.0]), ctx, [0.5]).rows[0]
        assert abs(row.fplus0 - CLOSED) < 1e-12
        assert abs(row.fplus0_quad - CLOSED) < 1e-9
        assert row.fplus0.real == pytest.approx(0.55730, abs=1e-5)

    def test_row_invariants(self, ctx, rng):
        grid = [1 - 2.0**-k for k in range(1, 11)]
        for _ in range(10):
            f = random_poly(rng, 12)
            table = lab.scan_divergence(f, ctx, grid)
            assert table.invariants_hold()
            for row in table.rows:
                assert row.bound == pytest.approx(math.sqrt(dilate_bound_constant(ctx, row.r)) * h2_norm(f))
                assert row.quad_residual < 1e-8

    def test_threads_deterministic(self, ctx, rng, monkeypatch):
        f = random_poly(rng, 10)
        grid = [1 - 2.0**-k for k in range(1, 9)]
        serial = lab.scan_divergence(f, ctx, grid, threads=1).to_csv()
        monkeypatch.setenv(lab.THREADS_ENV, "4")
        assert lab.scan_divergence(f, ctx, grid).to_csv() == serial

    def test_row_errors_continue(self):
        ctx = HbContext(TaylorSeries.truncated(0.5 ** np.arange(30), (1.0, 0.5)), tol=1e-12)
        f = TaylorSeries.truncated(0.9 ** np.arange(20), (1.0, 0.9))
        table = lab.scan_divergence(f, ctx, [0.1, 0.9999])
        assert table.rows[0].error is None
        assert table.rows[1].error and "CertificationError" in table.rows[1].error
        assert "nan" in table.to_csv().splitlines()[2]

    def test_grid_validation(self, ctx):
        with pytest.raises(ValidationError):
            lab.scan_divergence(TaylorSeries([1.0]), ctx, [0.5, 0.4])
        with pytest.raises(ValidationError):
            lab.scan_divergence(TaylorSeries([1.0]), ctx, [1.0])

    def test_bad_threads_env(self, monkeypatch):
        monkeypatch.setenv(lab.THREADS_ENV, "many")
        with pytest.raises(ValidationError):
            lab.worker_count(3)

    def test_csv_header(self, ctx):
        text = lab.scan_divergence(TaylorSeries([1.0]), ctx, [0.5]).to_csv()
        assert text.splitlines()[0] == "r,norm_b,fplus0_re,fplus0_im,bound,horizon,tail_err,quad_residual"


class TestProbes:
    def test_zero_delta(self, ctx):
        t = lab.dilate_continuity_probe(TaylorSeries([1.0, 2.0]), ctx, 0.5, [0.0])
        assert t.moduli == (0.0,)

    def test_linear_modulus(self, ctx):
        deltas = [0.2, 0.1, 0.05, 0.025]
        t = lab.dilate_continuity_probe(TaylorSeries([0.0, 1.0]), ctx, 0.3, deltas)
        np.testing.assert_allclose(t.moduli, np.array(deltas) * math.sqrt(6), rtol=1e-14)

    def test_monotone_random(self, ctx, rng):
        deltas = [0.1 / 2**k for k in range(10)]
        t = lab.dilate_continuity_probe(random_poly(rng, 8), ctx, 0.4, deltas)
        assert t.monotone and t.final < 1e-3

    def test_lacunary(self):
        f = lab.lacunary(4, signs=[1, -1, 1, -1])
        assert f.nominal_degree == 8
        np.testing.assert_array_equal(np.flatnonzero(f.coeffs), [1, 2, 4, 8])
        assert f.coeffs[2] == -1
        with pytest.raises(ValidationError):
            lab.lacunary(3, signs=[1, 1])

    def test_proof_lower_bound_monotone(self):
        rs = 1 - np.logspace(-1, -12, 40)
        vals = [lab.proof_lower_bound(r, 0.5, 3.0) for r in rs]
        assert all(b >= a for a, b in zip(vals, vals[1:]))
        assert vals[-1] < 3.0
        with pytest.raises(ValidationError):
            lab.proof_lower_bound(0.4, 0.5, 1.0)


def test_lacunary_scan_long_grid():
    f = lab.lacunary(8)
    ctx = HbContext.from_pair(preset_pair("halfshift", phi_order=f.nominal_degree))
    table = lab.scan_divergence(f, ctx, [1 - 2.0**-k for k in range(1, 21)])
    assert not table.errors and table.invariants_hold()
    fp = [row.fplus0.real for row in table.rows]
    assert all(b >= a for a, b in zip(fp, fp[1:]))
