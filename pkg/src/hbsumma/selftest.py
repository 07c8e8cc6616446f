"""Acceptance checks, runnable from the CLI (``hbsumma selftest``) and from pytest."""

from __future__ import annotations

import math
import time
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from . import summ
from .hb import HbContext, hb_norm, sn_growth_table
from .lab import (
    MeasureMoments,
    borwein_check,
    empirical_inclusion,
    lacunary,
    lr_plus_identity_check,
    scan_divergence,
)
from .pair import fejer_riesz, preset_pair
from .series import TaylorSeries, dilate

SEED = 20240601


@dataclass(frozen=True)
class CheckResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number:2d} {self.title}: {self.detail} ({self.seconds:.2f}s)"


def _random_poly(rng: np.random.Generator, max_degree: int) -> TaylorSeries:
    d = int(rng.integers(0, max_degree + 1))
    return TaylorSeries(rng.normal(size=d + 1) + 1j * rng.normal(size=d + 1))


def check_pythagorean() -> tuple[bool, str]:
    t = time.perf_counter()
    pair = fejer_riesz(TaylorSeries([0.5, 0.5]), tol=1e-12)
    dt = time.perf_counter() - t
    err = float(np.max(np.abs(pair.a.padded(2) - np.array([0.5, -0.5]))))
    ok = err < 1e-12 and pair.grid_residual < 1e-12 and dt < 1.0
    return ok, f"|a - (1-z)/2| = {err:.1e}, residual = {pair.grid_residual:.1e}, {dt:.3f}s"


def check_exact_norms() -> tuple[bool, str]:
    ctx = HbContext.from_pair(preset_pair("halfshift"))
    t = time.perf_counter()
    n1 = hb_norm(TaylorSeries([1.0]), ctx).norm_b ** 2
    nz = hb_norm(TaylorSeries([0.0, 1.0]), ctx).norm_b ** 2
    dt = time.perf_counter() - t
    ok = abs(n1 - 2.0) <= 1e-12 and abs(nz - 6.0) <= 1e-12 and dt < 0.1
    return ok, f"||1||^2 = {n1!r}, ||z||^2 = {nz!r}, {dt:.4f}s"


def check_abel_dilate() -> tuple[bool, str]:
    rng = np.random.default_rng(SEED)
    abel = summ.abel()
    worst = 0.0
    t = time.perf_counter()
    for _ in range(50):
        f = _random_poly(rng, 16)
        for r in (0.3, 0.7, 0.95):
            got = summ.mean_of_partial_sums(abel, f, None, r).series.coeffs
            worst = max(worst, float(np.max(np.abs(got - dilate(f, r).coeffs))))
    dt = time.perf_counter() - t
    return worst <= 1e-10 and dt < 5.0, f"max deviation {worst:.1e}, {dt:.2f}s"


def check_log_dual_path() -> tuple[bool, str]:
    rng = np.random.default_rng(SEED + 1)
    log = summ.logarithmic()
    worst = 0.0
    t = time.perf_counter()
    for _ in range(20):
        f = _random_poly(rng, 32)
        for r in (0.1, 0.5, 0.9, 0.99):
            series = summ.mean_of_partial_sums(log, f, None, r).series.coeffs
            quad = summ.log_mean_integral(f, r, tol=1e-11).coeffs
            worst = max(worst, float(np.max(np.abs(series - quad))))
    dt = time.perf_counter() - t
    return worst <= 1e-9 and dt < 10.0, f"max deviation {worst:.1e}, {dt:.2f}s"


def check_regularity() -> tuple[bool, str]:
    t = time.perf_counter()
    regular = [summ.abel(), summ.logarithmic(), summ.cesaro(), summ.borel(1.0, 1.0)]
    regular += [summ.gen_abel(a) for a in (-0.5, 0.0, 1.0, 2.0)]
    verdicts = {m.name: summ.regularity_report(m).verdict for m in regular}
    const_row = summ.matrix_method(lambda m: np.eye(1, m + 1)[0], name="constant-row")
    counter = summ.regularity_report(const_row).verdict
    dt = time.perf_counter() - t
    bad = [name for name, v in verdicts.items() if v != "regular"]
    ok = not bad and counter == "not regular" and dt < 5.0
    detail = f"{len(verdicts) - len(bad)}/{len(verdicts)} regular, constant-row {counter!r}, {dt:.2f}s"
    return ok, detail


def _sweep():
    rng = np.random.default_rng(SEED + 2)
    ctx = HbContext.from_pair(preset_pair("halfshift", phi_order=64))
    grid = [1.0 - 2.0**-k for k in range(1, 11)]
    return rng, ctx, grid


def check_operator_bound() -> tuple[bool, str]:
    rng, ctx, grid = _sweep()
    t = time.perf_counter()
    worst = -math.inf
    failures = 0
    for _ in range(50):
        table = scan_divergence(_random_poly(rng, 16), ctx, grid, threads=1)
        for row in table.rows:
            if row.error is not None or not row.bound_ok:
                failures += 1
            else:
                worst = max(worst, row.norm_b - row.bound)
    dt = time.perf_counter() - t
    ok = failures == 0 and dt < 30.0
    return ok, f"{failures} violations, max(norm_b - bound) = {worst:.3e}, {dt:.2f}s"


def check_lr_plus_identity() -> tuple[bool, str]:
    rng, ctx, grid = _sweep()
    worst = 0.0
    for _ in range(50):
        f = _random_poly(rng, 16)
        for r in grid:
            worst = max(worst, lr_plus_identity_check(f, ctx, r))
    row = scan_divergence(TaylorSeries([0.0, 1.0]), ctx, [0.5], threads=1).rows[0]
    closed = 2.0 * (math.log(2.0) - 0.5) / math.log(2.0)
    err = max(abs(row.fplus0 - closed), abs(row.fplus0_quad - closed))
    ok = worst < 1e-8 and err <= 1e-9
    return ok, f"max residual {worst:.1e}, closed-form error {err:.1e}"


def check_inclusion() -> tuple[bool, str]:
    t = time.perf_counter()
    rep = borwein_check(summ.logarithmic(), summ.abel(), MeasureMoments.lebesgue(), 1.0, 0, 512)
    grid = [1.0 - 10.0**-k for k in np.linspace(0.5, 4.0, 15)]
    inc = empirical_inclusion(summ.abel(), summ.logarithmic(), summ.VectorSequence.periodic([1.0, 0.0]), grid)
    dt = time.perf_counter() - t
    dk, dh = abs(inc.k_limit - 0.5), abs(inc.h_limit - 0.5)
    ok = rep.passed and rep.identity_max_rel < 1e-10 and dk < 1e-3 and dh < 1e-3 and dt < 5.0
    detail = (
        f"moment violation {rep.identity_max_rel:.1e}; limits abel {inc.k_limit:.6f}, "
        f"log {inc.h_limit:.6f} (last-point log mean {inc.h_last:.6f}), {dt:.2f}s"
    )
    return ok, detail


def check_growth() -> tuple[bool, str]:
    rng = np.random.default_rng(SEED + 3)
    a = np.exp(2j * np.pi * rng.random(257)) * rng.random(257)
    f = TaylorSeries(a, is_exact=False, tail_bound=(1.0, 1.0))
    ctx = HbContext.from_pair(preset_pair("halfshift", phi_order=256))
    r128 = sn_growth_table(f, ctx, 128).rate
    r256 = sn_growth_table(f, ctx, 256).rate
    change = abs(r256 - r128) / r128
    ok = math.isfinite(r128) and math.isfinite(r256) and change < 0.05
    return ok, f"rate(128) = {r128:.6f}, rate(256) = {r256:.6f}, change {change:.1e}"


def check_scan_smoke() -> tuple[bool, str]:
    f = lacunary(10)
    ctx = HbContext.from_pair(preset_pair("halfshift", phi_order=f.nominal_degree))
    t = time.perf_counter()
    table = scan_divergence(f, ctx, [1.0 - 2.0**-k for k in range(1, 21)])
    dt = time.perf_counter() - t
    ok = not table.errors and table.invariants_hold()
    last = table.rows[-1]
    return ok, (
        f"{len(table.rows)} rows, {len(table.errors)} errors, last |L_r[f]+(0)| = "
        f"{abs(last.fplus0):.4f}, {dt:.2f}s"
    )


CHECKS: dict[int, tuple[str, Callable[[], tuple[bool, str]]]] = {
    1: ("Pythagorean identity for the halfshift symbol", check_pythagorean),
    2: ("exact norms ||1||_b^2 = 2, ||z||_b^2 = 6", check_exact_norms),
    3: ("Abel means of partial sums equal dilates", check_abel_dilate),
    4: ("logarithmic mean: series path vs quadrature", check_log_dual_path),
    5: ("regularity reports", check_regularity),
    6: ("operator bound on scan rows", check_operator_bound),
    7: ("L_r[f]+(0) identity and closed form", check_lr_plus_identity),
    8: ("scalar inclusion evidence", check_inclusion),
    9: ("growth rate of partial-sum norms", check_growth),
    10: ("divergence scan smoke test", check_scan_smoke),
}


def run_check(number: int) -> CheckResult:
    title, fn = CHECKS[number]
    t = time.perf_counter()
    try:
        passed, detail = fn()
    except Exception as exc:  # a crash is a failed criterion, reported not raised
        passed, detail = False, f"{type(exc).__name__}: {exc}"
    return CheckResult(number, title, bool(passed), detail, time.perf_counter() - t)


def run_all(numbers=None) -> list[CheckResult]:
    return [run_check(n) for n in (numbers or sorted(CHECKS))]
