"""Experiment harness: inclusion checks, the L_r[f]+ identity and divergence scans."""

from __future__ import annotations

import math
import os
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import CertificationError, HbsummaError, ValidationError
from .hb import HbContext, dilate_bound_constant, f_plus_at_zero_dilated, hb_norm
from .quad import adaptive_simpson
from .series import TaylorSeries, dilate, h2_norm
from .summ import (
    SummabilityMethod,
    VectorSequence,
    logarithmic,
    mean_of_partial_sums,
    means,
)

THREADS_ENV = "HBSUMMA_THREADS"


# ---------------------------------------------------------------- measures

@dataclass(frozen=True)
class MeasureMoments:
    """Moments mu_n = int t^n dmu and |mu|-moments int t^n |dmu| of a measure on [0, 1]."""

    moments: Callable[[np.ndarray], np.ndarray]
    abs_moments: Callable[[np.ndarray], np.ndarray]
    description: str = ""

    @classmethod
    def lebesgue(cls) -> MeasureMoments:
        m = lambda ns: 1.0 / (np.asarray(ns, dtype=float) + 1.0)  # noqa: E731
        return cls(m, m, "lebesgue")

    @classmethod
    def point_mass(cls, t0: float = 1.0, weight: float = 1.0) -> MeasureMoments:
        if not 0.0 <= t0 <= 1.0:
            raise ValidationError("point mass must sit in [0, 1]")
        m = lambda ns: weight * np.power(t0, np.asarray(ns, dtype=float))  # noqa: E731
        a = lambda ns: abs(weight) * np.power(t0, np.asarray(ns, dtype=float))  # noqa: E731
        return cls(m, a, f"{weight:g}*delta({t0:g})")

    @classmethod
    def mixture(cls, *parts: MeasureMoments) -> MeasureMoments:
        """Sum of measures. The |mu|-moments are summed, which is exact for
        mutually singular parts and an upper bound otherwise."""
        if not parts:
            raise ValidationError("mixture needs at least one part")
        m = lambda ns: sum(p.moments(ns) for p in parts)  # noqa: E731
        a = lambda ns: sum(p.abs_moments(ns) for p in parts)  # noqa: E731
        return cls(m, a, " + ".join(p.description for p in parts))

    @classmethod
    def density(cls, g: Callable[[float], float], tol: float = 1e-12, description: str = "density"):
        """Measure g(t) dt; moments by adaptive Simpson, cached per index."""
        cache: dict[int, tuple[float, float]] = {}

        def both(n: int) -> tuple[float, float]:
            if n not in cache:
                m, _, _ = adaptive_simpson(lambda t: t**n * g(t), 0.0, 1.0, tol=tol)
                a, _, _ = adaptive_simpson(lambda t: t**n * abs(g(t)), 0.0, 1.0, tol=tol)
                cache[n] = (m.real, a.real)
            return cache[n]

        m = lambda ns: np.array([both(int(n))[0] for n in np.atleast_1d(ns)])  # noqa: E731
        a = lambda ns: np.array([both(int(n))[1] for n in np.atleast_1d(ns)])  # noqa: E731
        return cls(m, a, description)


def _weights_fn(w) -> Callable[[np.ndarray], np.ndarray]:
    if isinstance(w, SummabilityMethod):
        if w.kind != "power_series":
            raise ValidationError(f"{w.name} is not a power-series method")
        return w.weights
    if callable(w):
        return w
    arr = np.asarray(w, dtype=float)
    return lambda ns: arr[np.asarray(ns)]


@dataclass(frozen=True)
class MomentReport:
    identity_ok: bool
    identity_max_rel: float
    identity_first_failure: int | None
    positivity_ok: bool
    positivity_max_violation: float
    positivity_first_failure: int | None
    horizon: int
    verdict: str

    @property
    def passed(self) -> bool:
        return self.identity_ok and self.positivity_ok

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def borwein_check(p_weights, q_weights, mm: MeasureMoments, delta: float = 1.0, N: int = 0,
                  horizon: int = 512, rtol: float = 1e-10) -> MomentReport:
    """Check p_n = q_n mu_n and mu_n >= delta int t^n |dmu| for N <= n <= horizon.

    Passing both is evidence (up to the horizon) that q is scalar-included in p.
    """
    if horizon < N:
        raise ValidationError("horizon must be >= N")
    if not 0.0 < delta <= 1.0:
        raise ValidationError("delta must lie in (0, 1]")
    ns = np.arange(N, horizon + 1)
    p = np.asarray(_weights_fn(p_weights)(ns), dtype=float)
    q = np.asarray(_weights_fn(q_weights)(ns), dtype=float)
    mu = np.asarray(mm.moments(ns), dtype=float)
    amu = np.asarray(mm.abs_moments(ns), dtype=float)
    scale = np.maximum(np.abs(p), np.finfo(float).tiny)
    rel = np.abs(p - q * mu) / scale
    bad1 = np.flatnonzero(rel > rtol)
    viol = np.maximum(0.0, delta * amu - mu) / np.maximum(amu, np.finfo(float).tiny)
    bad2 = np.flatnonzero(viol > rtol)
    ok1, ok2 = bad1.size == 0, bad2.size == 0
    if ok1 and ok2:
        verdict = f"q scalar-included in p (evidence up to horizon {horizon})"
    else:
        verdict = "moment conditions fail"
    return MomentReport(
        identity_ok=ok1,
        identity_max_rel=float(rel.max()),
        identity_first_failure=None if ok1 else int(ns[bad1[0]]),
        positivity_ok=ok2,
        positivity_max_violation=float(viol.max()),
        positivity_first_failure=None if ok2 else int(ns[bad2[0]]),
        horizon=horizon,
        verdict=verdict,
    )


def conditions_AB_check(p_weights, mm: MeasureMoments, delta: float = 1.0, N: int = 0,
                        horizon: int = 512, rtol: float = 1e-10) -> MomentReport:
    """Check 1/(n+1) = p_n mu_n (A) and mu_n >= delta |mu|_n (B) for N <= n <= horizon."""
    return borwein_check(
        lambda ns: 1.0 / (np.asarray(ns, dtype=float) + 1.0),
        p_weights, mm, delta, N, horizon, rtol,
    )


# ---------------------------------------------------------------- inclusion

def _design(method: SummabilityMethod, rs) -> np.ndarray:
    """Regression columns whose first entry is the limit at the end of the domain."""
    rs = np.asarray(rs, dtype=float)
    if method.kind == "power_series":
        u = np.array([1.0 / method.p(r) for r in rs])
        return np.stack([np.ones_like(u), u, u * (method.radius - rs)], axis=1)
    u = 1.0 / rs
    return np.stack([np.ones_like(u), u], axis=1)


def limit_estimate(method: SummabilityMethod, grid, values) -> np.ndarray:
    """Extrapolate the last-quartile means to the end of the method's domain.

    For a power-series method, K_r[x] - x = u(r) h(r) with u = 1/p(r) and
    h(r) = sum p_n (x_n - x) r^n; when h is smooth at R this is fitted as
    x + u (alpha + beta (R - r)) and x is returned. Matrix and kernel methods
    use a linear fit in 1/r.
    """
    values = np.asarray(values)
    A = _design(method, grid)
    k = max(A.shape[1], len(grid) // 4)
    y = values[-k:].reshape(k, -1)
    coef, *_ = np.linalg.lstsq(A[-k:], y, rcond=None)
    est = coef[0].reshape(values.shape[1:])
    return est.item() if est.ndim == 0 else est


@dataclass(frozen=True)
class InclusionReport:
    k_name: str
    h_name: str
    grid: tuple[float, ...]
    k_last: object
    h_last: object
    k_limit: object
    h_limit: object
    k_oscillation: float
    difference: float
    raw_difference: float
    tol: float
    agrees: bool

    def to_dict(self) -> dict:
        def enc(v):
            v = np.asarray(v)
            if np.iscomplexobj(v):
                return {"re": v.real.tolist(), "im": v.imag.tolist()}
            return v.tolist()

        return {
            "K": self.k_name,
            "H": self.h_name,
            "grid": list(self.grid),
            "k_last": enc(self.k_last),
            "h_last": enc(self.h_last),
            "k_limit": enc(self.k_limit),
            "h_limit": enc(self.h_limit),
            "k_oscillation": self.k_oscillation,
            "difference": self.difference,
            "raw_difference": self.raw_difference,
            "tol": self.tol,
            "agrees": self.agrees,
        }


def empirical_inclusion(K: SummabilityMethod, H: SummabilityMethod, seq: VectorSequence,
                        r_grid, tol: float = 1e-3, mean_tol: float = 1e-13) -> InclusionReport:
    """Finite evidence that the K-limit of ``seq`` is also its H-limit.

    Both limits are extrapolated from the last quartile of the grid (see
    ``limit_estimate``); raw last-point values are reported alongside.

    Raises:
        CertificationError: "K-summability not evidenced" if the K-means vary by
            ``tol`` or more over the last quartile of the grid.
    """
    grid = [float(r) for r in r_grid]
    if len(grid) < 4 or any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValidationError("grid must be increasing with at least 4 points")
    kv = np.array([means(K, seq, r, mean_tol).value for r in grid])
    hv = np.array([means(H, seq, r, mean_tol).value for r in grid])
    q = max(2, len(grid) // 4)
    last = kv[-q:]
    osc = max(seq.norm(a - b) for a in last for b in last)
    if not osc < tol:
        raise CertificationError(
            f"K-summability not evidenced: {K.name} means vary by {osc:.3e} on the last quartile"
        )
    k_lim = limit_estimate(K, grid, kv)
    h_lim = limit_estimate(H, grid, hv)
    diff = seq.norm(np.asarray(k_lim) - np.asarray(h_lim))
    raw = seq.norm(kv[-1] - hv[-1])
    unwrap = lambda v: v.item() if np.ndim(v) == 0 else v  # noqa: E731
    return InclusionReport(
        k_name=K.name,
        h_name=H.name,
        grid=tuple(grid),
        k_last=unwrap(kv[-1]),
        h_last=unwrap(hv[-1]),
        k_limit=k_lim,
        h_limit=h_lim,
        k_oscillation=float(osc),
        difference=float(diff),
        raw_difference=float(raw),
        tol=tol,
        agrees=bool(diff < tol),
    )


# ---------------------------------------------------------------- L_r[f]+ identity

def _lr_plus_direct(mean_series: TaylorSeries, ctx: HbContext) -> complex:
    a = mean_series.coeffs
    c = ctx.phi_coeffs(a.size)
    return complex(np.vdot(c, a))


def _lr_plus_quadrature(f: TaylorSeries, ctx: HbContext, r: float, tol: float) -> complex:
    """(1/log(1/(1-r))) int_0^r (f_t)+(0) / (1 - t) dt.

    Integrated in s = log(1/(1-t)), where dt/(1-t) = ds, so the integrand is
    bounded on [0, log(1/(1-r))] however close r is to 1.
    """
    S = -math.log1p(-r)
    if f.is_exact:
        c = ctx.phi_coeffs(f.coeffs.size)
        w = np.conj(c) * f.coeffs
        ks = np.arange(w.size, dtype=float)
        integrand = lambda s: np.dot(w, np.power(-math.expm1(-s), ks))  # noqa: E731
    else:
        integrand = lambda s: f_plus_at_zero_dilated(f, ctx, -math.expm1(-s))  # noqa: E731
    value, _, _ = adaptive_simpson(integrand, 0.0, S, tol=0.5 * tol * S)
    return complex(value) / S


def lr_plus_identity_check(f: TaylorSeries, ctx: HbContext, r: float, tol: float = 1e-10) -> float:
    """|direct (L_r[f])+(0) - quadrature path|."""
    if not 0.0 < r < 1.0:
        raise ValidationError(f"r = {r} outside (0, 1)")
    direct = _lr_plus_direct(mean_of_partial_sums(logarithmic(), f, None, r).series, ctx)
    return abs(direct - _lr_plus_quadrature(f, ctx, r, tol))


# ---------------------------------------------------------------- scan

SCAN_COLUMNS = ("r", "norm_b", "fplus0_re", "fplus0_im", "bound", "horizon", "tail_err", "quad_residual")


@dataclass(frozen=True)
class ScanRow:
    r: float
    norm_b: float = math.nan
    fplus0: complex = complex(math.nan, math.nan)
    fplus0_quad: complex = complex(math.nan, math.nan)
    bound: float = math.nan
    horizon: int = -1
    tail_err: float = math.nan
    error: str | None = None

    @property
    def quad_residual(self) -> float:
        return abs(self.fplus0 - self.fplus0_quad)

    @property
    def bound_ok(self) -> bool:
        return self.error is None and self.norm_b <= self.bound + 1e-8 + self.tail_err

    @property
    def dominance_ok(self) -> bool:
        return self.error is None and self.norm_b + 1e-12 * max(1.0, self.norm_b) >= abs(self.fplus0)

    def values(self) -> tuple:
        return (self.r, self.norm_b, self.fplus0.real, self.fplus0.imag, self.bound,
                self.horizon, self.tail_err, self.quad_residual)


@dataclass(frozen=True)
class ScanTable:
    rows: tuple[ScanRow, ...]
    columns: tuple[str, ...] = SCAN_COLUMNS
    meta: dict = field(default_factory=dict)

    @property
    def ok_rows(self) -> list[ScanRow]:
        return [row for row in self.rows if row.error is None]

    @property
    def errors(self) -> list[ScanRow]:
        return [row for row in self.rows if row.error is not None]

    def invariants_hold(self) -> bool:
        ok = self.ok_rows
        return bool(ok) and all(row.bound_ok and row.dominance_ok for row in ok)

    def to_csv(self) -> str:
        lines = [",".join(self.columns)]
        for row in self.rows:
            lines.append(",".join(_fmt(v) for v in row.values()))
        return "\n".join(lines) + "\n"


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return format(float(v), ".16e")


def _scan_row(f: TaylorSeries, ctx: HbContext, r: float, f_h2: float, quad_tol: float) -> ScanRow:
    try:
        pm = mean_of_partial_sums(logarithmic(), f, ctx, r)
        vec = pm.hb
        direct = _lr_plus_direct(pm.series, ctx)
        quad = _lr_plus_quadrature(f, ctx, r, quad_tol)
        bound = math.sqrt(dilate_bound_constant(ctx, r)) * f_h2
        return ScanRow(r=r, norm_b=vec.norm_b, fplus0=direct, fplus0_quad=quad, bound=bound,
                       horizon=pm.horizon, tail_err=pm.tail_err)
    except HbsummaError as exc:
        return ScanRow(r=r, error=f"{type(exc).__name__}: {exc}")


def worker_count(n_tasks: int) -> int:
    env = os.environ.get(THREADS_ENV)
    cap = os.cpu_count() or 1
    if env:
        try:
            cap = max(1, int(env))
        except ValueError:
            raise ValidationError(f"{THREADS_ENV} must be a positive integer, got {env!r}") from None
    return max(1, min(cap, n_tasks))


def scan_divergence(f: TaylorSeries, ctx: HbContext, r_grid, quad_tol: float = 1e-10,
                    threads: int | None = None) -> ScanTable:
    """Per-r rows of ||L_r[f]||_b, (L_r[f])+(0) by two paths, and the operator bound.

    Rows whose tails cannot be certified carry an ``error`` message and NaNs;
    the scan continues. Row order follows the grid regardless of threading.
    """
    grid = [float(r) for r in r_grid]
    if not grid or any(not 0.0 < r < 1.0 for r in grid):
        raise ValidationError("scan grid must lie in (0, 1)")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValidationError("scan grid must be strictly increasing")
    if f.is_exact:
        f_h2 = h2_norm(f)
    elif f.tail_bound is not None:
        f_h2 = h2_norm(f, with_bound=True)[1]
    else:
        raise CertificationError("bound-free truncation: scan not certifiable")
    n = threads if threads is not None else worker_count(len(grid))
    if n <= 1:
        rows = [_scan_row(f, ctx, r, f_h2, quad_tol) for r in grid]
    else:
        with ThreadPoolExecutor(max_workers=n) as pool:
            rows = list(pool.map(lambda r: _scan_row(f, ctx, r, f_h2, quad_tol), grid))
    return ScanTable(rows=tuple(rows), meta={"f_h2": f_h2, "degree": f.nominal_degree})


# ---------------------------------------------------------------- probes

@dataclass(frozen=True)
class ModulusTable:
    t0: float
    deltas: tuple[float, ...]
    moduli: tuple[float, ...]
    monotone: bool
    final: float


def dilate_continuity_probe(f: TaylorSeries, ctx: HbContext, t0: float, delta_grid) -> ModulusTable:
    """||f_{t0+delta} - f_{t0}||_b for each delta; ``monotone`` is true when the
    moduli do not increase as |delta| decreases."""
    deltas = [float(d) for d in delta_grid]
    if any(not 0.0 <= t0 + d < 1.0 for d in deltas) or not 0.0 <= t0 < 1.0:
        raise ValidationError("t0 and t0 + delta must lie in [0, 1)")
    base = dilate(f, t0)
    mods = [0.0 if d == 0.0 else hb_norm(dilate(f, t0 + d) - base, ctx).norm_b for d in deltas]
    order = np.argsort(-np.abs(deltas), kind="stable")
    seq = np.array(mods)[order]
    monotone = bool(np.all(np.diff(seq) <= 1e-15 * np.maximum(seq[:-1], 1.0)))
    return ModulusTable(t0=t0, deltas=tuple(deltas), moduli=tuple(mods), monotone=monotone,
                        final=float(seq[-1]))


def lacunary(levels: int = 10, weights=None, signs=None, base: int = 2) -> TaylorSeries:
    """Polynomial with coefficient weights[k] * signs[k] at index base**k, k < levels."""
    if levels < 1 or base < 2:
        raise ValidationError("lacunary family needs levels >= 1 and base >= 2")
    w = np.ones(levels) if weights is None else np.asarray(weights, dtype=np.complex128)
    s = np.ones(levels) if signs is None else np.asarray(signs, dtype=float)
    if w.shape != (levels,) or s.shape != (levels,):
        raise ValidationError("weights and signs must have one entry per level")
    idx = base ** np.arange(levels)
    a = np.zeros(int(idx[-1]) + 1, dtype=np.complex128)
    a[idx] = w * s
    return TaylorSeries(a)


def proof_lower_bound(r: float, r0: float, A: float) -> float:
    """(log((1-r0)/(1-r)) / log(1/(1-r))) * A, the lower-bound term for r > r0."""
    if not 0.0 <= r0 < r < 1.0:
        raise ValidationError("need 0 <= r0 < r < 1")
    return math.log((1.0 - r0) / (1.0 - r)) / -math.log1p(-r) * A
