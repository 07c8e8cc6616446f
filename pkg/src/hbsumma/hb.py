"""H(b) norms through the Taylor coefficients of phi = b/a.

For f holomorphic past the closed disk with coefficients a_n,

    ||f||_b^2 = sum |a_n|^2 + sum_n |(f+)_n|^2,   (f+)_n = sum_j a_{j+n} conj(c_j),

where c_j are the coefficients of phi. Polynomials need only c_0..c_deg f,
so their norms are finite sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CertificationError, ValidationError
from .pair import PythagoreanPair
from .series import TaylorSeries, dilate, h2_norm, partial_sum


@dataclass(frozen=True)
class HbContext:
    phi: TaylorSeries
    tol: float = 1e-12

    def __post_init__(self):
        if not self.tol > 0:
            raise ValidationError("tolerance must be positive")

    @classmethod
    def from_pair(cls, pair: PythagoreanPair, tol: float = 1e-12) -> HbContext:
        return cls(phi=pair.phi, tol=tol)

    @property
    def order(self) -> int:
        return self.phi.nominal_degree

    @property
    def phi_tail(self) -> tuple[float, float] | None:
        return self.phi.tail_bound

    def phi_coeffs(self, n: int) -> np.ndarray:
        """c_0..c_{n-1}; errors if phi is truncated below that."""
        if n > self.phi.coeffs.size and not self.phi.is_exact:
            raise ValidationError(
                f"phi order too small: need {n - 1}, have {self.phi.nominal_degree}"
            )
        return self.phi.padded(n)

    def phi_global_bound(self) -> tuple[float, float] | None:
        return self.phi.global_bound()


@dataclass(frozen=True)
class HbVector:
    f: TaylorSeries
    f_plus: TaylorSeries
    h2_part: float
    plus_part: float
    norm_b: float
    tail_error: float = 0.0

    def to_dict(self, phi_order: int) -> dict:
        return {
            "h2": self.h2_part,
            "plus": self.plus_part,
            "norm_b": self.norm_b,
            "phi_order": phi_order,
            "tail_error": self.tail_error,
        }


def _plus_coeffs(a: np.ndarray, c: np.ndarray) -> np.ndarray:
    N = a.size - 1
    out = np.empty(N + 1, dtype=np.complex128)
    for n in range(N + 1):
        out[n] = np.vdot(c[: N - n + 1], a[n:])
    return out


def f_plus(f: TaylorSeries, ctx: HbContext) -> TaylorSeries:
    """Companion polynomial f+ of a polynomial f: (f+)_n = sum_j a_{j+n} conj(c_j)."""
    if not f.is_exact:
        raise ValidationError("f_plus needs a polynomial; truncate with a tail bound first")
    a = f.coeffs
    c = ctx.phi_coeffs(a.size)
    return TaylorSeries(_plus_coeffs(a, c))


def _phi_bound(ctx: HbContext) -> tuple[float, float]:
    """(Cp, Rp) with |c_j| <= Cp Rp^j for all j."""
    if ctx.phi.is_exact:
        return float(np.max(np.abs(ctx.phi.coeffs))), 1.0
    gb = ctx.phi_global_bound()
    if gb is None:
        raise CertificationError("phi has no tail bound; truncation error not certifiable")
    return gb


def _tail_norm_bound(f: TaylorSeries, ctx: HbContext) -> float:
    """Upper bound on ||f - s_N f||_b from the tail bounds of f and phi."""
    C, R = f.tail_bound
    Cp, Rp = _phi_bound(ctx)
    if R >= 1.0 or R * Rp >= 1.0:
        raise CertificationError(
            f"tail bounds (R={R}, R_phi={Rp}) too weak to certify the norm of a truncation"
        )
    N1 = f.nominal_degree + 1
    h2_tail_sq = C * C * R ** (2 * N1) / (1.0 - R * R)
    geo = float(np.sum(Rp ** (2.0 * np.arange(1, N1 + 1))))
    amp = C * Cp / (1.0 - R * Rp)
    plus_tail_sq = amp * amp * R ** (2 * N1) * (geo + 1.0 / (1.0 - R * R))
    return math.sqrt(h2_tail_sq + plus_tail_sq)


def hb_norm(f: TaylorSeries, ctx: HbContext) -> HbVector:
    """||f||_b via the coefficient formula.

    Polynomials give exact finite sums. A truncation with a certified tail bound
    is evaluated on its stored part, and ``tail_error`` bounds the distance to
    the true norm.
    """
    if f.is_exact:
        poly = f
        err = 0.0
    elif f.tail_bound is None:
        raise CertificationError("bound-free truncation: H(b) norm not certifiable")
    else:
        poly = TaylorSeries(f.coeffs)
        err = _tail_norm_bound(f, ctx)
    if not np.any(poly.coeffs):
        zero = TaylorSeries([0.0])
        return HbVector(f=f, f_plus=zero, h2_part=0.0, plus_part=0.0, norm_b=0.0, tail_error=err)
    plus = f_plus(poly, ctx)
    h2 = h2_norm(poly)
    pp = h2_norm(plus)
    return HbVector(
        f=f, f_plus=plus, h2_part=h2, plus_part=pp, norm_b=math.hypot(h2, pp), tail_error=err
    )


def f_plus_at_zero_dilated(f: TaylorSeries, ctx: HbContext, r: float) -> complex:
    """(f_r)+(0) = sum_j a_j r^j conj(c_j).

    For truncations the neglected tail must be certifiably below ``ctx.tol``.
    """
    if not 0.0 <= r < 1.0:
        raise ValidationError(f"r = {r} outside [0, 1)")
    if f.is_exact:
        a = dilate(f, r).coeffs
        c = ctx.phi_coeffs(a.size)
        return complex(np.vdot(c, a))
    if f.tail_bound is None:
        raise CertificationError("bound-free truncation: (f_r)+(0) not certifiable")
    C, R = f.tail_bound
    Cp, Rp = _phi_bound(ctx)
    q = r * R * Rp
    if q >= 1.0:
        raise CertificationError(f"tail ratio {q} >= 1; (f_r)+(0) not certifiable")
    tail = C * Cp * q ** (f.nominal_degree + 1) / (1.0 - q)
    if tail > ctx.tol:
        raise CertificationError(f"tail {tail:.2e} exceeds tolerance {ctx.tol:.1e}")
    a = dilate(TaylorSeries(f.coeffs), r).coeffs
    c = ctx.phi_coeffs(a.size)
    return complex(np.vdot(c, a))


def dilate_bound_constant(ctx: HbContext, r: float) -> float:
    """C(phi, r) = 1 + (sum_j r^j |c_j|^2) / (1 - r), with the phi tail bounded above."""
    if not 0.0 <= r < 1.0:
        raise ValidationError(f"r = {r} outside [0, 1)")
    c = ctx.phi.coeffs
    j = np.arange(c.size, dtype=float)
    s = float(np.sum(np.power(r, j) * np.abs(c) ** 2))
    if not ctx.phi.is_exact:
        if ctx.phi.tail_bound is None:
            raise CertificationError("phi tail not certifiable: no tail bound")
        Cp, Rp = ctx.phi.tail_bound
        q = r * Rp * Rp
        if q >= 1.0:
            raise CertificationError(f"phi tail not certifiable at r = {r}")
        s += Cp * Cp * q ** c.size / (1.0 - q)
    return 1.0 + s / (1.0 - r)


@dataclass(frozen=True)
class GrowthTable:
    degrees: np.ndarray
    norms: np.ndarray
    log_rate: float
    rate: float


def fit_growth(degrees: np.ndarray, norms: np.ndarray) -> tuple[float, float]:
    """Least-squares slope of log norm over the upper half of the degree range.

    Returns (log_rate, rate) with ``rate = exp(log_rate)``, the empirical R in
    ||s_N|| = O(R^N).
    """
    degrees = np.asarray(degrees, dtype=float)
    norms = np.asarray(norms, dtype=float)
    keep = (degrees >= degrees.max() / 2) & (norms > 0)
    if np.count_nonzero(keep) < 2:
        raise ValidationError("insufficient data for a growth fit")
    slope = float(np.polyfit(degrees[keep], np.log(norms[keep]), 1)[0])
    return slope, math.exp(slope)


def sn_growth_table(f: TaylorSeries, ctx: HbContext, N_max: int) -> GrowthTable:
    """Exact norms ||s_N[f]||_b for N = 0..N_max and a fitted exponential rate."""
    if N_max < 1:
        raise ValidationError("N_max must be >= 1")
    if not f.is_exact and f.nominal_degree < N_max:
        raise ValidationError(f"insufficient data: f stored to degree {f.nominal_degree} < {N_max}")
    ctx.phi_coeffs(N_max + 1)
    norms = np.array([hb_norm(partial_sum(f, N), ctx).norm_b for N in range(N_max + 1)])
    degrees = np.arange(N_max + 1)
    log_rate, rate = fit_growth(degrees, norms)
    return GrowthTable(degrees=degrees, norms=norms, log_rate=log_rate, rate=rate)
