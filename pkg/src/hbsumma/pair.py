"""Pythagorean pairs (b, a) and the quotient phi = b/a.

For a non-extreme polynomial symbol ``b`` the mate ``a`` is the outer
function with ``a(0) > 0`` and ``|a|^2 + |b|^2 = 1`` on the unit circle.
Two independent constructions are provided: root-based Fejer-Riesz
factorization of the trigonometric polynomial ``1 - |b|^2``, and a cepstral
(FFT of ``log w``) construction working from boundary samples alone.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import CertificationError, ValidationError
from .series import TaylorSeries, divide, parse_coeffs

log = logging.getLogger(__name__)

CLIP_FLOOR = 1e-300
ROUNDOFF_ZERO = 1e-14
PAIR_TOL = 1e-8
VALIDATION_GRID = 4096


def circle_values(f: TaylorSeries, n: int, shift: float = 0.0) -> np.ndarray:
    """f(e^{i theta_k}) at theta_k = 2 pi (k + shift) / n, via one FFT."""
    c = f.coeffs
    if c.size > n:
        # Fold aliased coefficients so the FFT still samples f exactly.
        folded = np.zeros(n, dtype=np.complex128)
        k = np.arange(c.size)
        np.add.at(folded, k % n, c * np.exp(2j * np.pi * shift * k / n))
        return np.fft.ifft(folded) * n
    padded = np.zeros(n, dtype=np.complex128)
    padded[: c.size] = c * np.exp(2j * np.pi * shift * np.arange(c.size) / n)
    return np.fft.ifft(padded) * n


@dataclass(frozen=True)
class PythagoreanPair:
    b: TaylorSeries
    a: TaylorSeries
    phi: TaylorSeries
    grid_residual: float

    def to_dict(self) -> dict:
        out = {
            "b": self.b.to_pairs(),
            "a": self.a.to_pairs(),
            "phi": self.phi.to_pairs(),
            "residual": self.grid_residual,
        }
        if self.phi.tail_bound is not None:
            out["phi_tail"] = list(self.phi.tail_bound)
        out["phi_exact"] = self.phi.is_exact
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> PythagoreanPair:
        try:
            b = TaylorSeries(parse_coeffs(data["b"]))
            a = TaylorSeries(parse_coeffs(data["a"]))
            tail = data.get("phi_tail")
            exact = bool(data.get("phi_exact", False)) and tail is None
            phi = TaylorSeries(
                parse_coeffs(data["phi"]),
                is_exact=exact,
                tail_bound=tuple(tail) if tail is not None else None,
            )
            return cls(b=b, a=a, phi=phi, grid_residual=float(data.get("residual", math.nan)))
        except KeyError as exc:
            raise ValidationError(f"pair JSON lacks field {exc}") from None


@dataclass(frozen=True)
class NonExtremenessReport:
    min_modulus_gap: float
    log_integral_estimate: float
    verdict: str
    level_estimates: tuple[float, ...] = ()


def _modulus_gap(b: TaylorSeries, n: int, shift: float) -> np.ndarray:
    values = circle_values(b, n, shift)
    mod2 = np.abs(values) ** 2
    if np.max(mod2) > 1.0 + 1e-12:
        raise ValidationError("symbol exceeds unit ball")
    return 1.0 - mod2


def _clipped_log(w: np.ndarray) -> np.ndarray:
    w = np.where(w < ROUNDOFF_ZERO, CLIP_FLOOR, w)
    return np.log(w)


def check_nonextreme(b: TaylorSeries, grid_size: int = 4096) -> NonExtremenessReport:
    """Estimate (1/2pi) int log(1 - |b|^2) on three grid levels and classify b.

    The grids are offset by half a step so that boundary zeros of the symbol
    gap are not sampled exactly. Verdict rules: "non-extreme" when both
    refinements move the estimate by less than 1e-3 and it exceeds -50;
    "extreme" when the estimate drops by more than 1 per refinement, or sits
    below -50 at every level without recovering (the gap vanishes on the grid);
    otherwise "inconclusive".
    """
    if not b.is_exact:
        raise ValidationError("check_nonextreme needs a polynomial symbol")
    if grid_size < 256 or grid_size & (grid_size - 1):
        raise ValidationError("grid_size must be a power of two >= 256")
    levels = [grid_size, 2 * grid_size, 4 * grid_size]
    estimates = []
    min_gap = math.inf
    for n in levels:
        w = _modulus_gap(b, n, 0.5)
        min_gap = min(min_gap, float(np.min(w)))
        estimates.append(float(np.mean(_clipped_log(w))))
    e0, e1, e2 = estimates
    # Midpoint-rule errors from log zeros decay like 1/n; one Richardson step.
    best = 2.0 * e2 - e1
    if abs(e1 - e0) < 1e-3 and abs(e2 - e1) < 1e-3 and best > -50.0:
        verdict = "non-extreme"
    elif (e0 - e1 > 1.0 and e1 - e2 > 1.0) or (max(estimates) < -50.0 and e2 <= e0):
        verdict = "extreme"
    else:
        verdict = "inconclusive"
    if verdict != "non-extreme":
        best = e2
    return NonExtremenessReport(
        min_modulus_gap=min_gap,
        log_integral_estimate=best,
        verdict=verdict,
        level_estimates=tuple(estimates),
    )


def _laurent_gap(b: TaylorSeries) -> np.ndarray:
    """Coefficients w_{-d..d} of 1 - b(z) conj(b)(1/z) on the circle."""
    beta = b.coeffs
    rho = np.correlate(beta, beta, mode="full")  # rho[k + d] = sum_j beta_{j+k} conj(beta_j)
    w = -rho
    d = beta.size - 1
    w[d] += 1.0
    return w


def _merge_clusters(roots: np.ndarray, radius: float = 1e-5) -> np.ndarray:
    """Replace each tight cluster by its centroid, keeping multiplicity.

    A root of multiplicity m comes out of the companion matrix perturbed by
    about eps^(1/m); the centroid of the cluster is accurate to O(eps).
    """
    roots = np.asarray(roots, dtype=np.complex128)
    out = roots.copy()
    seen = np.zeros(roots.size, dtype=bool)
    for i in range(roots.size):
        if seen[i]:
            continue
        scale = radius * max(1.0, abs(roots[i]))
        members = np.flatnonzero(~seen & (np.abs(roots - roots[i]) < scale))
        seen[members] = True
        out[members] = np.mean(roots[members])
    return out


def _pair_roots(roots: np.ndarray, pair_tol: float) -> list[complex]:
    """Pick one root from every reciprocal-conjugate pair (the outer one)."""
    remaining = list(_merge_clusters(roots))
    chosen = []
    residual = 0.0
    remaining.sort(key=abs, reverse=True)
    while remaining:
        rho = remaining.pop(0)
        if not remaining:
            raise CertificationError("factorization unstable: unpaired root")
        target = 1.0 / np.conj(rho)
        dists = [abs(s - target) for s in remaining]
        k = int(np.argmin(dists))
        partner = remaining.pop(k)
        scale = max(1.0, abs(rho))
        residual = max(residual, dists[k] / scale)
        if dists[k] > pair_tol * scale:
            raise CertificationError(
                f"factorization unstable: pairing residual {dists[k] / scale:.3e}"
            )
        if abs(abs(rho) - 1.0) < pair_tol and abs(abs(partner) - 1.0) < pair_tol:
            mean = 0.5 * (rho + partner)
            chosen.append(mean / abs(mean))
        else:
            # Symmetrize: average rho with the reflection of its partner.
            chosen.append(0.5 * (rho + 1.0 / np.conj(partner)))
    log.debug("root pairing residual %.3e", residual)
    return chosen


def _pythagorean_residual(b: TaylorSeries, a: TaylorSeries, n: int = VALIDATION_GRID) -> float:
    bv = circle_values(b, n)
    av = circle_values(a, n)
    return float(np.max(np.abs(np.abs(av) ** 2 + np.abs(bv) ** 2 - 1.0)))


def fejer_riesz(
    b: TaylorSeries,
    tol: float = 1e-10,
    phi_order: int = 64,
    pair_tol: float = PAIR_TOL,
) -> PythagoreanPair:
    """Outer polynomial mate of a polynomial symbol by spectral factorization.

    The Laurent polynomial ``1 - |b|^2`` is turned into an ordinary polynomial
    of degree ``2d``; its roots come in pairs ``rho, 1/conj(rho)``. One root of
    every pair (the one on or outside the circle) is kept, which makes the mate
    zero-free in the open disk. The scale comes from matching the constant
    Laurent coefficient, the phase from ``a(0) > 0``.
    """
    if not b.is_exact:
        raise ValidationError("fejer_riesz needs a polynomial symbol")
    b = b.trimmed()
    w = _laurent_gap(b)
    d = b.coeffs.size - 1
    grid = np.abs(circle_values(b, VALIDATION_GRID)) ** 2
    if np.max(grid) > 1.0 + tol:
        raise ValidationError("symbol exceeds unit ball")
    scale = np.max(np.abs(w))
    if scale == 0.0 or np.all(np.abs(w) <= 1e-15):
        raise ValidationError("1 - |b|^2 vanishes identically; symbol is extreme")
    # Drop outer Laurent coefficients whose total effect on the circle stays
    # below tol/10; a near-zero leading coefficient would fling roots to infinity.
    dd = d
    budget = 0.1 * tol
    while dd > 0 and 2.0 * abs(w[d + dd]) <= budget:
        budget -= 2.0 * abs(w[d + dd])
        dd -= 1
    if dd == 0:
        w0 = w[d].real
        if w0 <= 0:
            raise ValidationError("1 - |b|^2 < 0")
        a = TaylorSeries([math.sqrt(w0)])
    else:
        poly = w[d - dd : d + dd + 1]  # ascending powers of z^dd * w(z)
        roots = np.roots(poly[::-1])
        if roots.size != 2 * dd:
            raise CertificationError("factorization unstable: root count mismatch")
        if not np.all(np.isfinite(roots)):
            raise CertificationError("factorization unstable: non-finite roots")
        chosen = _pair_roots(roots, pair_tol)
        monic = np.array([1.0 + 0j])
        for rho in chosen:
            monic = np.convolve(monic, [-rho, 1.0])
        # Constant Laurent coefficient equals |kappa|^2 * ||monic||_2^2.
        w0 = w[d].real
        kappa = math.sqrt(w0 / float(np.sum(np.abs(monic) ** 2)))
        a0 = monic[0]
        coeffs = kappa * monic * (abs(a0) / a0)
        coeffs[0] = abs(coeffs[0])
        a = TaylorSeries(coeffs)
    residual = _pythagorean_residual(b, a)
    if residual > tol:
        raise CertificationError(
            f"factorization unstable: grid residual {residual:.3e} exceeds {tol:.1e}"
        )
    phi = phi_coefficients_raw(b, a, phi_order)
    return PythagoreanPair(b=b, a=a, phi=phi, grid_residual=residual)


def _deflate_node_zero(w: np.ndarray, i: int) -> tuple[int, np.ndarray] | None:
    """Estimate the order m of an isolated zero of w at grid node i and divide it out.

    Returns (m, smooth samples) or None when the neighbourhood does not look like
    |e^{i theta} - e^{i theta_i}|^{2m} times a smooth positive factor.
    """
    n = w.size
    h = 2.0 * np.pi / n
    w1 = 0.5 * (w[(i + 1) % n] + w[(i - 1) % n])
    w2 = 0.5 * (w[(i + 2) % n] + w[(i - 2) % n])
    if w1 <= 0 or w2 <= 0:
        return None
    m_est = math.log(w2 / w1) / math.log(4.0 * math.cos(h / 2.0) ** 2)
    m = round(m_est)
    if m < 1 or abs(m_est - m) > 0.1:
        return None
    theta = 2.0 * np.pi * np.arange(n) / n
    factor = np.abs(np.exp(1j * theta) - np.exp(1j * theta[i])) ** (2 * m)
    smooth = np.empty_like(w)
    mask = np.arange(n) != i
    smooth[mask] = w[mask] / factor[mask]
    a1 = 0.5 * (smooth[(i + 1) % n] + smooth[(i - 1) % n])
    a2 = 0.5 * (smooth[(i + 2) % n] + smooth[(i - 2) % n])
    smooth[i] = (4.0 * a1 - a2) / 3.0
    if smooth[i] <= 0:
        return None
    return m, smooth


def _exp_series(g: np.ndarray) -> np.ndarray:
    """Taylor coefficients of exp(g) from n A_n = sum_k k g_k A_{n-k}."""
    order = g.size - 1
    A = np.zeros(order + 1, dtype=np.complex128)
    A[0] = np.exp(g[0])
    kg = np.arange(order + 1) * g
    for n in range(1, order + 1):
        A[n] = np.dot(kg[1 : n + 1], A[n - 1 :: -1][:n]) / n
    return A


def _cepstral(w: np.ndarray, order: int, clip_budget: int) -> np.ndarray:
    n = w.size
    w = np.array(w, dtype=float)
    logw = np.zeros(n)
    g = np.zeros(order + 1, dtype=np.complex128)
    zero_nodes = np.flatnonzero(w < ROUNDOFF_ZERO)
    deflated = []
    if 0 < zero_nodes.size <= max(clip_budget, 8):
        for i in zero_nodes:
            isolated = w[(i + 1) % n] >= ROUNDOFF_ZERO and w[(i - 1) % n] >= ROUNDOFF_ZERO
            result = _deflate_node_zero(w, int(i)) if isolated else None
            if result is None:
                continue
            m, w = result
            deflated.append((m, 2.0 * np.pi * i / n))
    clipped = np.flatnonzero(w < ROUNDOFF_ZERO)
    if clipped.size > clip_budget:
        raise CertificationError(
            f"{clipped.size} samples below clip floor exceed budget {clip_budget}"
        )
    logw = _clipped_log(w)
    logw_hat = np.fft.fft(logw) / n
    if order >= n // 2:
        raise ValidationError(f"order {order} needs a grid finer than {n} points")
    g[0] = logw_hat[0].real / 2.0
    g[1:] = logw_hat[1 : order + 1]
    k = np.arange(1, order + 1)
    for m, theta0 in deflated:
        # log(1 - z e^{-i theta0})^m = -m sum_k e^{-ik theta0} z^k / k
        g[1:] -= m * np.exp(-1j * k * theta0) / k
    return _exp_series(g)


def outer_from_log_modulus(
    w: np.ndarray,
    order: int,
    clip_budget: int | None = None,
    stability_tol: float = 1e-6,
) -> TaylorSeries:
    """Outer function a with |a|^2 = w on the circle, from uniform-grid samples.

    ``w[k]`` is the value at theta_k = 2 pi k / n with n a power of two. The
    log-modulus is Fourier transformed, its analytic half (constant term
    halved) exponentiated. Isolated zeros at grid nodes are divided out and
    restored analytically; any remaining zeros are clipped to 1e-300. The
    result is recomputed from every other sample and must agree to
    ``stability_tol``.
    """
    w = np.asarray(w, dtype=float)
    n = w.size
    if n < 8 or n & (n - 1):
        raise ValidationError("sample count must be a power of two >= 8")
    if np.min(w) < -1e-12:
        raise ValidationError("modulus samples must be nonnegative")
    w = np.maximum(w, 0.0)
    if order < 0:
        raise ValidationError("order must be >= 0")
    if clip_budget is None:
        clip_budget = max(1, n // 1024)
    coeffs = _cepstral(w, order, clip_budget)
    if order < n // 4:
        coarse = _cepstral(w[::2], order, max(1, clip_budget // 2))
        drift = float(np.max(np.abs(coarse - coeffs)))
        if drift > stability_tol:
            raise CertificationError(
                f"outer coefficients unstable under grid halving (drift {drift:.2e})"
            )
    coeffs[0] = abs(coeffs[0])
    return TaylorSeries(coeffs, is_exact=False)


def phi_coefficients_raw(b: TaylorSeries, a: TaylorSeries, order: int) -> TaylorSeries:
    phi = divide(b, a, order)
    if phi.is_exact:
        return phi
    tail = _cauchy_tail_bound(b, a)
    return TaylorSeries(phi.coeffs, is_exact=False, tail_bound=tail)


def _cauchy_tail_bound(b: TaylorSeries, a: TaylorSeries) -> tuple[float, float] | None:
    """Cauchy-estimate bound |c_j| <= M s^{-j} using a circle |z| = s inside the zeros of a.

    Only available for polynomial mates whose zeros lie strictly outside the
    closed disk; sampling max|phi| on the circle is inflated by 5% for safety.
    """
    if not a.is_exact:
        return None
    at = a.trimmed()
    if at.coeffs.size == 1:
        return None
    rmin = float(np.min(np.abs(np.roots(at.coeffs[::-1]))))
    if rmin <= 1.0 + 1e-6:
        return None
    s = math.sqrt(rmin)
    theta = np.linspace(0.0, 2.0 * np.pi, 4096, endpoint=False)
    z = s * np.exp(1j * theta)
    phi_vals = np.polyval(b.coeffs[::-1], z) / np.polyval(at.coeffs[::-1], z)
    M = 1.05 * float(np.max(np.abs(phi_vals)))
    return M, 1.0 / s


def phi_coefficients(pair: PythagoreanPair, order: int) -> TaylorSeries:
    """First order+1 Taylor coefficients c_j of phi = b/a."""
    if pair.a.coeffs[0] == 0:
        raise ValidationError("non-invertible series")
    if pair.phi.coeffs.size >= order + 1 and pair.phi.tail_bound is not None:
        # Keep a known tail bound (e.g. from a preset) when re-truncating.
        base = phi_coefficients_raw(pair.b, pair.a, order)
        return TaylorSeries(base.coeffs, base.is_exact, base.tail_bound or pair.phi.tail_bound)
    return phi_coefficients_raw(pair.b, pair.a, order)


def phi_residual(pair: PythagoreanPair, phi: TaylorSeries | None = None) -> float:
    """max |(phi * a - b)_n| over the stored range of phi."""
    phi = pair.phi if phi is None else phi
    n = phi.coeffs.size
    back = np.convolve(phi.coeffs, pair.a.coeffs)[:n]
    return float(np.max(np.abs(back - pair.b.padded(n))))


def halfshift_pair(phi_order: int = 256) -> PythagoreanPair:
    """The worked symbol b(z) = (1 + z)/2 with mate (1 - z)/2 and phi = (1, 2, 2, ...).

    The mate is computed by :func:`fejer_riesz`; phi receives the exact tail
    bound (2, 1) since every coefficient past the first equals 2.
    """
    b = TaylorSeries([0.5, 0.5])
    pair = fejer_riesz(b, tol=1e-12, phi_order=phi_order)
    phi = TaylorSeries(pair.phi.coeffs, is_exact=False, tail_bound=(2.0, 1.0))
    return PythagoreanPair(b=pair.b, a=pair.a, phi=phi, grid_residual=pair.grid_residual)


PRESETS = {"halfshift": halfshift_pair}


def preset_pair(name: str, phi_order: int = 256) -> PythagoreanPair:
    try:
        factory = PRESETS[name]
    except KeyError:
        raise ValidationError(f"unknown preset {name!r}; known: {sorted(PRESETS)}") from None
    return factory(phi_order)


def mate(b: TaylorSeries, method: str = "fejer-riesz", order: int = 64, grid: int = 4096,
         tol: float = 1e-10) -> PythagoreanPair:
    """Build a pair from either construction route."""
    if method == "fejer-riesz":
        return fejer_riesz(b, tol=tol, phi_order=order)
    if method == "outer":
        w = _modulus_gap(b, grid, 0.0)
        a = outer_from_log_modulus(w, order)
        a = TaylorSeries(a.coeffs, is_exact=False)
        residual = _pythagorean_residual(b, TaylorSeries(a.coeffs), grid)
        if residual > max(tol, 1e-8):
            raise CertificationError(f"outer mate residual {residual:.3e} too large")
        phi = divide(b, a, order)
        return PythagoreanPair(b=b, a=a, phi=phi, grid_residual=residual)
    raise ValidationError(f"unknown mate method {method!r}")
