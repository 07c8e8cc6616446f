"""Sequence-to-function summability methods and their means.

Three kinds of method are supported:

* ``power_series``: k_n(r) = p_n r^n / p(r) on [0, R_p), e.g. Abel,
  generalized Abel, logarithmic;
* ``matrix``: k_n(m) read from row m of a (possibly infinite) matrix, e.g.
  Cesaro, identity;
* ``kernel``: k_n(x) given in log form, e.g. generalized Borel on [0, inf).

Every mean is truncated at a horizon whose neglected tail is bounded by the
tolerance, using the growth bound ||x_n|| <= C R_x^n of the sequence.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy import special

from .errors import CertificationError, ValidationError
from .hb import HbContext, HbVector, hb_norm
from .quad import adaptive_simpson
from .series import TaylorSeries

MAX_HORIZON = 1 << 24


@dataclass(frozen=True)
class SummabilityMethod:
    name: str
    kind: str
    radius: float = 1.0
    weights: Callable[[np.ndarray], np.ndarray] | None = None
    p_closed: Callable[[float], float] | None = None
    ratio_sup: Callable[[int], float] | None = None
    row: Callable[[int], np.ndarray] | None = None
    log_kernel: Callable[[np.ndarray, float], np.ndarray] | None = None
    kernel_start: int = 0
    normalized: bool = True
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("power_series", "matrix", "kernel"):
            raise ValidationError(f"unknown method kind {self.kind!r}")
        if not self.radius > 0:
            raise ValidationError("method radius must be positive")
        if self.kind == "power_series":
            if self.weights is None:
                raise ValidationError("power-series method needs weights")
            head = np.asarray(self.weights(np.arange(64)), dtype=float)
            if not head[0] > 0 or np.any(head < 0):
                raise ValidationError("power-series weights need p_0 > 0 and p_n >= 0")
        if self.kind == "matrix" and self.row is None:
            raise ValidationError("matrix method needs a row function")
        if self.kind == "kernel" and self.log_kernel is None:
            raise ValidationError("kernel method needs a kernel")

    def p(self, r: float, tol: float = 1e-15) -> float:
        """The generating function p(r) = sum p_n r^n (power-series kind)."""
        if self.kind != "power_series":
            raise ValidationError(f"{self.name} is not a power-series method")
        if self.p_closed is not None:
            return float(self.p_closed(r))
        w, tail, _ = _power_terms(self, r, 1.0, 1.0, tol, relative_to=None)
        return float(np.sum(w)) + tail


@dataclass(frozen=True)
class VectorSequence:
    """A sequence x_n of scalars or vectors with ||x_n|| <= C R^n.

    ``terms`` maps an index array to the stacked terms (first axis = index).
    """

    terms: Callable[[np.ndarray], np.ndarray]
    growth: tuple[float, float] = (1.0, 1.0)
    norm: Callable[[Any], float] = field(default=lambda v: float(np.linalg.norm(v)))

    def __getitem__(self, n: int):
        return self.terms(np.array([n]))[0]

    @classmethod
    def from_function(cls, fn: Callable[[int], Any], growth=(1.0, 1.0), norm=None) -> VectorSequence:
        def terms(ns):
            return np.array([fn(int(n)) for n in ns])

        return cls(terms, growth, norm or (lambda v: float(np.linalg.norm(v))))

    @classmethod
    def periodic(cls, pattern) -> VectorSequence:
        pattern = np.asarray(pattern)
        C = float(np.max(np.abs(pattern))) if pattern.size else 0.0
        return cls(lambda ns: pattern[np.asarray(ns) % pattern.shape[0]], (C, 1.0))

    @classmethod
    def constant(cls, value, norm=None) -> VectorSequence:
        value = np.asarray(value)

        def terms(ns):
            return np.broadcast_to(value, (len(ns),) + value.shape).copy()

        norm = norm or (lambda v: float(np.linalg.norm(v)))
        return cls(terms, (norm(value), 1.0), norm)

    @classmethod
    def eventually_constant(cls, values, norm=None) -> VectorSequence:
        """x_n = values[n] for n < len(values), then values[-1] forever."""
        values = np.asarray(values)
        last = values.shape[0] - 1

        def terms(ns):
            return values[np.minimum(np.asarray(ns), last)]

        norm = norm or (lambda v: float(np.linalg.norm(v)))
        C = max(norm(v) for v in values)
        return cls(terms, (C, 1.0), norm)

    @classmethod
    def partial_sums(cls, f: TaylorSeries, ctx: HbContext | None = None) -> VectorSequence:
        """The Taylor partial sums of a polynomial, as coefficient vectors.

        The norm is ||.||_b when a context is given, otherwise the H^2 norm.
        """
        if not f.is_exact:
            raise ValidationError("partial-sum sequences need a polynomial")
        N = f.nominal_degree
        rows = np.tril(np.ones((N + 1, N + 1))) * f.coeffs[None, :]
        if ctx is None:
            norm = lambda v: float(np.linalg.norm(v))  # noqa: E731
        else:
            norm = lambda v: hb_norm(TaylorSeries(v), ctx).norm_b  # noqa: E731
        return cls.eventually_constant(rows, norm)


@dataclass(frozen=True)
class MeanResult:
    value: Any
    horizon: int
    tail_err: float


# ---------------------------------------------------------------- builtins

def _binom_weights(alpha: float):
    scale = special.gamma(alpha + 1.0)

    def weights(ns):
        # poch keeps ~1e-12 relative accuracy up to n ~ 1e6; gammaln differences do not.
        return special.poch(np.asarray(ns, dtype=float) + 1.0, alpha) / scale

    return weights


def abel() -> SummabilityMethod:
    return power_series(
        lambda ns: np.ones(np.shape(ns)),
        name="abel",
        p_closed=lambda r: 1.0 / (1.0 - r),
        ratio_sup=lambda n: 1.0,
    )


def gen_abel(alpha: float) -> SummabilityMethod:
    """Weights binomial(n + alpha, alpha); order 0 is the classical Abel method."""
    if not alpha > -1:
        raise ValidationError("generalized Abel order must exceed -1")
    alpha = float(alpha)
    if alpha >= 0:
        ratio = lambda n: (n + 1.0 + alpha) / (n + 1.0)  # noqa: E731
    else:
        ratio = lambda n: 1.0  # noqa: E731
    return power_series(
        _binom_weights(alpha),
        name=f"gen_abel({alpha:g})",
        p_closed=lambda r: (1.0 - r) ** (-1.0 - alpha),
        ratio_sup=ratio,
        params={"alpha": alpha},
    )


def _log_p(r: float) -> float:
    if r == 0.0:
        return 1.0
    return -math.log1p(-r) / r


def logarithmic() -> SummabilityMethod:
    return power_series(
        lambda ns: 1.0 / (np.asarray(ns, dtype=float) + 1.0),
        name="logarithmic",
        p_closed=_log_p,
        ratio_sup=lambda n: 1.0,
    )


def cesaro() -> SummabilityMethod:
    """Cesaro (C,1) means as the matrix k_n(m) = 1/(m+1) for n <= m."""
    return matrix_method(lambda m: np.full(m + 1, 1.0 / (m + 1)), name="cesaro")


def identity() -> SummabilityMethod:
    """Row m selects x_m (so applied to partial sums it returns s_m)."""

    def row(m):
        out = np.zeros(m + 1)
        out[m] = 1.0
        return out

    return matrix_method(row, name="identity")


def borel(alpha: float = 1.0, beta: float = 1.0, raw: bool = False) -> SummabilityMethod:
    """Generalized Borel kernel x^{alpha n + beta - 1} / Gamma(alpha n + beta), n >= N.

    N is the least index with alpha N + beta > 1. Unless ``raw`` is set, the
    kernel is divided by its total mass so that the weights sum to one.
    """
    if not alpha > 0:
        raise ValidationError("Borel alpha must be positive")
    alpha, beta = float(alpha), float(beta)
    start = max(0, math.floor((1.0 - beta) / alpha) + 1)
    while alpha * start + beta <= 1.0:
        start += 1

    def log_kernel(ns, x):
        ns = np.asarray(ns, dtype=float)
        expo = alpha * ns + beta
        with np.errstate(divide="ignore"):
            lx = math.log(x) if x > 0 else -math.inf
        return (expo - 1.0) * lx - special.gammaln(expo)

    return SummabilityMethod(
        name=f"borel({alpha:g},{beta:g})" + (",raw" if raw else ""),
        kind="kernel",
        radius=math.inf,
        log_kernel=log_kernel,
        kernel_start=start,
        normalized=not raw,
        params={"alpha": alpha, "beta": beta},
    )


def power_series(weights, name: str = "power", radius: float = 1.0, p_closed=None,
                 ratio_sup=None, params=None) -> SummabilityMethod:
    return SummabilityMethod(
        name=name,
        kind="power_series",
        radius=radius,
        weights=weights,
        p_closed=p_closed,
        ratio_sup=ratio_sup,
        params=params or {},
    )


def power_series_from_list(values, name: str = "power") -> SummabilityMethod:
    """Weights p_0..p_K given explicitly, extended by p_n = p_K for n > K (radius 1)."""
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or values.size == 0:
        raise ValidationError("weights must be a nonempty list")
    K = values.size - 1
    last = values[-1]

    def weights(ns):
        ns = np.asarray(ns)
        return np.where(ns <= K, values[np.minimum(ns, K)], last)

    def p_closed(r):
        head = float(np.sum(values * np.power(r, np.arange(K + 1, dtype=float))))
        return head + last * r ** (K + 1) / (1.0 - r)

    return power_series(weights, name=name, p_closed=p_closed, ratio_sup=lambda n: 1.0)


def matrix_method(rows, name: str = "matrix") -> SummabilityMethod:
    """Matrix method from a row function m -> k_.(m) or a finite 2-D array."""
    if callable(rows):
        row = rows
    else:
        table = np.asarray(rows, dtype=float)
        if table.ndim != 2:
            raise ValidationError("matrix rows must form a 2-D array")

        def row(m):
            if m >= table.shape[0]:
                raise ValidationError(f"row {m} beyond the {table.shape[0]} stored rows")
            return table[m]

    return SummabilityMethod(name=name, kind="matrix", radius=math.inf, row=row)


BUILTINS = {
    "abel": abel,
    "gen_abel": gen_abel,
    "logarithmic": logarithmic,
    "cesaro": cesaro,
    "borel": borel,
    "identity": identity,
}


def builtin(name: str, *args, **kwargs) -> SummabilityMethod:
    """Look up a builtin method: abel, gen_abel(alpha), logarithmic, cesaro, borel(a, b), identity."""
    try:
        factory = BUILTINS[name]
    except KeyError:
        raise ValidationError(f"unknown method {name!r}; known: {sorted(BUILTINS)}") from None
    return factory(*args, **kwargs)


# ---------------------------------------------------------------- weights

def _power_terms(method, r, C, Rx, tol, relative_to):
    """Terms p_n r^n for n <= H with sum_{n>H} p_n r^n C Rx^n <= tol * relative_to.

    Returns (terms, tail_bound, H). ``relative_to=None`` means p(r) itself.
    """
    q = r * Rx
    block = 256
    H = block
    while True:
        ns = np.arange(H + 1)
        terms = method.weights(ns) * np.power(r, ns.astype(float))
        scale = relative_to if relative_to is not None else float(np.sum(terms))
        if method.ratio_sup is not None:
            rho = q * method.ratio_sup(H + 1)
            if rho < 1.0:
                nxt = float(method.weights(np.array([H + 1]))[0]) * r ** (H + 1) * C * Rx ** (H + 1)
                tail = nxt / (1.0 - rho)
                if tail <= tol * scale:
                    return terms, tail, H
        else:
            # Doubling horizon with a Cauchy-difference stop.
            grown = terms * C * np.power(Rx, ns.astype(float))
            diff = float(np.sum(grown[H // 2 + 1 :]))
            if diff <= tol * scale and H >= 2 * block:
                return terms, diff, H
        H *= 2
        if H > MAX_HORIZON:
            raise CertificationError(
                f"{method.name}: tail not certifiable at r = {r} within {MAX_HORIZON} terms"
            )


def _kernel_terms(method, x, C, Rx, tol):
    """Unnormalized kernel terms k_n(x) for n <= H with their log-scale and tail bound."""
    start = method.kernel_start
    block = 64
    H = start + block
    while True:
        ns = np.arange(start, H + 2)
        lk = method.log_kernel(ns, x)
        shift = float(np.max(lk))
        grown = lk + ns * math.log(Rx) if Rx > 0 else lk
        # Successive ratios of the growth-weighted terms decrease (log-convexity of Gamma).
        ratio = math.exp(grown[-1] - grown[-2])
        if ratio < 1.0 and ns[-1] > ns[int(np.argmax(grown))]:
            terms = np.exp(lk[:-1] - shift)
            nxt = C * math.exp(grown[-1] - shift)
            tail = nxt / (1.0 - ratio)
            if tail <= tol * float(np.sum(terms)):
                return ns[:-1], terms, shift, tail
        H = 2 * H
        if H > MAX_HORIZON:
            raise CertificationError(f"{method.name}: tail not certifiable at x = {x}")


def kernel_weights(method: SummabilityMethod, r, growth=(1.0, 1.0), tol: float = 1e-12):
    """Weights k_0(r)..k_H(r) with certified sum_{n>H} |k_n(r)| C Rx^n <= tol.

    Returns (weights, tail_err).
    """
    C, Rx = growth
    if method.kind == "matrix":
        m = int(r)
        if m != r or m < 0:
            raise ValidationError(f"matrix methods are indexed by row m >= 0, got {r}")
        return np.asarray(method.row(m), dtype=float), 0.0
    if not 0.0 <= r < method.radius:
        raise ValidationError(f"r = {r} outside [0, {method.radius})")
    if method.kind == "power_series":
        p = method.p(r)
        terms, tail, _ = _power_terms(method, r, C, Rx, tol, relative_to=p)
        return terms / p, tail / p
    if r <= 0.0:
        raise ValidationError("kernel methods need x > 0")
    ns, terms, shift, tail = _kernel_terms(method, r, C, Rx, tol)
    if method.normalized:
        _, _, _, mass_tail = _kernel_terms(method, r, 1.0, 1.0, tol)
        Z = float(np.sum(terms)) + mass_tail
        w = terms / Z
        err = tail / Z
    else:
        w = terms * math.exp(shift)
        err = tail * math.exp(shift)
    out = np.zeros(int(ns[-1]) + 1)
    out[ns] = w
    return out, err


def means(method: SummabilityMethod, seq, r, tol: float = 1e-12) -> MeanResult:
    """K_r[x] = sum_n k_n(r) x_n truncated at a certified horizon."""
    if not isinstance(seq, VectorSequence):
        seq = VectorSequence.from_function(seq) if callable(seq) else _list_sequence(seq)
    w, tail = kernel_weights(method, r, seq.growth, tol)
    ns = np.arange(w.size)
    x = np.asarray(seq.terms(ns))
    value = np.tensordot(w, x, axes=(0, 0))
    if np.ndim(value) == 0:
        value = value.item()
    return MeanResult(value=value, horizon=int(w.size - 1), tail_err=float(tail))


def _list_sequence(values) -> VectorSequence:
    values = np.asarray(values)
    size = values.shape[0]

    def terms(ns):
        ns = np.asarray(ns)
        if ns.size and ns.max() >= size:
            raise CertificationError(f"finite sequence of length {size} indexed at {ns.max()}")
        return values[ns]

    return VectorSequence(terms, (float(np.max(np.abs(values))), 1.0))


def cesaro_mean(seq, n: int):
    """Arithmetic mean of x_0..x_n."""
    if n < 0:
        raise ValidationError("n must be >= 0")
    if isinstance(seq, VectorSequence):
        x = np.asarray(seq.terms(np.arange(n + 1)))
    elif callable(seq):
        x = np.array([seq(k) for k in range(n + 1)])
    else:
        x = np.asarray(seq)[: n + 1]
        if x.shape[0] < n + 1:
            raise ValidationError("sequence shorter than n + 1")
    value = np.mean(x, axis=0)
    return value.item() if np.ndim(value) == 0 else value


# ---------------------------------------------------------------- partial sums

@dataclass(frozen=True)
class PartialSumMean:
    series: TaylorSeries
    hb: HbVector | None
    horizon: int
    tail_err: float

    @property
    def norm_b(self) -> float | None:
        return None if self.hb is None else self.hb.norm_b


def coefficient_multipliers(method: SummabilityMethod, r, n_coeffs: int, tol: float = 1e-14):
    """m_k(r) = sum_{n >= k} k_n(r) for k < n_coeffs, so (P_r f)_k = a_k m_k(r).

    Returns (multipliers, horizon, tail_err).
    """
    if method.kind == "power_series" and method.p_closed is not None:
        if not 0.0 <= r < method.radius:
            raise ValidationError(f"r = {r} outside [0, {method.radius})")
        p = method.p(r)
        ns = np.arange(n_coeffs)
        head = method.weights(ns[:-1]) * np.power(r, ns[:-1].astype(float)) if n_coeffs > 1 else np.zeros(0)
        cum = np.concatenate([[0.0], np.cumsum(head)])
        return 1.0 - cum / p, n_coeffs - 1, 0.0
    w, tail = kernel_weights(method, r, (1.0, 1.0), tol)
    rev = np.cumsum(w[::-1])[::-1]
    mult = np.zeros(n_coeffs)
    k = min(n_coeffs, rev.size)
    mult[:k] = rev[:k]
    return mult + tail * (method.kind != "matrix"), int(w.size - 1), float(tail)


def mean_of_partial_sums(method: SummabilityMethod, f: TaylorSeries, ctx: HbContext | None = None,
                         r=0.5, tol: float = 1e-14) -> PartialSumMean:
    """P_r[f] = sum_n k_n(r) s_n[f], computed in coefficient space.

    Coefficient k of the mean is a_k times sum_{n >= k} k_n(r); for
    power-series methods with a closed-form p(r) this is exact up to rounding.
    """
    if f.bound_free:
        raise CertificationError("mean of a bound-free truncation is not certifiable")
    mult, horizon, tail = coefficient_multipliers(method, r, f.coeffs.size, tol)
    coeffs = f.coeffs * mult
    if f.is_exact:
        series = TaylorSeries(coeffs)
    else:
        # Multipliers are partial masses of nonnegative kernels, hence <= 1 (+tail).
        C, R = f.tail_bound
        series = TaylorSeries(coeffs, is_exact=False, tail_bound=(C * (1.0 + tail), R))
    vec = hb_norm(series, ctx) if ctx is not None else None
    tail_err = tail * float(np.sum(np.abs(f.coeffs)))
    if vec is not None:
        tail_err = max(tail_err, vec.tail_error)
    return PartialSumMean(series=series, hb=vec, horizon=horizon, tail_err=tail_err)


def log_mean_integral(f: TaylorSeries, r: float, tol: float = 1e-10) -> TaylorSeries:
    """(1/log(1/(1-r))) int_0^r f_t / (1 - t) dt, coefficientwise by adaptive Simpson.

    The integral is computed to absolute tolerance ``tol * log(1/(1-r))`` so the
    returned coefficients are accurate to about ``tol``.

    Raises:
        QuadratureError: if the panel cap is reached.
    """
    if not f.is_exact:
        raise ValidationError("log_mean_integral needs a polynomial")
    if not 0.0 < r < 1.0:
        raise ValidationError(f"r = {r} outside (0, 1)")
    a = np.array(f.coeffs)
    ks = np.arange(a.size, dtype=float)
    S = -math.log1p(-r)

    # In s = log(1/(1-t)) the weight dt/(1-t) becomes ds and the integrand stays bounded.
    def integrand(s):
        return a * np.power(-math.expm1(-s), ks)

    value, _, _ = adaptive_simpson(integrand, 0.0, S, tol=tol * S)
    return TaylorSeries(np.asarray(value) / S)


# ---------------------------------------------------------------- regularity

@dataclass(frozen=True)
class RegularityReport:
    method: str
    bounded_l1: bool
    l1_sup: float
    pointwise_null: bool
    null_failures: tuple[int, ...]
    mass_to_one: bool
    terminal_mass: float
    p_diverges: bool | None
    verdict: str
    grid: tuple[float, ...] = ()
    note: str = ""

    @property
    def regular(self) -> bool:
        return self.verdict == "regular"

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "bounded_l1": self.bounded_l1,
            "l1_sup": self.l1_sup,
            "pointwise_null": self.pointwise_null,
            "null_failures": list(self.null_failures),
            "mass_to_one": self.mass_to_one,
            "terminal_mass": self.terminal_mass,
            "p_diverges": self.p_diverges,
            "verdict": self.verdict,
            "grid": list(self.grid),
            "note": self.note,
        }


def default_grid(method: SummabilityMethod) -> list[float]:
    if method.kind == "matrix":
        return [float(2**k) for k in range(4, 13)]
    if method.kind == "kernel":
        return [float(2**k) for k in range(0, 9)]
    return [1.0 - 10.0 ** (-s) for s in np.linspace(1.0, 8.0, 15)]


def _kernel_profile(method, r, n_horizon):
    """(k_0..k_horizon, sum |k_n|, sum k_n) at r."""
    if method.kind == "power_series":
        p = method.p(r)
        ns = np.arange(n_horizon + 1)
        head = method.weights(ns) * np.power(r, ns.astype(float)) / p
        if method.p_closed is not None and 1.0 - r < 1e-5:
            # Summing ~1/(1-r) terms is wasteful: nonnegative weights over p(r) sum to 1.
            return head, 1.0, 1.0
        try:
            w, tail = kernel_weights(method, r, (1.0, 1.0), 1e-13)
            return head, float(np.sum(np.abs(w))) + tail, float(np.sum(w))
        except CertificationError:
            return head, 1.0, 1.0
    w, tail = kernel_weights(method, r, (1.0, 1.0), 1e-13)
    head = np.zeros(n_horizon + 1)
    k = min(w.size, n_horizon + 1)
    head[:k] = w[:k]
    return head, float(np.sum(np.abs(w))) + tail, float(np.sum(w))


def regularity_report(method: SummabilityMethod, R0: float | None = None, r_grid=None,
                      n_horizon: int = 16, mass_tol: float = 1e-6) -> RegularityReport:
    """Check the three regularity conditions on a finite grid approaching R.

    * bounded_l1: sup of sum |k_n(r)| over the grid, and no growth from the
      first half of the grid to the second;
    * pointwise_null: for each n <= n_horizon, k_n(r) is below 1e-12 at the last
      grid point, or is nonincreasing over the last quarter of the grid and has
      dropped to at most half its grid maximum;
    * mass_to_one: sum k_n(r) at the last grid point within ``mass_tol`` of 1.

    Power-series methods also report whether p(r) grows along the grid.
    """
    if n_horizon < 16:
        raise ValidationError("n_horizon must be >= 16")
    grid = list(default_grid(method) if r_grid is None else r_grid)
    if R0 is not None:
        grid = [r for r in grid if r >= R0]
    if len(grid) < 4 or any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValidationError("regularity grid must be increasing with at least 4 points")
    heads, l1, mass = [], [], []
    try:
        for r in grid:
            h, s_abs, s = _kernel_profile(method, r, n_horizon)
            heads.append(np.abs(h))
            l1.append(s_abs)
            mass.append(s)
    except CertificationError as exc:
        return RegularityReport(method.name, False, math.nan, False, (), False, math.nan, None,
                                "inconclusive", tuple(grid), note=str(exc))
    heads = np.array(heads)
    l1 = np.array(l1)
    half = len(grid) // 2
    bounded = bool(np.all(np.isfinite(l1)) and l1[half:].max() <= 1.01 * l1[:half].max() + 1e-12)
    quarter = max(2, len(grid) // 4)
    failures = []
    for n in range(n_horizon + 1):
        col = heads[:, n]
        if col[-1] <= 1e-12:
            continue
        tail = col[-quarter:]
        if np.all(np.diff(tail) <= 1e-15 * tail[:-1]) and col[-1] <= 0.5 * col.max():
            continue
        failures.append(n)
    null = not failures
    to_one = abs(mass[-1] - 1.0) <= mass_tol
    p_div = None
    if method.kind == "power_series":
        ps = np.array([method.p(r) for r in grid])
        p_div = bool(np.all(np.diff(ps) > 0) and ps[-1] >= 2.0 * ps[0])
    ok = bounded and null and to_one and (p_div is not False)
    return RegularityReport(
        method=method.name,
        bounded_l1=bounded,
        l1_sup=float(l1.max()),
        pointwise_null=null,
        null_failures=tuple(failures),
        mass_to_one=to_one,
        terminal_mass=float(mass[-1]),
        p_diverges=p_div,
        verdict="regular" if ok else "not regular",
        grid=tuple(float(g) for g in grid),
    )
