"""Truncated Taylor series with explicit tail bounds.

A :class:`TaylorSeries` stores the first ``nominal_degree + 1`` coefficients
of a power series. Exact series are polynomials (the tail is identically
zero). Inexact series may carry a tail bound ``(C, R)`` asserting
``|a_n| <= C * R**n`` for every index past the stored range; inexact series
without such a bound are "bound-free" and refuse operations that would need
to see past the stored coefficients.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import CertificationError, ValidationError

MAX_COEFFS = 4096


def _as_coeffs(values) -> np.ndarray:
    arr = np.array(values, dtype=np.complex128).reshape(-1)
    if arr.size == 0:
        arr = np.zeros(1, dtype=np.complex128)
    if arr.size > MAX_COEFFS:
        raise ValidationError(
            f"series has {arr.size} coefficients, cap is {MAX_COEFFS}"
        )
    if not np.all(np.isfinite(arr)):
        raise ValidationError("series coefficients must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class TaylorSeries:
    """Immutable coefficient vector ``coeffs[n] = a_n``."""

    coeffs: np.ndarray
    is_exact: bool = True
    tail_bound: tuple[float, float] | None = None

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _as_coeffs(self.coeffs))
        if self.is_exact and self.tail_bound is not None:
            raise ValidationError("an exact series cannot carry a tail bound")
        if self.tail_bound is not None:
            C, R = (float(v) for v in self.tail_bound)
            if not (C >= 0 and R > 0) or not math.isfinite(C) or not math.isfinite(R):
                raise ValidationError(f"invalid tail bound {self.tail_bound!r}")
            object.__setattr__(self, "tail_bound", (C, R))

    @classmethod
    def polynomial(cls, coeffs) -> TaylorSeries:
        return cls(coeffs, is_exact=True)

    @classmethod
    def truncated(cls, coeffs, tail_bound: tuple[float, float] | None = None) -> TaylorSeries:
        return cls(coeffs, is_exact=False, tail_bound=tail_bound)

    @property
    def nominal_degree(self) -> int:
        return self.coeffs.size - 1

    @property
    def bound_free(self) -> bool:
        return not self.is_exact and self.tail_bound is None

    def __len__(self) -> int:
        return self.coeffs.size

    def __eq__(self, other):
        if not isinstance(other, TaylorSeries):
            return NotImplemented
        return (
            self.is_exact == other.is_exact
            and self.tail_bound == other.tail_bound
            and np.array_equal(self.coeffs, other.coeffs)
        )

    __hash__ = None

    def __repr__(self):
        kind = "exact" if self.is_exact else f"tail={self.tail_bound}"
        return f"TaylorSeries({self.coeffs.tolist()!r}, {kind})"

    def _binary(self, other: TaylorSeries, sign: float) -> TaylorSeries:
        n = max(self.coeffs.size, other.coeffs.size)
        if not (self.is_exact and other.is_exact):
            # Only the common stored range is known for inexact operands.
            n = min(s.coeffs.size for s in (self, other) if not s.is_exact)
        out = np.zeros(n, dtype=np.complex128)
        m = min(n, self.coeffs.size)
        out[:m] += self.coeffs[:m]
        m = min(n, other.coeffs.size)
        out[:m] += sign * other.coeffs[:m]
        if self.is_exact and other.is_exact:
            return TaylorSeries(out)
        bounds = [s.tail_bound for s in (self, other) if not s.is_exact]
        if any(b is None for b in bounds):
            return TaylorSeries(out, is_exact=False)
        C = sum(b[0] for b in bounds)
        R = max(b[1] for b in bounds)
        return TaylorSeries(out, is_exact=False, tail_bound=(C, R))

    def __add__(self, other):
        if not isinstance(other, TaylorSeries):
            return NotImplemented
        return self._binary(other, 1.0)

    def __sub__(self, other):
        if not isinstance(other, TaylorSeries):
            return NotImplemented
        return self._binary(other, -1.0)

    def scale(self, factor: complex) -> TaylorSeries:
        tail = None
        if self.tail_bound is not None:
            tail = (abs(factor) * self.tail_bound[0], self.tail_bound[1])
        return TaylorSeries(self.coeffs * factor, self.is_exact, tail)

    def __mul__(self, other):
        if isinstance(other, TaylorSeries):
            return cauchy_product(self, other)
        if isinstance(other, (int, float, complex, np.number)):
            return self.scale(other)
        return NotImplemented

    __rmul__ = __mul__

    def padded(self, n: int) -> np.ndarray:
        """Coefficients 0..n-1, zero-filled; refuses to invent unknown coefficients."""
        if n <= self.coeffs.size:
            return np.array(self.coeffs[:n])
        if not self.is_exact:
            raise ValidationError(
                f"need {n} coefficients but inexact series stores only {self.coeffs.size}"
            )
        out = np.zeros(n, dtype=np.complex128)
        out[: self.coeffs.size] = self.coeffs
        return out

    def global_bound(self) -> tuple[float, float] | None:
        """(C, R) with |a_n| <= C R^n for every n, stored coefficients included."""
        if self.is_exact:
            return None
        if self.tail_bound is None:
            return None
        C, R = self.tail_bound
        n = np.arange(self.coeffs.size)
        with np.errstate(over="ignore", divide="ignore"):
            ratios = np.abs(self.coeffs) / np.power(R, n)
        return max(C, float(np.max(ratios))), R

    def trimmed(self) -> TaylorSeries:
        """Drop trailing zero coefficients of an exact series."""
        if not self.is_exact:
            return self
        nz = np.flatnonzero(self.coeffs)
        last = int(nz[-1]) if nz.size else 0
        return TaylorSeries(self.coeffs[: last + 1])

    def to_pairs(self) -> list[list[float]]:
        return [[float(c.real), float(c.imag)] for c in self.coeffs]


def cauchy_product(p: TaylorSeries, q: TaylorSeries) -> TaylorSeries:
    """Coefficient n of the result is sum_k p_k q_{n-k}."""
    full = np.convolve(p.coeffs, q.coeffs)
    if p.is_exact and q.is_exact:
        return TaylorSeries(full)
    inexact = [s for s in (p, q) if not s.is_exact]
    exact = [s for s in (p, q) if s.is_exact]
    n = min(s.coeffs.size for s in inexact)
    coeffs = full[:n]
    if len(inexact) == 2 or inexact[0].tail_bound is None:
        return TaylorSeries(coeffs, is_exact=False)
    C, R = inexact[0].global_bound()
    poly = exact[0].coeffs
    k = np.arange(poly.size)
    scale = float(np.sum(np.abs(poly) * np.power(R, -k.astype(float))))
    return TaylorSeries(coeffs, is_exact=False, tail_bound=(C * scale, R))


def divide(numer: TaylorSeries, denom: TaylorSeries, order: int) -> TaylorSeries:
    """First ``order + 1`` coefficients of the formal quotient numer / denom."""
    if order < 0:
        raise ValidationError("order must be >= 0")
    d0 = denom.coeffs[0]
    if d0 == 0:
        raise ValidationError("non-invertible series")
    if order + 1 > MAX_COEFFS:
        raise ValidationError(f"order {order} exceeds coefficient cap {MAX_COEFFS}")
    if not numer.is_exact and numer.coeffs.size < order + 1:
        raise ValidationError("numerator truncated below requested order")
    if not denom.is_exact and denom.coeffs.size < order + 1:
        raise ValidationError("denominator truncated below requested order")
    u = numer.padded(order + 1)
    d = denom.padded(min(order + 1, denom.coeffs.size))
    q = np.zeros(order + 1, dtype=np.complex128)
    for n in range(order + 1):
        m = min(n, d.size - 1)
        acc = u[n]
        if m:
            acc -= np.dot(d[1 : m + 1], q[n - m : n][::-1])
        q[n] = acc / d0
    exact = False
    if numer.is_exact and denom.is_exact:
        if denom.trimmed().coeffs.size == 1:
            exact = numer.trimmed().coeffs.size <= order + 1
        else:
            back = np.convolve(q, denom.coeffs)
            ref = numer.padded(back.size)
            exact = bool(np.all(back == ref))
    return TaylorSeries(q, is_exact=exact)


def partial_sum(f: TaylorSeries, n: int) -> TaylorSeries:
    """The Taylor partial sum s_n[f], an exact polynomial of degree n."""
    if n < 0:
        raise ValidationError("partial sum index must be >= 0")
    if n > f.nominal_degree and not f.is_exact:
        raise ValidationError(
            f"index {n} beyond stored truncation {f.nominal_degree} of a non-exact series"
        )
    return TaylorSeries(f.padded(n + 1))


def dilate(f: TaylorSeries, r: float) -> TaylorSeries:
    """f_r(z) = f(rz): coefficient n becomes a_n r^n."""
    if not 0.0 <= r <= 1.0:
        raise ValidationError(f"dilation radius {r} outside [0, 1]")
    powers = np.power(float(r), np.arange(f.coeffs.size, dtype=float))
    tail = None
    if f.tail_bound is not None:
        C, R = f.tail_bound
        tail = (C, R * r) if r > 0 else (0.0, R)
    return TaylorSeries(f.coeffs * powers, f.is_exact, tail)


def truncation_error(f: TaylorSeries, z: complex) -> float:
    """Bound on |f(z) - (stored polynomial)(z)|; zero for exact series."""
    if f.is_exact:
        return 0.0
    if f.tail_bound is None:
        raise CertificationError("bound-free series has no certified truncation error")
    C, R = f.tail_bound
    q = R * abs(z)
    if q >= 1.0:
        raise ValidationError(f"|z| = {abs(z)} outside the guaranteed radius {1.0 / R}")
    return C * q ** (f.nominal_degree + 1) / (1.0 - q)


def evaluate(f: TaylorSeries, z: complex, with_error: bool = False):
    """Horner evaluation of the stored coefficients at z.

    Inexact series are only evaluated inside their guaranteed radius: ``|z| < 1``
    when bound-free, ``|z| < 1/R`` when a tail bound (C, R) is present.
    """
    z = complex(z)
    if not f.is_exact:
        limit = 1.0 if f.tail_bound is None else 1.0 / f.tail_bound[1]
        if abs(z) >= limit:
            raise ValidationError(f"|z| = {abs(z)} outside the guaranteed radius {limit}")
    acc = 0j
    for c in f.coeffs[::-1]:
        acc = acc * z + c
    if not with_error:
        return acc
    err = truncation_error(f, z) if f.tail_bound is not None or f.is_exact else math.inf
    return acc, err


def h2_norm(f: TaylorSeries, with_bound: bool = False):
    """sqrt(sum |a_n|^2) over stored coefficients.

    With ``with_bound`` returns ``(norm, upper)`` where ``upper`` also covers the
    certified tail (infinite for bound-free series or tails with R >= 1).
    """
    norm = float(np.linalg.norm(f.coeffs))
    if not with_bound:
        return norm
    if f.is_exact:
        return norm, norm
    if f.tail_bound is None:
        return norm, math.inf
    C, R = f.tail_bound
    if R >= 1.0:
        return norm, math.inf
    n1 = f.nominal_degree + 1
    tail = C * R**n1 / math.sqrt(1.0 - R * R)
    return norm, math.sqrt(norm * norm + tail * tail)


def coeffs_to_json(f: TaylorSeries) -> str:
    return json.dumps(f.to_pairs())


def parse_coeffs(data) -> np.ndarray:
    """Accept [[re, im], ...] pairs or plain real/complex numbers."""
    if isinstance(data, str):
        data = json.loads(data)
    out = []
    for item in data:
        if isinstance(item, (list, tuple)):
            if len(item) != 2:
                raise ValidationError(f"coefficient pair must have 2 entries, got {item!r}")
            out.append(complex(float(item[0]), float(item[1])))
        elif isinstance(item, (int, float)):
            out.append(complex(item))
        else:
            raise ValidationError(f"cannot read coefficient {item!r}")
    return np.array(out, dtype=np.complex128)


def series_from_json(data, is_exact: bool = True, tail_bound=None) -> TaylorSeries:
    return TaylorSeries(parse_coeffs(data), is_exact=is_exact, tail_bound=tail_bound)


def coeffs_to_csv(f: TaylorSeries) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["index", "re", "im"])
    for n, c in enumerate(f.coeffs):
        writer.writerow([n, f"{c.real:.16e}", f"{c.imag:.16e}"])
    return buf.getvalue()


def coeffs_from_csv(text: str, is_exact: bool = True) -> TaylorSeries:
    rows = list(csv.DictReader(io.StringIO(text)))
    rows.sort(key=lambda row: int(row["index"]))
    if [int(r["index"]) for r in rows] != list(range(len(rows))):
        raise ValidationError("CSV indices must be contiguous from 0")
    return TaylorSeries([complex(float(r["re"]), float(r["im"])) for r in rows], is_exact=is_exact)
