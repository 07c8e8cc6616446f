"""Adaptive Simpson quadrature for scalar- or vector-valued integrands."""

from __future__ import annotations

from collections.abc import Callable

import numpy as np

from .errors import QuadratureError

MAX_INTERVALS = 1_000_000


def adaptive_simpson(
    f: Callable[[float], np.ndarray | complex | float],
    a: float,
    b: float,
    tol: float = 1e-10,
    max_intervals: int = MAX_INTERVALS,
    min_width: float = 0.0,
) -> tuple[np.ndarray | complex, float, int]:
    """Integrate f over [a, b] to absolute tolerance ``tol`` (max-norm for vectors).

    Each panel is accepted when the Simpson/half-Simpson difference over 15 is
    below its share of ``tol`` (proportional to panel width); accepted panels
    get the Richardson correction. Returns ``(value, error_estimate, panels)``.

    Raises:
        QuadratureError: if more than ``max_intervals`` panels would be needed.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if a == b:
        z = np.asarray(f(a)) * 0
        return (z if z.ndim else z.item()), 0.0, 0
    sign = 1.0
    if a > b:
        a, b, sign = b, a, -1.0
    width = b - a
    density = tol / width

    fa = np.asarray(f(a), dtype=np.complex128)
    fb = np.asarray(f(b), dtype=np.complex128)
    m = 0.5 * (a + b)
    fm = np.asarray(f(m), dtype=np.complex128)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    total = np.zeros_like(fa)
    err = 0.0
    panels = 0
    stack = [(a, b, fa, fm, fb, whole)]
    while stack:
        lo, hi, flo, fmid, fhi, s = stack.pop()
        mid = 0.5 * (lo + hi)
        lm = 0.5 * (lo + mid)
        rm = 0.5 * (mid + hi)
        flm = np.asarray(f(lm), dtype=np.complex128)
        frm = np.asarray(f(rm), dtype=np.complex128)
        h = hi - lo
        left = h / 12.0 * (flo + 4.0 * flm + fmid)
        right = h / 12.0 * (fmid + 4.0 * frm + fhi)
        diff = (left + right - s) / 15.0
        est = float(np.max(np.abs(diff)))
        if est <= density * h or h <= min_width:
            total += left + right + diff
            err += est
            panels += 1
            continue
        if panels + len(stack) + 2 > max_intervals:
            raise QuadratureError(
                f"adaptive Simpson exceeded {max_intervals} panels on [{a}, {b}]"
            )
        stack.append((mid, hi, fmid, frm, fhi, right))
        stack.append((lo, mid, flo, flm, fmid, left))
    total = sign * total
    if total.ndim == 0:
        value = complex(total)
        return value, err, panels
    return total, err, panels
