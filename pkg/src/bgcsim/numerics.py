"""Scalar quadrature and bracketed root finding.

Small, dependency-free numerics used by the scale and speed
diagnostics.  Both routines report failure loudly instead of returning
a best effort: quadrature that cannot reach its tolerance raises, and
a bracket without a sign change raises.
"""

from __future__ import annotations

from typing import Callable

__all__ = [
    "QuadratureError",
    "NoRootError",
    "adaptive_simpson",
    "bisect_root",
]


class QuadratureError(ArithmeticError):
    """Adaptive quadrature exhausted its subdivision budget."""


class NoRootError(ValueError):
    """No sign change was found in the requested bracket."""


def adaptive_simpson(
    func: Callable[[float], float],
    a: float,
    b: float,
    abs_tol: float = 1e-10,
    rel_tol: float = 1e-10,
    max_depth: int = 50,
) -> tuple[float, float]:
    """Integrate ``func`` over ``[a, b]`` by adaptive Simpson refinement.

    Returns ``(value, error_estimate)``.  Intervals are split until the
    classic 15-to-1 Richardson comparison of the halved and unhalved
    rule meets ``max(abs_tol, rel_tol * |value|)``; the absolute budget
    is divided between children so the total stays bounded.  Exceeding
    ``max_depth`` raises :class:`QuadratureError`.

    The orientation is signed: ``a > b`` integrates backwards.
    """
    if abs_tol <= 0.0 or rel_tol < 0.0:
        raise ValueError("tolerances must be positive")
    if a == b:
        return 0.0, 0.0
    sign = 1.0
    if b < a:
        a, b = b, a
        sign = -1.0
    fa = float(func(a))
    fb = float(func(b))
    m = 0.5 * (a + b)
    fm = float(func(m))
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    value, err = _simpson_refine(
        func, a, fa, b, fb, m, fm, whole, abs_tol, rel_tol, max_depth
    )
    return sign * value, err


def _simpson_refine(func, a, fa, b, fb, m, fm, whole, abs_tol, rel_tol, depth):
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = float(func(lm))
    frm = float(func(rm))
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    delta = left + right - whole
    if abs(delta) <= 15.0 * max(abs_tol, rel_tol * abs(left + right)):
        return left + right + delta / 15.0, abs(delta) / 15.0
    if depth <= 0:
        raise QuadratureError(
            f"no convergence on [{a!r}, {b!r}] within the subdivision budget"
        )
    lv, le = _simpson_refine(
        func, a, fa, m, fm, lm, flm, left, 0.5 * abs_tol, rel_tol, depth - 1
    )
    rv, re = _simpson_refine(
        func, m, fm, b, fb, rm, frm, right, 0.5 * abs_tol, rel_tol, depth - 1
    )
    return lv + rv, le + re


def bisect_root(
    func: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-10,
    max_iter: int = 200,
) -> float:
    """Locate a root of ``func`` in ``[lo, hi]`` by bisection.

    The endpoints must bracket a sign change (an endpoint that is
    exactly zero counts as the root); otherwise :class:`NoRootError`
    is raised.  Iterates until the bracket width falls below ``tol``.
    """
    if not lo < hi:
        raise ValueError("need lo < hi")
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    flo = float(func(lo))
    if flo == 0.0:
        return lo
    fhi = float(func(hi))
    if fhi == 0.0:
        return hi
    if (flo > 0.0) == (fhi > 0.0):
        raise NoRootError(f"no sign change on [{lo!r}, {hi!r}]")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fmid = float(func(mid))
        if fmid == 0.0:
            return mid
        if (fmid > 0.0) == (flo > 0.0):
            lo, flo = mid, fmid
        else:
            hi = mid
        if hi - lo <= tol:
            break
    return 0.5 * (lo + hi)
