"""Iterated-logarithm envelopes and one-dimensional diffusion diagnostics.

The first half of this module deals with the almost-sure growth rate of
driftless paths: the envelope ``sqrt(2 t ln ln t)``, its root-t
comparison curve, the adjusted large-time variant, and empirical
limsup/liminf ratios that measure where a realized path sits relative
to the theory.  Everything is anchored at ``t = e``, the point where
the doubly iterated logarithm first becomes defined; the envelope is
exactly zero there.

The second half computes scale functions and speed measure densities
by nested adaptive quadrature and applies a divergence test to
transformed horizon integrals, which classifies whether a boundary is
reachable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .numerics import adaptive_simpson, bisect_root

__all__ = [
    "DEFAULT_T_MIN",
    "EnvelopeDomainError",
    "EmptyWindowError",
    "NoPositiveSamplesError",
    "ZeroDiffusionError",
    "NonpositiveIntegrandError",
    "EnvelopeSeries",
    "ScaleSpeedSpec",
    "MotooReport",
    "sqrt_envelope",
    "lil_envelope",
    "adjusted_lil_envelope",
    "envelope_series",
    "envelope_crossover",
    "kolmogorov_ratio",
    "empirical_limsup_ratio",
    "empirical_liminf_ratio",
    "scale_function",
    "speed_measure_density",
    "motoo_classify",
]

# Both iterated logarithms exceed one from exp(e) on, which makes it the
# natural left edge for ratio statistics: below it the envelope is still
# climbing out of its zero at t = e and ratios are dominated by the
# anchor, not by the path.
DEFAULT_T_MIN = math.exp(math.e)

_DIFFUSION_FLOOR = 1e-12


class EnvelopeDomainError(ValueError):
    """An envelope was requested left of its domain."""


class EmptyWindowError(ValueError):
    """No samples fall inside the requested time window."""


class NoPositiveSamplesError(ValueError):
    """The liminf ratio needs at least one strictly positive state."""


class ZeroDiffusionError(ArithmeticError):
    """The diffusion coefficient vanished inside an integration range."""

    def __init__(self, x: float):
        self.x = x
        super().__init__(f"diffusion coefficient is numerically zero at x={x!r}")


class NonpositiveIntegrandError(ValueError):
    """The transformed scale produced a nonpositive value."""


# ----------------------------------------------------------------------
# envelopes
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class EnvelopeSeries:
    """An envelope sampled on a time grid.

    ``kind`` is one of ``sqrt_t``, ``lil``, ``lil_adjusted``.
    """

    kind: str
    times: np.ndarray
    values: np.ndarray


def sqrt_envelope(t: float) -> float:
    """The comparison curve ``sqrt(t)``, defined for ``t >= 0``."""
    if t < 0.0:
        raise EnvelopeDomainError(f"sqrt envelope needs t >= 0, got {t!r}")
    return math.sqrt(t)


def lil_envelope(t: float) -> float:
    """The envelope ``sqrt(2 t ln ln t)``, defined for ``t >= e``.

    At ``t = e`` the inner logarithm is exactly one, so the envelope is
    exactly zero; the function is strictly increasing beyond that.
    """
    if t < math.e:
        raise EnvelopeDomainError(f"lil envelope needs t >= e, got {t!r}")
    return math.sqrt(2.0 * t * math.log(math.log(t)))


def adjusted_lil_envelope(t: float) -> float:
    """Large-time variant ``sqrt(2 t ln ln t) - e``.

    Shares the ``t >= e`` domain.  It dips below zero near the left
    endpoint by construction; the offset only matters at large times,
    where it sharpens the envelope without changing its growth order.
    """
    return lil_envelope(t) - math.e


def envelope_series(kind: str, times: Sequence[float]) -> EnvelopeSeries:
    """Sample one envelope kind on a whole time grid.

    Domain violations raise :class:`EnvelopeDomainError` naming the
    first offending time, and no partial series is produced.
    """
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or len(t) == 0:
        raise ValueError("times must be a nonempty one-dimensional sequence")
    if kind == "sqrt_t":
        bad = t < 0.0
        if bad.any():
            raise EnvelopeDomainError(
                f"sqrt envelope needs t >= 0, got {t[bad][0]!r}"
            )
        values = np.sqrt(t)
    elif kind in ("lil", "lil_adjusted"):
        bad = t < math.e
        if bad.any():
            raise EnvelopeDomainError(
                f"lil envelope needs t >= e, got {t[bad][0]!r}"
            )
        values = np.sqrt(2.0 * t * np.log(np.log(t)))
        if kind == "lil_adjusted":
            values = values - math.e
    else:
        raise ValueError(f"unknown envelope kind {kind!r}")
    return EnvelopeSeries(kind=kind, times=t, values=values)


def envelope_crossover() -> float:
    """The time where the iterated-logarithm envelope overtakes ``sqrt(t)``.

    Solves ``2 ln ln t = 1`` by bisection.  Below the returned time the
    root-t curve is the larger of the two, above it the envelope is.
    """

    def gap(t: float) -> float:
        return 2.0 * math.log(math.log(t)) - 1.0

    return bisect_root(gap, math.e + 1e-9, 100.0, tol=1e-12)


# ----------------------------------------------------------------------
# empirical ratios
# ----------------------------------------------------------------------


def kolmogorov_ratio(sums: Sequence[float], variances: Sequence[float]) -> np.ndarray:
    """Normalize partial sums by ``sqrt(2 B_n ln ln B_n)``.

    ``variances`` is the running variance sequence ``B_n``; it must be
    nonnegative and strictly increasing and match ``sums`` in length.
    Entries with ``B_n < e`` come back as NaN because the normalizer is
    not defined there yet; at ``B_n`` exactly ``e`` the normalizer is
    zero and the ratio is signed infinity.
    """
    s = np.asarray(sums, dtype=float)
    b = np.asarray(variances, dtype=float)
    if s.shape != b.shape or s.ndim != 1:
        raise ValueError("sums and variances must be one-dimensional and equal-length")
    if (b < 0.0).any():
        raise ValueError("variances must be nonnegative")
    if (np.diff(b) <= 0.0).any():
        raise ValueError("variances must be strictly increasing")
    out = np.full(len(s), np.nan)
    ok = b >= math.e
    with np.errstate(divide="ignore", invalid="ignore"):
        out[ok] = s[ok] / np.sqrt(2.0 * b[ok] * np.log(np.log(b[ok])))
    return out


def empirical_limsup_ratio(path, t_min: float = DEFAULT_T_MIN) -> float:
    """Largest ``|X(t)| / sqrt(2 t ln ln t)`` over samples with ``t >= t_min``.

    ``path`` is anything with ``times`` and ``states`` vectors.  For a
    standard Wiener path and a long horizon the ratio hovers around
    one.  Raises :class:`EmptyWindowError` when the window holds no
    samples and :class:`EnvelopeDomainError` when ``t_min`` precedes
    the envelope's domain.
    """
    t, x = _window(path, t_min)
    env = np.sqrt(2.0 * t * np.log(np.log(t)))
    with np.errstate(divide="ignore"):
        return float(np.max(np.abs(x) / env))


def empirical_liminf_ratio(path, t_min: float = DEFAULT_T_MIN) -> float:
    """Smallest ``ln(X(t) / sqrt(t)) / ln ln t`` over the window.

    Only strictly positive states enter; a window with none raises
    :class:`NoPositiveSamplesError` (the path is not escaping upward,
    so the diagnostic does not apply to it).  ``t_min`` must exceed
    ``e`` so the denominator is positive.
    """
    if t_min <= math.e:
        raise EnvelopeDomainError("liminf ratio needs t_min above e")
    t, x = _window(path, t_min)
    pos = x > 0.0
    if not pos.any():
        raise NoPositiveSamplesError("no positive states in the window")
    t, x = t[pos], x[pos]
    return float(np.min(np.log(x / np.sqrt(t)) / np.log(np.log(t))))


def _window(path, t_min):
    t = np.asarray(path.times, dtype=float)
    x = np.asarray(path.states, dtype=float)
    if t.shape != x.shape or t.ndim != 1:
        raise ValueError("path times and states must be one-dimensional and equal-length")
    if t_min < math.e:
        raise EnvelopeDomainError("t_min precedes the envelope domain t >= e")
    keep = t >= t_min
    if not keep.any():
        raise EmptyWindowError(f"no samples at or after t_min={t_min!r}")
    return t[keep], x[keep]


# ----------------------------------------------------------------------
# scale and speed
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class ScaleSpeedSpec:
    """Quadrature controls for the scale and speed integrals.

    ``c`` is the reference point both integrals are anchored at.  The
    inner exponent integral runs at one tenth of the stated tolerances
    so its error cannot dominate the outer one.
    """

    c: float = 0.0
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_depth: int = 50

    def __post_init__(self):
        if self.abs_tol <= 0.0 or self.rel_tol < 0.0:
            raise ValueError("tolerances must be positive")
        if self.max_depth < 1:
            raise ValueError("max_depth must be at least 1")


def _log_slope(drift, diffusion, spec: ScaleSpeedSpec, y: float) -> float:
    """Exponent integral ``int_c^y f / g^2`` at time zero."""

    def integrand(z: float) -> float:
        g = float(diffusion(z, 0.0))
        if abs(g) < _DIFFUSION_FLOOR:
            raise ZeroDiffusionError(z)
        return float(drift(z, 0.0)) / (g * g)

    value, _ = adaptive_simpson(
        integrand,
        spec.c,
        y,
        abs_tol=0.1 * spec.abs_tol,
        rel_tol=0.1 * spec.rel_tol,
        max_depth=spec.max_depth,
    )
    return value


def scale_function(
    drift: Callable[[float, float], float],
    diffusion: Callable[[float, float], float],
    x: float,
    spec: ScaleSpeedSpec | None = None,
) -> float:
    """Scale function ``s(x) = int_c^x exp(-2 int_c^y f/g^2 dz) dy``.

    Coefficients are evaluated at time zero, so the diagnostic applies
    to the autonomous frozen-time picture of the process.  ``s`` is
    strictly increasing with ``s(c) = 0``; for constant drift ``mu``
    and diffusion ``sigma`` it reduces to
    ``(sigma^2 / 2 mu)(1 - exp(-2 mu x / sigma^2))``.
    """
    if spec is None:
        spec = ScaleSpeedSpec()

    def integrand(y: float) -> float:
        return math.exp(-2.0 * _log_slope(drift, diffusion, spec, y))

    value, _ = adaptive_simpson(
        integrand,
        spec.c,
        float(x),
        abs_tol=spec.abs_tol,
        rel_tol=spec.rel_tol,
        max_depth=spec.max_depth,
    )
    return value


def speed_measure_density(
    drift: Callable[[float, float], float],
    diffusion: Callable[[float, float], float],
    x: float,
    spec: ScaleSpeedSpec | None = None,
) -> float:
    """Speed measure density ``m(x) = 2 / (s'(x) g(x)^2)``.

    With ``s'`` the derivative of the scale function this equals
    ``2 exp(2 int_c^x f/g^2) / g(x)^2``; the reference point enters only
    through that exponent.
    """
    if spec is None:
        spec = ScaleSpeedSpec()
    g = float(diffusion(float(x), 0.0))
    if abs(g) < _DIFFUSION_FLOOR:
        raise ZeroDiffusionError(float(x))
    exponent = _log_slope(drift, diffusion, spec, float(x))
    return 2.0 * math.exp(2.0 * exponent) / (g * g)


# ----------------------------------------------------------------------
# boundary classification
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class MotooReport:
    """Outcome of the horizon-integral divergence test."""

    verdict: str
    horizons: np.ndarray
    increments: np.ndarray
    total: float


def motoo_classify(
    scale: Callable[[float], float],
    height: Callable[[float], float],
    t0: float,
    horizons: Sequence[float],
    abs_tol: float = 1e-10,
    rel_tol: float = 1e-10,
) -> MotooReport:
    """Classify ``int 1 / s(h(t)) dt`` as divergent or convergent.

    The integral is accumulated over the given increasing horizons
    starting at ``t0``.  The verdict is ``divergent`` when the last
    five increment ratios all exceed 0.9 (the tail refuses to decay),
    ``convergent`` when a geometric extrapolation of the final ratio
    bounds the remaining tail below 1e-6 of the accumulated total, and
    ``inconclusive`` otherwise.  A nonpositive transformed scale raises
    :class:`NonpositiveIntegrandError`.
    """
    if not t0 > 0.0:
        raise ValueError("t0 must be positive")
    hs = [float(h) for h in horizons]
    if len(hs) < 2:
        raise ValueError("need at least two horizons")
    if hs[0] <= t0 or any(b <= a for a, b in zip(hs, hs[1:])):
        raise ValueError("horizons must be strictly increasing and exceed t0")

    def integrand(t: float) -> float:
        v = float(scale(float(height(t))))
        if v <= 0.0:
            raise NonpositiveIntegrandError(
                f"transformed scale is nonpositive at t={t!r}"
            )
        return 1.0 / v

    increments = []
    prev = t0
    for horizon in hs:
        value, _ = adaptive_simpson(
            integrand, prev, horizon, abs_tol=abs_tol, rel_tol=rel_tol
        )
        increments.append(value)
        prev = horizon
    inc = np.asarray(increments)
    total = float(np.sum(inc))
    ratios = inc[1:] / inc[:-1]

    verdict = "inconclusive"
    if len(ratios) >= 5 and bool(np.all(ratios[-5:] > 0.9)):
        verdict = "divergent"
    else:
        r = float(ratios[-1])
        if r < 1.0:
            tail = float(inc[-1]) * r / (1.0 - r)
            if tail < 1e-6 * total:
                verdict = "convergent"
    return MotooReport(verdict=verdict, horizons=np.asarray(hs), increments=inc, total=total)
