"""Data model for bi-directionally constrained Ito diffusions.

The processes treated by this package follow

    dX = (f(X, t) - sgn(X) * psi(X, t)) dt + g(X, t) dW,

where ``f`` is the free drift, ``g`` the diffusion coefficient, and
``psi`` a nonnegative constraint field whose contribution always points
back toward the origin: the state is pulled down when positive and up
when negative, increasingly so the further it strays.  Setting ``psi``
to zero recovers the plain Ito diffusion.

Fields are callables of ``(x, t)``.  They may return scalars or
broadcast over numpy arrays in ``x``; every bundled field helper does
both, which lets the integrator advance whole ensembles at once.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

__all__ = [
    "FieldEvaluationError",
    "ScalarField",
    "BgcSde",
    "AsymptoticParams",
    "ConditionReport",
    "constant_field",
    "zero_field",
    "quadratic_constraint",
    "sgn",
    "bgc_drift",
    "check_conditions",
]


class FieldEvaluationError(ValueError):
    """A coefficient field produced a non-finite value at a finite state."""

    def __init__(self, field_name: str, x: float, t: float):
        self.field_name = field_name
        self.x = x
        self.t = t
        super().__init__(
            f"field '{field_name}' returned a non-finite value at x={x!r}, t={t!r}"
        )


# ----------------------------------------------------------------------
# fields
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class ScalarField:
    """A named coefficient field ``(x, t) -> real``.

    Parameters
    ----------
    fn:
        The evaluation callable.  Must return finite reals for finite
        inputs and should accept numpy arrays in ``x``.
    label:
        Short human-readable description used in reports.
    params:
        Named constants the field was built from, echoed into manifests.
    """

    fn: Callable[[float, float], float]
    label: str = ""
    params: Mapping[str, float] = field(default_factory=dict)

    def __call__(self, x, t):
        return self.fn(x, t)


def constant_field(value: float, label: str | None = None) -> ScalarField:
    """Field that evaluates to ``value`` everywhere."""
    value = float(value)

    def fn(x, t):
        return value

    return ScalarField(fn, label if label is not None else f"{value:g}", {"value": value})


def zero_field() -> ScalarField:
    return constant_field(0.0, label="0")


def quadratic_constraint(beta: float) -> ScalarField:
    """The constraint ``psi(x) = x^2 / beta``.

    ``beta`` sets the strength: smaller values pull harder.  The field
    is even and nonnegative, as a constraint must be.
    """
    beta = float(beta)
    if beta <= 0.0:
        raise ValueError("beta must be positive")

    def fn(x, t):
        return x * x / beta

    return ScalarField(fn, f"x^2/{beta:g}", {"beta": beta})


# ----------------------------------------------------------------------
# SDE bundle
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class BgcSde:
    """The quadruple (f, g, psi, x0) defining one constrained diffusion."""

    drift: ScalarField
    diffusion: ScalarField
    constraint: ScalarField
    x0: float = 0.0
    label: str = "sde"


@dataclass(frozen=True)
class AsymptoticParams:
    """Limits of the coefficient fields used by the well-posedness test.

    ``well_posed`` records whether ``l_inf > sigma_lim^2 / 2``, the
    condition under which the upward drift dominates the diffusion and
    the limsup/liminf path ratios attain their almost-sure values.
    """

    l_inf: float
    sigma_lim: float
    well_posed: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "well_posed", self.l_inf > 0.5 * self.sigma_lim**2)


@dataclass(frozen=True)
class ConditionReport:
    """Grid-scan estimates of the regularity constants of (F, G)."""

    lambda1_est: float
    lambda2_est: float
    domain_radius: float
    grid_step: float
    linear_growth_violated: bool


# ----------------------------------------------------------------------
# operations
# ----------------------------------------------------------------------


def sgn(x: float) -> int:
    """Sign of ``x`` as an integer, with ``sgn(0) = 0``."""
    if x > 0.0:
        return 1
    if x < 0.0:
        return -1
    return 0


def _require_finite(field_name: str, value, x, t) -> None:
    v = np.asarray(value, dtype=float)
    xa = np.asarray(x, dtype=float)
    bad = np.isfinite(xa) & ~np.isfinite(v)
    if bad.any():
        flat_bad = np.broadcast_to(bad, np.broadcast(xa, v).shape).reshape(-1)
        flat_x = np.broadcast_to(xa, np.broadcast(xa, v).shape).reshape(-1)
        where = float(flat_x[int(np.argmax(flat_bad))])
        raise FieldEvaluationError(field_name, where, float(t))


def bgc_drift(sde: BgcSde, x, t):
    """Constrained drift ``f(x, t) - sgn(x) * psi(x, t)``.

    Works elementwise when ``x`` is an array.  At ``x = 0`` the
    constraint contributes exactly nothing, so the result equals the
    free drift there.  Non-finite field values at finite states raise
    :class:`FieldEvaluationError` naming the offending field.
    """
    fx = sde.drift(x, t)
    _require_finite("drift", fx, x, t)
    px = sde.constraint(x, t)
    _require_finite("constraint", px, x, t)
    return fx - np.sign(x) * px


def check_conditions(
    sde: BgcSde,
    domain_radius: float,
    grid_step: float,
    growth_factor: float = 1.5,
) -> ConditionReport:
    """Estimate Lipschitz and linear-growth constants on a symmetric grid.

    Both constrained coefficients are scanned at ``t = 0``: the drift
    ``F = f - sgn * psi`` and the analogously constrained ``G = g -
    sgn * psi``.  ``lambda1_est`` is the largest adjacent-pair slope of
    either, ``lambda2_est`` the largest value of
    ``(F^2 + G^2) / (1 + x^2)``.

    A field that genuinely violates the linear-growth bound has no
    finite ``lambda2`` that works everywhere, so the estimate keeps
    climbing as the domain widens.  The report flags
    ``linear_growth_violated`` when re-estimating on twice the radius
    inflates ``lambda2_est`` by more than ``growth_factor``.
    """
    if domain_radius <= 0.0:
        raise ValueError("domain_radius must be positive")
    if not 0.0 < grid_step < domain_radius:
        raise ValueError("grid_step must lie in (0, domain_radius)")

    lambda1, lambda2 = _scan(sde, domain_radius, grid_step)
    _, lambda2_wide = _scan(sde, 2.0 * domain_radius, grid_step)
    violated = lambda2_wide > growth_factor * lambda2
    return ConditionReport(
        lambda1_est=lambda1,
        lambda2_est=lambda2,
        domain_radius=domain_radius,
        grid_step=grid_step,
        linear_growth_violated=bool(violated),
    )


def _scan(sde: BgcSde, radius: float, step: float) -> tuple[float, float]:
    n = int(round(2.0 * radius / step))
    grid = np.linspace(-radius, radius, n + 1)
    f_vals = bgc_drift(sde, grid, 0.0)
    g_raw = sde.diffusion(grid, 0.0)
    _require_finite("diffusion", g_raw, grid, 0.0)
    p_vals = sde.constraint(grid, 0.0)
    g_vals = g_raw - np.sign(grid) * p_vals
    f_vals = np.broadcast_to(np.asarray(f_vals, dtype=float), grid.shape)
    g_vals = np.broadcast_to(np.asarray(g_vals, dtype=float), grid.shape)
    dx = np.diff(grid)
    slope = max(
        float(np.max(np.abs(np.diff(f_vals)) / dx)),
        float(np.max(np.abs(np.diff(g_vals)) / dx)),
    )
    growth = float(np.max((f_vals**2 + g_vals**2) / (1.0 + grid**2)))
    return slope, growth
