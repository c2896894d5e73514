"""Ensemble statistics: densities, banding, barriers, and lattice checks.

Constrained ensembles are summarized here in four ways.  Density
estimation pairs a plain histogram with a Gaussian kernel estimate so
plots can show both the raw counts and a smooth curve.  Band detection
looks for multiple modes in the kernel curve using topographic
prominence, the height a peak keeps above the higher of its flanking
saddles.  Barrier estimation locates the state where the constrained
drift changes sign, or falls back to wide quantiles of the realized
states.  The lattice walk gives an exact discrete reference
distribution to hold simulations against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .model import BgcSde, bgc_drift
from .numerics import NoRootError, bisect_root
from .simulate import Ensemble

__all__ = [
    "DegenerateSampleError",
    "DensityEstimate",
    "BandReport",
    "BarrierEstimate",
    "LatticeDistribution",
    "terminal_samples",
    "pooled_samples",
    "estimate_density",
    "detect_bands",
    "estimate_barrier",
    "escape_fraction",
    "skewness",
    "lattice_evolve",
    "ks_distance",
]

_KDE_GRID_SIZE = 512
_KDE_SAMPLE_CHUNK = 16384
_DEFAULT_PROMINENCE_FRACTION = 0.02
_ROOT_SCAN_INNER = 1e-8


class DegenerateSampleError(ValueError):
    """A sample set lacks the spread the statistic requires."""


# ----------------------------------------------------------------------
# sample extraction
# ----------------------------------------------------------------------


def terminal_samples(ensemble: Ensemble) -> np.ndarray:
    """Final state of every path, in path order."""
    return np.array([p.states[-1] for p in ensemble.paths])


def pooled_samples(ensemble: Ensemble, t_from: float = 0.0) -> np.ndarray:
    """All states with ``t >= t_from``, concatenated path by path.

    Pooling across late times trades independence for sample size; it
    is the right view when the ensemble has settled into its long-run
    shape and per-time histograms would be too noisy.
    """
    times = ensemble.times
    keep = times >= t_from
    if not keep.any():
        raise ValueError(f"no grid times at or after t_from={t_from!r}")
    return np.concatenate([p.states[keep] for p in ensemble.paths])


# ----------------------------------------------------------------------
# density estimation
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class DensityEstimate:
    """Histogram counts plus a Gaussian kernel density on a fine grid."""

    bin_edges: np.ndarray
    counts: np.ndarray
    kde_grid: np.ndarray
    kde_values: np.ndarray
    bandwidth: float
    n_samples: int


def _silverman_bandwidth(x: np.ndarray) -> float:
    sd = float(np.std(x, ddof=1))
    q75, q25 = np.percentile(x, [75.0, 25.0])
    iqr = float(q75 - q25)
    spread = [s for s in (sd, iqr / 1.34) if s > 0.0]
    return 0.9 * min(spread) * len(x) ** -0.2


def estimate_density(
    samples: Sequence[float],
    bins: int = 100,
    bandwidth: float | None = None,
) -> DensityEstimate:
    """Estimate the sample density two ways at once.

    The histogram uses ``bins`` equal-width bins spanning the sample
    range.  The kernel estimate evaluates a Gaussian kernel sum on a
    512-point grid padded three bandwidths past the extremes, with the
    bandwidth chosen by Silverman's rule unless given.  Samples must
    contain at least two distinct values; otherwise neither spread rule
    nor bin width is meaningful and :class:`DegenerateSampleError` is
    raised.
    """
    x = np.asarray(samples, dtype=float).ravel()
    if len(x) < 2 or float(np.min(x)) == float(np.max(x)):
        raise DegenerateSampleError("need at least two distinct samples")
    if not np.isfinite(x).all():
        raise ValueError("samples must be finite")
    if bins < 2:
        raise ValueError("bins must be at least 2")
    if bandwidth is None:
        bandwidth = _silverman_bandwidth(x)
    elif not bandwidth > 0.0:
        raise ValueError("bandwidth must be positive")

    counts, edges = np.histogram(x, bins=bins)
    lo = float(np.min(x)) - 3.0 * bandwidth
    hi = float(np.max(x)) + 3.0 * bandwidth
    grid = np.linspace(lo, hi, _KDE_GRID_SIZE)

    # Exact kernel sum, accumulated over sample chunks so the working
    # set stays bounded even for pooled million-sample inputs.
    values = np.zeros(_KDE_GRID_SIZE)
    for start in range(0, len(x), _KDE_SAMPLE_CHUNK):
        xs = x[start : start + _KDE_SAMPLE_CHUNK]
        u = (grid[:, None] - xs[None, :]) / bandwidth
        values += np.exp(-0.5 * u * u).sum(axis=1)
    values /= len(x) * bandwidth * math.sqrt(2.0 * math.pi)

    return DensityEstimate(
        bin_edges=edges,
        counts=counts,
        kde_grid=grid,
        kde_values=values,
        bandwidth=float(bandwidth),
        n_samples=len(x),
    )


# ----------------------------------------------------------------------
# band detection
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class BandReport:
    """Modes of a kernel density curve, ordered by location."""

    mode_locations: np.ndarray
    mode_prominences: np.ndarray
    mode_spacings: np.ndarray
    prominence_threshold: float


def _peak_prominence(values: np.ndarray, peak: int) -> float:
    """Topographic prominence of ``values[peak]``.

    Walk outward on each side, tracking the lowest point seen, until a
    strictly higher value or the edge of the curve; the prominence is
    the peak height above the higher of the two side minima.
    """
    h = values[peak]
    left_min = h
    i = peak - 1
    while i >= 0 and values[i] <= h:
        left_min = min(left_min, values[i])
        i -= 1
    right_min = h
    i = peak + 1
    while i < len(values) and values[i] <= h:
        right_min = min(right_min, values[i])
        i += 1
    return float(h - max(left_min, right_min))


def detect_bands(
    density: DensityEstimate,
    prominence_threshold: float | None = None,
) -> BandReport:
    """Find the modes of the kernel curve that rise above the noise.

    Candidate modes are strict local maxima of the kernel values; each
    is kept when its topographic prominence reaches the threshold,
    which defaults to two percent of the curve maximum.  One surviving mode
    means the distribution reads as a single band; several, and the
    gaps between them, are reported in ascending location order.
    """
    v = density.kde_values
    if prominence_threshold is None:
        prominence_threshold = _DEFAULT_PROMINENCE_FRACTION * float(np.max(v))
    elif prominence_threshold < 0.0:
        raise ValueError("prominence_threshold must be nonnegative")

    kept = []
    for i in range(1, len(v) - 1):
        if not (v[i] > v[i - 1] and v[i] >= v[i + 1]):
            continue
        prom = _peak_prominence(v, i)
        if prom >= prominence_threshold:
            kept.append((float(density.kde_grid[i]), prom))
    kept.sort(key=lambda pair: pair[0])
    locations = np.array([loc for loc, _ in kept])
    prominences = np.array([p for _, p in kept])
    return BandReport(
        mode_locations=locations,
        mode_prominences=prominences,
        mode_spacings=np.diff(locations) if len(locations) else np.array([]),
        prominence_threshold=float(prominence_threshold),
    )


# ----------------------------------------------------------------------
# hidden barrier
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class BarrierEstimate:
    """Estimated constraint barrier on each side of the origin.

    A side without a drift sign change carries infinity of the
    matching sign: the constraint never overpowers the free drift
    there, so no finite level confines the process.
    """

    x_plus: float
    x_minus: float
    method: str
    quantile: float | None = None


def _innermost_root(sde: BgcSde, side: int, x_max: float) -> float:
    """First sign change of the constrained drift on one side, or inf."""
    grid = side * np.geomspace(_ROOT_SCAN_INNER, x_max, 257)
    vals = np.asarray(bgc_drift(sde, grid, 0.0), dtype=float)
    vals = np.broadcast_to(vals, grid.shape)
    if vals[0] == 0.0:
        return float(grid[0])
    flips = np.nonzero(np.sign(vals[1:]) != np.sign(vals[0]))[0]
    if len(flips) == 0:
        return side * math.inf
    j = int(flips[0])
    lo, hi = sorted((float(grid[j]), float(grid[j + 1])))
    return bisect_root(lambda x: float(bgc_drift(sde, x, 0.0)), lo, hi, tol=1e-10)


def estimate_barrier(
    sde: BgcSde,
    method: str = "deterministic_root",
    ensemble: Ensemble | None = None,
    quantile: float = 0.995,
    x_max: float = 1e3,
) -> BarrierEstimate:
    """Locate the hidden barrier levels of a constrained diffusion.

    ``deterministic_root`` finds, on each side of the origin, the
    innermost zero of the constrained drift ``f - sgn * psi`` at time
    zero: the state where the constraint exactly cancels the free
    drift.  The scan covers ``[1e-8, x_max]`` per side; a side without
    a sign change reports signed infinity, and when neither side has
    one (with nonzero drift at the origin), :class:`NoRootError` is
    raised.  When the drift vanishes at the origin itself, both levels
    are zero.

    ``empirical_quantile`` needs an ensemble and brackets the pooled
    states of the whole run between the ``1 - quantile`` and
    ``quantile`` levels.
    """
    if method == "deterministic_root":
        f0 = float(bgc_drift(sde, 0.0, 0.0))
        if f0 == 0.0:
            return BarrierEstimate(x_plus=0.0, x_minus=0.0, method=method)
        x_plus = _innermost_root(sde, +1, x_max)
        x_minus = _innermost_root(sde, -1, x_max)
        if math.isinf(x_plus) and math.isinf(x_minus):
            raise NoRootError(
                "constrained drift has no sign change on either side; "
                "no hidden barrier exists below the scan bound"
            )
        return BarrierEstimate(x_plus=x_plus, x_minus=x_minus, method=method)
    if method == "empirical_quantile":
        if ensemble is None:
            raise ValueError("empirical_quantile needs an ensemble")
        if not 0.5 < quantile < 1.0:
            raise ValueError("quantile must lie in (0.5, 1)")
        pooled = pooled_samples(ensemble)
        x_plus = float(np.quantile(pooled, quantile))
        x_minus = float(np.quantile(pooled, 1.0 - quantile))
        return BarrierEstimate(
            x_plus=x_plus, x_minus=x_minus, method=method, quantile=quantile
        )
    raise ValueError(f"unknown method {method!r}")


def escape_fraction(ensemble: Ensemble, level: float) -> float:
    """Fraction of paths whose running maximum of ``|X|`` exceeds ``level``."""
    if not level > 0.0:
        raise ValueError("level must be positive")
    matrix = np.abs(ensemble.state_matrix())
    return float(np.mean(np.max(matrix, axis=1) > level))


# ----------------------------------------------------------------------
# shape statistics
# ----------------------------------------------------------------------


def skewness(samples: Sequence[float]) -> float:
    """Adjusted Fisher-Pearson sample skewness.

    The bias-corrected form ``g1 * sqrt(n (n - 1)) / (n - 2)`` with
    ``g1`` the moment ratio ``m3 / m2^(3/2)``.  Needs at least three
    samples and nonzero variance.
    """
    x = np.asarray(samples, dtype=float).ravel()
    n = len(x)
    if n < 3:
        raise ValueError("skewness needs at least three samples")
    d = x - np.mean(x)
    m2 = float(np.mean(d**2))
    if m2 == 0.0:
        raise DegenerateSampleError("skewness is undefined for zero variance")
    g1 = float(np.mean(d**3)) / m2**1.5
    return g1 * math.sqrt(n * (n - 1.0)) / (n - 2.0)


# ----------------------------------------------------------------------
# lattice reference
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class LatticeDistribution:
    """Exact distribution of a centered unit-step lattice walk."""

    dx: float
    n_steps: int
    positions: np.ndarray
    probabilities: np.ndarray


def lattice_evolve(n_steps: int, dx: float = 1.0) -> LatticeDistribution:
    """Evolve the symmetric lattice walk for ``n_steps`` steps exactly.

    Probabilities are accumulated as integer path counts and divided by
    ``2**n_steps`` as exact rationals before the single rounding to
    float, so they are correctly rounded at any step count and sites of
    the wrong parity are exactly zero.
    """
    if n_steps < 0:
        raise ValueError("n_steps must be nonnegative")
    if not dx > 0.0:
        raise ValueError("dx must be positive")
    width = 2 * n_steps + 1
    counts = [0] * width
    counts[n_steps] = 1
    for _ in range(n_steps):
        nxt = [0] * width
        for j, c in enumerate(counts):
            if c:
                nxt[j - 1] += c
                nxt[j + 1] += c
        counts = nxt
    denom = 2**n_steps
    probs = np.array([float(Fraction(c, denom)) for c in counts])
    positions = (np.arange(width) - n_steps) * dx
    return LatticeDistribution(
        dx=dx, n_steps=n_steps, positions=positions, probabilities=probs
    )


def ks_distance(samples: Sequence[float], lattice: LatticeDistribution) -> float:
    """Kolmogorov-Smirnov distance between a sample and the lattice law.

    Both distribution functions are pure step functions, so the
    supremum is attained at a jump point of one of them; the distance
    is evaluated from both sides of every candidate jump.
    """
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    if len(x) == 0:
        raise ValueError("need at least one sample")
    n = len(x)
    atoms = lattice.positions
    cum = np.concatenate(([0.0], np.cumsum(lattice.probabilities)))
    points = np.unique(np.concatenate((x, atoms)))
    f_emp_right = np.searchsorted(x, points, side="right") / n
    f_emp_left = np.searchsorted(x, points, side="left") / n
    idx_right = np.searchsorted(atoms, points, side="right")
    idx_left = np.searchsorted(atoms, points, side="left")
    f_lat_right = cum[idx_right]
    f_lat_left = cum[idx_left]
    return float(
        max(
            np.max(np.abs(f_emp_right - f_lat_right)),
            np.max(np.abs(f_emp_left - f_lat_left)),
        )
    )
