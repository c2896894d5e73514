"""Euler-Maruyama integration of constrained diffusions.

Determinism is the organizing principle of this module.  Every path
owns a private, counter-based random substream keyed by
``(master_seed, path_index)``, so the values a path sees depend only on
those two integers: not on how many paths run, not on their order, and
not on how work is divided among threads.  The integrator advances all
paths of a chunk with one vectorized expression that is arithmetically
identical to the scalar single-path step, which makes serial and
parallel runs agree bit for bit.

Paths whose state leaves the floating range are poisoned with NaN,
carried to the end, and reported together in a single
:class:`PathExplosionError`; partial ensembles are never returned.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .model import BgcSde

__all__ = [
    "PathExplosionError",
    "SimConfig",
    "Path",
    "Ensemble",
    "GaussianStream",
    "gaussian_stream",
    "em_step",
    "simulate_path",
    "run_ensemble",
]

_BLOCK_PAIRS = 512
_MAX_SEED = 2**64


class PathExplosionError(ArithmeticError):
    """One or more paths became non-finite during integration.

    ``failures`` lists ``(path_index, step_index)`` pairs, one per
    exploded path, giving the first step at which the state left the
    floating range.
    """

    def __init__(self, failures: list[tuple[int, int]]):
        self.failures = sorted(failures)
        first = self.failures[0]
        super().__init__(
            f"{len(self.failures)} path(s) became non-finite; "
            f"first at path {first[0]}, step {first[1]}"
        )


@dataclass(frozen=True)
class SimConfig:
    """Integration protocol: grid, ensemble size, and seeding."""

    dt: float = 1.0
    n_steps: int = 1000
    n_paths: int = 1000
    master_seed: int = 0
    antithetic: bool = False

    def __post_init__(self):
        if not self.dt > 0.0:
            raise ValueError("dt must be positive")
        if self.n_steps < 1:
            raise ValueError("n_steps must be at least 1")
        if self.n_paths < 1:
            raise ValueError("n_paths must be at least 1")
        if not 0 <= self.master_seed < _MAX_SEED:
            raise ValueError("master_seed must fit in 64 bits")


@dataclass(frozen=True)
class Path:
    """One realized trajectory on the uniform time grid."""

    times: np.ndarray
    states: np.ndarray
    path_index: int


@dataclass(frozen=True)
class Ensemble:
    """A bundle of paths sharing one time grid and one protocol."""

    paths: list[Path]
    config: SimConfig
    sde_label: str = "sde"

    @property
    def times(self) -> np.ndarray:
        return self.paths[0].times

    def state_matrix(self) -> np.ndarray:
        """States as an ``(n_paths, n_steps + 1)`` array, row per path."""
        return np.vstack([p.states for p in self.paths])


# ----------------------------------------------------------------------
# random substreams
# ----------------------------------------------------------------------


class GaussianStream:
    """Reproducible stream of standard normal draws for one path.

    The underlying generator is counter-based (Philox) with the key
    ``(master_seed << 64) | path_index``, so distinct paths get
    non-overlapping streams without any shared state.  Normals are
    produced by polar rejection on candidate pairs drawn in fixed-size
    blocks; because the block size never adapts to demand,
    ``take(m)`` followed by ``take(n)`` returns exactly the values
    ``take(m + n)`` would.
    """

    def __init__(self, master_seed: int, path_index: int):
        if not 0 <= master_seed < _MAX_SEED:
            raise ValueError("master_seed must fit in 64 bits")
        if not 0 <= path_index < _MAX_SEED:
            raise ValueError("path_index must fit in 64 bits")
        self.master_seed = master_seed
        self.path_index = path_index
        self._gen = np.random.Generator(
            np.random.Philox(key=(master_seed << 64) | path_index)
        )
        self._chunks: list[np.ndarray] = []
        self._available = 0

    def _refill(self) -> None:
        u = 2.0 * self._gen.random((_BLOCK_PAIRS, 2)) - 1.0
        s = u[:, 0] ** 2 + u[:, 1] ** 2
        keep = (s > 0.0) & (s < 1.0)
        uk = u[keep]
        sk = s[keep]
        scale = np.sqrt(-2.0 * np.log(sk) / sk)
        z = np.empty(2 * len(sk))
        z[0::2] = uk[:, 0] * scale
        z[1::2] = uk[:, 1] * scale
        self._chunks.append(z)
        self._available += len(z)

    def take(self, n: int) -> np.ndarray:
        """Return the next ``n`` draws of the stream."""
        if n < 0:
            raise ValueError("n must be nonnegative")
        while self._available < n:
            self._refill()
        out = np.empty(n)
        filled = 0
        while filled < n:
            head = self._chunks[0]
            need = n - filled
            if len(head) <= need:
                out[filled : filled + len(head)] = head
                filled += len(head)
                self._chunks.pop(0)
            else:
                out[filled:] = head[:need]
                self._chunks[0] = head[need:]
                filled = n
        self._available -= n
        return out


def gaussian_stream(master_seed: int, path_index: int) -> GaussianStream:
    return GaussianStream(master_seed, path_index)


# ----------------------------------------------------------------------
# stepping
# ----------------------------------------------------------------------


def _step_values(sde: BgcSde, x, t, dt: float, z):
    """One explicit step, shared verbatim by scalar and vector callers.

    Deliberately unchecked: a non-finite field value (a genuine bug or
    an overflow at an already huge state) flows into the next state,
    and the integration loops report that state as a path explosion.
    The drift expression mirrors the checked one in
    :func:`bgcsim.model.bgc_drift` term for term.
    """
    fx = sde.drift(x, t)
    px = sde.constraint(x, t)
    gx = sde.diffusion(x, t)
    return x + (fx - np.sign(x) * px) * dt + gx * math.sqrt(dt) * z


def em_step(
    sde: BgcSde,
    x: float,
    t: float,
    dt: float,
    z: float,
    *,
    path_index: int = -1,
    step: int = -1,
) -> float:
    """Advance one state by a single Euler-Maruyama step.

    Returns ``x + (f - sgn * psi) dt + g sqrt(dt) z``.  A non-finite
    result raises :class:`PathExplosionError` immediately, tagged with
    the optional ``path_index`` and ``step`` (or -1 when the caller
    gave no position).  Ensemble integration does its own bookkeeping
    instead so it can report all failed paths at once.
    """
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    with np.errstate(over="ignore", invalid="ignore"):
        out = float(_step_values(sde, x, t, dt, z))
    if not math.isfinite(out):
        raise PathExplosionError([(path_index, step)])
    return out


def simulate_path(sde: BgcSde, config: SimConfig, path_index: int) -> Path:
    """Integrate a single path of ``sde`` under ``config``.

    The time grid is ``k * dt`` for ``k = 0 .. n_steps`` and the first
    state is ``sde.x0``.  The path consumes exactly ``n_steps`` draws
    from its own substream (negated when ``config.antithetic``).
    """
    times = np.arange(config.n_steps + 1, dtype=float) * config.dt
    z = gaussian_stream(config.master_seed, path_index).take(config.n_steps)
    if config.antithetic:
        z = -z
    states = np.empty(config.n_steps + 1)
    x = float(sde.x0)
    states[0] = x
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(config.n_steps):
            x = _step_values(sde, x, times[k], config.dt, z[k])
            if not np.isfinite(x):
                raise PathExplosionError([(path_index, k + 1)])
            states[k + 1] = x
    return Path(times=times, states=states, path_index=path_index)


def _integrate_chunk(sde, config, times, indices):
    """Advance a block of paths in lockstep; returns (states, failures)."""
    n = len(indices)
    z = np.empty((n, config.n_steps))
    for row, idx in enumerate(indices):
        z[row] = gaussian_stream(config.master_seed, int(idx)).take(config.n_steps)
    if config.antithetic:
        z = -z
    states = np.empty((n, config.n_steps + 1))
    x = np.full(n, float(sde.x0))
    states[:, 0] = x
    failures: list[tuple[int, int]] = []
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        for k in range(config.n_steps):
            x_next = _step_values(sde, x, times[k], config.dt, z[:, k])
            died = np.isfinite(x) & ~np.isfinite(x_next)
            if died.any():
                for row in np.nonzero(died)[0]:
                    failures.append((int(indices[row]), k + 1))
            x_next = np.where(np.isfinite(x_next), x_next, np.nan)
            states[:, k + 1] = x_next
            x = x_next
    return states, failures


def run_ensemble(sde: BgcSde, config: SimConfig) -> Ensemble:
    """Integrate ``config.n_paths`` paths of ``sde``.

    The environment variable ``BGC_THREADS`` sets how many worker
    threads share the ensemble (default 1).  Results are bit-identical
    regardless: each path's draws come from its own keyed substream and
    the vectorized chunk step performs the same float operations as the
    scalar one, so threading only changes the wall clock.

    Raises :class:`PathExplosionError` listing every exploded path; no
    partial ensemble is returned in that case.
    """
    times = np.arange(config.n_steps + 1, dtype=float) * config.dt
    n_threads = int(os.environ.get("BGC_THREADS", "1") or "1")
    n_threads = max(1, min(n_threads, config.n_paths))
    all_indices = np.arange(config.n_paths)
    chunks = np.array_split(all_indices, n_threads)

    if n_threads == 1:
        results = [_integrate_chunk(sde, config, times, chunks[0])]
    else:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            results = list(
                pool.map(lambda c: _integrate_chunk(sde, config, times, c), chunks)
            )

    failures: list[tuple[int, int]] = []
    blocks: list[np.ndarray] = []
    for states, fail in results:
        blocks.append(states)
        failures.extend(fail)
    if failures:
        raise PathExplosionError(failures)

    full = np.vstack(blocks)
    paths = [
        Path(times=times, states=full[i], path_index=int(i))
        for i in range(config.n_paths)
    ]
    return Ensemble(paths=paths, config=config, sde_label=sde.label)
