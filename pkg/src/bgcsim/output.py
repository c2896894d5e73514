"""Delimited output and run manifests.

Files written here are byte-deterministic: UTF-8, LF line endings,
comma delimiters, floats at 17 significant digits (enough to round-trip
IEEE doubles), and no timestamps or absolute paths anywhere.  Rerunning
the same configuration must reproduce every byte, which is what makes
the manifest checksums meaningful.
"""

from __future__ import annotations

import hashlib
from pathlib import Path
from typing import Iterable, Sequence

from .config import ExperimentConfig, render_config
from .lil import EnvelopeSeries
from .model import ConditionReport
from .simulate import Ensemble
from .stats import BandReport, BarrierEstimate, DensityEstimate, LatticeDistribution

__all__ = [
    "emit_csv",
    "write_paths_csv",
    "write_density_csv",
    "write_bands_csv",
    "write_barrier_csv",
    "write_lattice_csv",
    "write_check_csv",
    "write_envelope_csv",
    "write_manifest",
    "sha256_of",
]

_FLOAT_FMT = "%.17g"


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return _FLOAT_FMT % value
    return str(value)


def emit_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """Write rows as CSV under the fixed byte conventions.

    Cells are formatted by type: floats at 17 significant digits,
    booleans as ``true``/``false``, ``None`` as the empty cell.
    """
    lines = [",".join(header)]
    lines.extend(",".join(_cell(v) for v in row) for row in rows)
    _write_text(path, "\n".join(lines) + "\n")


def _write_text(path: Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# ----------------------------------------------------------------------
# typed writers
# ----------------------------------------------------------------------


def write_paths_csv(path: Path, ensemble: Ensemble) -> None:
    """All paths in long form: ``path_index,t,x``, one row per sample.

    This is the hot writer (a default run is a million rows), so it
    bypasses the generic cell dispatch and formats the shared time
    column once instead of re-converting it for every path.
    """
    times = [_FLOAT_FMT % t for t in ensemble.times.tolist()]
    lines = ["path_index,t,x"]
    for p in ensemble.paths:
        prefix = "%d," % p.path_index
        lines.extend(
            prefix + t + "," + _FLOAT_FMT % x
            for t, x in zip(times, p.states.tolist())
        )
    _write_text(path, "\n".join(lines) + "\n")


def write_density_csv(path: Path, density: DensityEstimate) -> None:
    """Histogram and kernel columns side by side.

    The two column groups have different natural lengths (bins versus
    kernel grid points); the shorter group is padded with empty cells
    so the file stays rectangular.
    """
    n_bins = len(density.counts)
    n_grid = len(density.kde_grid)
    rows = []
    for i in range(max(n_bins, n_grid)):
        hist = (
            (
                float(density.bin_edges[i]),
                float(density.bin_edges[i + 1]),
                int(density.counts[i]),
            )
            if i < n_bins
            else (None, None, None)
        )
        kde = (
            (float(density.kde_grid[i]), float(density.kde_values[i]))
            if i < n_grid
            else (None, None)
        )
        rows.append(hist + kde)
    emit_csv(path, ("bin_left", "bin_right", "count", "kde_x", "kde_y"), rows)


def write_bands_csv(path: Path, report: BandReport) -> None:
    rows = [
        (i, float(loc), float(prom))
        for i, (loc, prom) in enumerate(
            zip(report.mode_locations, report.mode_prominences)
        )
    ]
    emit_csv(path, ("mode_index", "location", "prominence"), rows)


def write_barrier_csv(path: Path, estimates: Sequence[BarrierEstimate]) -> None:
    rows = [
        (e.method, float(e.x_minus), float(e.x_plus), e.quantile)
        for e in estimates
    ]
    emit_csv(path, ("method", "x_minus", "x_plus", "quantile"), rows)


def write_lattice_csv(path: Path, lattice: LatticeDistribution) -> None:
    rows = zip(
        (float(p) for p in lattice.positions),
        (float(q) for q in lattice.probabilities),
    )
    emit_csv(path, ("position", "probability"), rows)


def write_check_csv(path: Path, report: ConditionReport) -> None:
    emit_csv(
        path,
        (
            "lambda1_est",
            "lambda2_est",
            "domain_radius",
            "grid_step",
            "linear_growth_violated",
        ),
        [
            (
                report.lambda1_est,
                report.lambda2_est,
                report.domain_radius,
                report.grid_step,
                report.linear_growth_violated,
            )
        ],
    )


def write_envelope_csv(path: Path, series: Sequence[EnvelopeSeries]) -> None:
    """Envelope kinds as columns over a shared time grid."""
    if not series:
        raise ValueError("need at least one envelope series")
    times = series[0].times
    for s in series[1:]:
        if len(s.times) != len(times):
            raise ValueError("envelope series must share one time grid")
    header = ("t",) + tuple(s.kind for s in series)
    columns = [times] + [s.values for s in series]
    rows = zip(*(c.tolist() for c in columns))
    emit_csv(path, header, rows)


# ----------------------------------------------------------------------
# manifest
# ----------------------------------------------------------------------


def sha256_of(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


def write_manifest(
    path: Path,
    version: str,
    command: str,
    cfg: ExperimentConfig,
    outputs: Sequence[Path],
) -> None:
    """Record what produced a set of outputs, byte-reproducibly.

    The manifest holds the code version, the command, the full
    configuration (``config.`` prefix; strip it and the block parses
    back into the same configuration), the starting-state assumption,
    and a sha256 per output file.  No clocks, hosts, or absolute paths:
    two runs of the same configuration write identical manifests.
    """
    lines = [
        f"code_version = {version}",
        f"command = {command}",
        "assumption.x0 = every path starts at the configured x0 "
        "(the integration protocol leaves the start implicit, so it is pinned here)",
    ]
    lines.extend(f"config.{line}" for line in render_config(cfg).splitlines())
    for out in outputs:
        lines.append(f"checksum.{out.name} = sha256:{sha256_of(out)}")
    _write_text(path, "\n".join(lines) + "\n")
