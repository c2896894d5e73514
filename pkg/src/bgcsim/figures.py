"""Figure rendering to deterministic SVG files.

Figures follow a fixed color language: blue for the unconstrained
process, red for the constrained one, green for the iterated-logarithm
envelope (and for detected density peaks), plain red for the root-t
comparison curve.  Everything is rendered headless through the Agg
backend.

Byte determinism needs three pins: a fixed hash salt so element ids do
not depend on the process, fonts rendered as paths so the file does not
reference whatever fonts the host has, and no creation date in the
metadata.  Dense path clouds are rasterized inside the SVG, which keeps
file sizes flat in the number of paths.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.collections import LineCollection
from matplotlib.lines import Line2D

from .lil import EnvelopeSeries

__all__ = [
    "EmptySeriesError",
    "COLOR_UNCONSTRAINED",
    "COLOR_CONSTRAINED",
    "COLOR_LIL",
    "COLOR_SQRT",
    "save_paths_figure",
    "save_scatter_grid",
    "save_density_grid",
    "save_envelope_figure",
]

COLOR_UNCONSTRAINED = "tab:blue"
COLOR_CONSTRAINED = "tab:red"
COLOR_LIL = "tab:green"
COLOR_SQRT = "tab:red"
COLOR_ADJUSTED = "tab:purple"

_RC = {"svg.hashsalt": "bgcsim", "svg.fonttype": "path"}


class EmptySeriesError(ValueError):
    """A figure was asked to render no data."""


def _save(fig, path: Path) -> None:
    try:
        with matplotlib.rc_context(_RC):
            fig.savefig(path, format="svg", metadata={"Date": None})
    finally:
        plt.close(fig)


def _proxy(color: str, label: str) -> Line2D:
    return Line2D([0], [0], color=color, linewidth=1.5, label=label)


# ----------------------------------------------------------------------
# figure kinds
# ----------------------------------------------------------------------


def save_paths_figure(
    path: Path,
    times: np.ndarray,
    layers: Sequence[tuple[str, str, np.ndarray]],
    envelope: EnvelopeSeries | None = None,
    title: str = "",
) -> None:
    """Overlay whole path bundles as one line cloud per layer.

    ``layers`` holds ``(label, color, states_matrix)`` triples whose
    matrix rows are paths on the shared ``times`` grid.  An optional
    envelope is mirrored about zero on top of the cloud.
    """
    if not layers or any(layer[2].size == 0 for layer in layers):
        raise EmptySeriesError("paths figure needs at least one nonempty layer")
    fig, ax = plt.subplots(figsize=(8.0, 5.0))
    for label, color, matrix in layers:
        segments = [np.column_stack((times, row)) for row in matrix]
        ax.add_collection(
            LineCollection(
                segments,
                colors=color,
                linewidths=0.4,
                alpha=0.4,
                rasterized=True,
            )
        )
    handles = [_proxy(color, label) for label, color, _ in layers]
    if envelope is not None:
        ax.plot(envelope.times, envelope.values, color=COLOR_LIL, linewidth=1.5)
        ax.plot(envelope.times, -envelope.values, color=COLOR_LIL, linewidth=1.5)
        handles.append(_proxy(COLOR_LIL, "iterated-log envelope"))
    ax.autoscale()
    ax.set_xlabel("t")
    ax.set_ylabel("X(t)")
    if title:
        ax.set_title(title)
    ax.legend(handles=handles, loc="upper left", fontsize="small")
    fig.tight_layout()
    _save(fig, path)


def save_scatter_grid(
    path: Path,
    panels: Sequence[tuple[str, Sequence[tuple[str, str, np.ndarray, np.ndarray]]]],
    title: str = "",
) -> None:
    """Panel grid of state scatters.

    Each panel is ``(subtitle, layers)`` with layers of
    ``(label, color, times, states_matrix)``; the scatter shows every
    sample of every path as one dot.
    """
    if not panels:
        raise EmptySeriesError("scatter grid needs at least one panel")
    ncols = min(len(panels), 3)
    nrows = (len(panels) + ncols - 1) // ncols
    fig, axes = plt.subplots(
        nrows, ncols, figsize=(4.5 * ncols, 3.6 * nrows), squeeze=False
    )
    for k, (subtitle, layers) in enumerate(panels):
        ax = axes[k // ncols][k % ncols]
        if not layers:
            raise EmptySeriesError(f"panel {subtitle!r} has no layers")
        for label, color, times, matrix in layers:
            if matrix.size == 0:
                raise EmptySeriesError(f"layer {label!r} is empty")
            t = np.tile(times, matrix.shape[0])
            ax.scatter(
                t,
                matrix.ravel(),
                s=1.0,
                c=color,
                alpha=0.25,
                linewidths=0,
                rasterized=True,
            )
        ax.set_title(subtitle, fontsize="small")
        ax.set_xlabel("t")
        ax.set_ylabel("X(t)")
    for k in range(len(panels), nrows * ncols):
        axes[k // ncols][k % ncols].set_axis_off()
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    _save(fig, path)


def save_density_grid(
    path: Path,
    panels: Sequence[
        tuple[
            str,
            Sequence[tuple[str, str, np.ndarray, np.ndarray]],
            tuple[np.ndarray, np.ndarray] | None,
        ]
    ],
    title: str = "",
) -> None:
    """Panel grid of density curves with optional peak markers.

    Each panel is ``(subtitle, curves, peaks)``; curves are
    ``(label, color, x, y)`` and peaks, when given, are plotted as
    green markers at ``(locations, heights)``.
    """
    if not panels:
        raise EmptySeriesError("density grid needs at least one panel")
    ncols = min(len(panels), 3)
    nrows = (len(panels) + ncols - 1) // ncols
    fig, axes = plt.subplots(
        nrows, ncols, figsize=(4.5 * ncols, 3.6 * nrows), squeeze=False
    )
    for k, (subtitle, curves, peaks) in enumerate(panels):
        ax = axes[k // ncols][k % ncols]
        if not curves:
            raise EmptySeriesError(f"panel {subtitle!r} has no curves")
        for label, color, x, y in curves:
            if len(x) == 0:
                raise EmptySeriesError(f"curve {label!r} is empty")
            ax.plot(x, y, color=color, linewidth=1.2, label=label)
        if peaks is not None and len(peaks[0]):
            ax.plot(
                peaks[0],
                peaks[1],
                linestyle="none",
                marker="v",
                color=COLOR_LIL,
                markersize=6,
                label="peak",
            )
        ax.set_title(subtitle, fontsize="small")
        ax.set_xlabel("x")
        ax.set_ylabel("density")
        ax.legend(fontsize="x-small")
    for k in range(len(panels), nrows * ncols):
        axes[k // ncols][k % ncols].set_axis_off()
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    _save(fig, path)


def save_envelope_figure(
    path: Path,
    series: Sequence[EnvelopeSeries],
    title: str = "",
) -> None:
    """Envelope comparison: green iterated-log curve against red root-t."""
    if not series or any(len(s.times) == 0 for s in series):
        raise EmptySeriesError("envelope figure needs nonempty series")
    colors = {
        "lil": COLOR_LIL,
        "sqrt_t": COLOR_SQRT,
        "lil_adjusted": COLOR_ADJUSTED,
    }
    fig, ax = plt.subplots(figsize=(8.0, 5.0))
    for s in series:
        ax.plot(
            s.times,
            s.values,
            color=colors.get(s.kind, "black"),
            linewidth=1.5,
            label=s.kind,
        )
    ax.set_xlabel("t")
    ax.set_ylabel("envelope")
    if title:
        ax.set_title(title)
    ax.legend(fontsize="small")
    fig.tight_layout()
    _save(fig, path)
