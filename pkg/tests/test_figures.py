import numpy as np
import pytest

from bgcsim import envelope_series, estimate_density
from bgcsim.figures import (
    EmptySeriesError,
    save_density_grid,
    save_envelope_figure,
    save_paths_figure,
    save_scatter_grid,
)


def path_bundle():
    rng = np.random.default_rng(0)
    times = np.arange(0.0, 50.0)
    states = np.cumsum(rng.normal(size=(6, 50)), axis=1)
    return times, states


def test_paths_figure_writes_svg(tmp_path):
    times, states = path_bundle()
    out = tmp_path / "paths.svg"
    save_paths_figure(out, times, [("walks", "tab:blue", states)], title="bundle")
    head = out.read_bytes()[:200]
    assert head.startswith(b"<?xml")
    assert b"svg" in head


def test_paths_figure_is_byte_deterministic(tmp_path):
    times, states = path_bundle()
    envelope = envelope_series("lil", times[times >= 3.0])
    a = tmp_path / "a.svg"
    b = tmp_path / "b.svg"
    save_paths_figure(a, times, [("walks", "tab:red", states)], envelope=envelope)
    save_paths_figure(b, times, [("walks", "tab:red", states)], envelope=envelope)
    assert a.read_bytes() == b.read_bytes()


def test_paths_figure_rejects_empty_layers(tmp_path):
    with pytest.raises(EmptySeriesError):
        save_paths_figure(tmp_path / "x.svg", np.arange(3.0), [])


def test_scatter_grid(tmp_path):
    times, states = path_bundle()
    out = tmp_path / "grid.svg"
    save_scatter_grid(
        out,
        [
            ("left", [("walks", "tab:blue", times, states)]),
            ("right", [("walks", "tab:red", times, states * 2)]),
        ],
    )
    assert out.stat().st_size > 0
    with pytest.raises(EmptySeriesError):
        save_scatter_grid(tmp_path / "y.svg", [])


def test_density_grid_with_peaks(tmp_path):
    d = estimate_density(np.random.default_rng(1).normal(size=300))
    peak = (np.array([0.0]), np.array([float(d.kde_values.max())]))
    out = tmp_path / "density.svg"
    save_density_grid(
        out,
        [("panel", [("kde", "tab:red", d.kde_grid, d.kde_values)], peak)],
    )
    assert out.read_bytes().startswith(b"<?xml")


def test_envelope_figure(tmp_path):
    t = np.arange(3.0, 200.0)
    series = [envelope_series(k, t) for k in ("sqrt_t", "lil", "lil_adjusted")]
    out = tmp_path / "envelope.svg"
    save_envelope_figure(out, series)
    assert out.stat().st_size > 0
    with pytest.raises(EmptySeriesError):
        save_envelope_figure(tmp_path / "z.svg", [])
