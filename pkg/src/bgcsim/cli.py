"""Command-line interface.

One executable, ``bgc``, with a subcommand per product:

- ``simulate``: integrate the configured ensemble, write the paths.
- ``density``: long-run pooled density and band report of one run.
- ``envelope``: the three growth envelopes on the configured horizon.
- ``barrier``: hidden-barrier estimates, analytic and empirical.
- ``lattice``: exact reference distribution of the unit lattice walk.
- ``check``: regularity scan of the configured coefficients.
- ``figure``: preset multi-run comparison figures.

Every command accepts ``--config FILE``, ``--out DIR``, ``--seed N``
and repeated ``--set key=value`` overrides; precedence is file, then
``--set``, then the dedicated flags.  Exit status is 0 on success, 1
for configuration and usage problems, 2 for runtime failures.  On
failure, files already written by the failing command are removed
rather than left half-made.

``BGC_THREADS`` sets integration threads; it changes wall time only,
never a byte of output.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .config import (
    ConfigError,
    ExperimentConfig,
    apply_overrides,
    make_sde,
    parse_config,
    sim_config,
)
from .lil import envelope_series
from .model import check_conditions
from .output import (
    write_bands_csv,
    write_barrier_csv,
    write_check_csv,
    write_density_csv,
    write_envelope_csv,
    write_lattice_csv,
    write_manifest,
    write_paths_csv,
)
from .simulate import run_ensemble
from .stats import (
    detect_bands,
    estimate_barrier,
    estimate_density,
    lattice_evolve,
    pooled_samples,
    terminal_samples,
)

__all__ = ["main", "PRESETS"]

_MAX_SEED = 2**64


# ----------------------------------------------------------------------
# figure presets
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class _Preset:
    """One canned comparison: cells of (mu, sigma), a panel style, and
    whether densities pool late times or take terminal states only."""

    style: str  # paths | scatter | density
    cells: tuple[tuple[float, float], ...]
    tag: str  # "", "mu", or "sigma"
    both_variants: bool
    pooled_from: float | None


PRESETS: dict[str, _Preset] = {
    "fig5a": _Preset("paths", ((-0.05, 1.0),), "", True, None),
    "fig5b": _Preset("paths", ((0.05, 1.0),), "", True, None),
    "fig5c": _Preset("paths", ((0.0, 1.0),), "", True, None),
    "fig5d": _Preset("paths", ((0.0, 2.0),), "", True, None),
    "fig6": _Preset(
        "scatter", ((-0.05, 1.0), (0.0, 1.0), (0.05, 1.0)), "mu", False, 100.0
    ),
    "fig7": _Preset(
        "density", ((-0.05, 1.0), (0.0, 1.0), (0.05, 1.0)), "mu", True, 100.0
    ),
    "fig8": _Preset(
        "scatter", ((0.0, -1.5), (0.0, 1.0), (0.0, 3.5)), "sigma", False, None
    ),
}

_VARIANT_COLOR = {"unconstrained": "tab:blue", "bgc": "tab:red"}


class _Outputs:
    """Tracks files as they are written so a failure can remove them."""

    def __init__(self, out_dir: Path):
        self.dir = out_dir
        self.written: list[Path] = []

    def path(self, name: str) -> Path:
        p = self.dir / name
        self.written.append(p)
        return p

    def discard(self) -> None:
        for p in self.written:
            p.unlink(missing_ok=True)


# ----------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------


def _cmd_simulate(args, cfg: ExperimentConfig, out: _Outputs) -> None:
    sde = make_sde(cfg)
    ensemble = run_ensemble(sde, sim_config(cfg))
    files = []
    if "csv" in cfg.formats:
        p = out.path(f"{sde.label}_paths.csv")
        write_paths_csv(p, ensemble)
        files.append(p)
    write_manifest(out.path("simulate_manifest.txt"), __version__, "simulate", cfg, files)


def _cmd_density(args, cfg: ExperimentConfig, out: _Outputs) -> None:
    if cfg.t_min > cfg.dt * cfg.steps:
        raise ConfigError("t_min exceeds the horizon dt * steps")
    sde = make_sde(cfg)
    ensemble = run_ensemble(sde, sim_config(cfg))
    samples = pooled_samples(ensemble, cfg.t_min)
    density = estimate_density(samples, bins=cfg.bins, bandwidth=cfg.bandwidth)
    bands = detect_bands(density, cfg.prominence)
    files = []
    if "csv" in cfg.formats:
        p = out.path(f"{sde.label}_density.csv")
        write_density_csv(p, density)
        files.append(p)
        p = out.path(f"{sde.label}_bands.csv")
        write_bands_csv(p, bands)
        files.append(p)
    if "svg" in cfg.formats:
        from . import figures

        peaks = (
            bands.mode_locations,
            np.interp(bands.mode_locations, density.kde_grid, density.kde_values),
        )
        p = out.path("density.svg")
        figures.save_density_grid(
            p,
            [
                (
                    f"{sde.label}, pooled t >= {cfg.t_min:g}",
                    [
                        (
                            sde.label,
                            _VARIANT_COLOR.get(sde.label, "black"),
                            density.kde_grid,
                            density.kde_values,
                        )
                    ],
                    peaks,
                )
            ],
        )
        files.append(p)
    write_manifest(out.path("density_manifest.txt"), __version__, "density", cfg, files)


def _cmd_envelope(args, cfg: ExperimentConfig, out: _Outputs) -> None:
    horizon = cfg.dt * cfg.steps
    if horizon < math.e:
        raise ConfigError("horizon dt * steps must reach e for the envelopes")
    first = int(math.ceil(math.e / cfg.dt))
    grid = np.arange(first, cfg.steps + 1, dtype=float) * cfg.dt
    times = np.unique(np.concatenate(([math.e], grid)))
    series = [envelope_series(kind, times) for kind in ("sqrt_t", "lil", "lil_adjusted")]
    files = []
    if "csv" in cfg.formats:
        p = out.path("envelope.csv")
        write_envelope_csv(p, series)
        files.append(p)
    if "svg" in cfg.formats:
        from . import figures

        p = out.path("envelope.svg")
        figures.save_envelope_figure(p, series)
        files.append(p)
    write_manifest(
        out.path("envelope_manifest.txt"), __version__, "envelope", cfg, files
    )


def _cmd_barrier(args, cfg: ExperimentConfig, out: _Outputs) -> None:
    sde = make_sde(cfg)
    estimates = []
    if cfg.psi != "none":
        estimates.append(estimate_barrier(sde, method="deterministic_root"))
    ensemble = run_ensemble(sde, sim_config(cfg))
    estimates.append(
        estimate_barrier(
            sde, method="empirical_quantile", ensemble=ensemble, quantile=cfg.quantile
        )
    )
    files = []
    if "csv" in cfg.formats:
        p = out.path("barrier.csv")
        write_barrier_csv(p, estimates)
        files.append(p)
    write_manifest(out.path("barrier_manifest.txt"), __version__, "barrier", cfg, files)


def _cmd_lattice(args, cfg: ExperimentConfig, out: _Outputs) -> None:
    lattice = lattice_evolve(cfg.steps, dx=cfg.dx)
    files = []
    if "csv" in cfg.formats:
        p = out.path("lattice.csv")
        write_lattice_csv(p, lattice)
        files.append(p)
    write_manifest(out.path("lattice_manifest.txt"), __version__, "lattice", cfg, files)


def _cmd_check(args, cfg: ExperimentConfig, out: _Outputs) -> None:
    report = check_conditions(make_sde(cfg), cfg.radius, cfg.grid_step)
    files = []
    if "csv" in cfg.formats:
        p = out.path("check.csv")
        write_check_csv(p, report)
        files.append(p)
    write_manifest(out.path("check_manifest.txt"), __version__, "check", cfg, files)


def _cell_tag(preset: _Preset, mu: float, sigma: float) -> str:
    if preset.tag == "mu":
        return f"_mu{mu:g}"
    if preset.tag == "sigma":
        return f"_sigma{sigma:g}"
    return ""


def _cmd_figure(args, cfg: ExperimentConfig, out: _Outputs) -> None:
    name = args.preset
    if name not in PRESETS:
        valid = ", ".join(sorted(PRESETS))
        raise ConfigError(f"unknown preset {name!r}; valid presets: {valid}")
    preset = PRESETS[name]
    files = []
    cells = []
    for mu, sigma in preset.cells:
        cell_cfg = dataclasses.replace(cfg, mu=mu, sigma=sigma)
        tag = _cell_tag(preset, mu, sigma)
        variants = ("unconstrained", "bgc") if preset.both_variants else ("bgc",)
        runs = []
        for variant in variants:
            sde = make_sde(cell_cfg, constrained=(variant == "bgc"))
            ensemble = run_ensemble(sde, sim_config(cell_cfg))
            samples = (
                terminal_samples(ensemble)
                if preset.pooled_from is None
                else pooled_samples(ensemble, preset.pooled_from)
            )
            density = estimate_density(samples, bins=cfg.bins, bandwidth=cfg.bandwidth)
            bands = detect_bands(density, cfg.prominence)
            if "csv" in cfg.formats:
                p = out.path(f"{name}{tag}_{variant}_paths.csv")
                write_paths_csv(p, ensemble)
                files.append(p)
                p = out.path(f"{name}{tag}_{variant}_density.csv")
                write_density_csv(p, density)
                files.append(p)
                p = out.path(f"{name}{tag}_{variant}_bands.csv")
                write_bands_csv(p, bands)
                files.append(p)
            runs.append((variant, ensemble, density, bands))
        cells.append((mu, sigma, runs))
    if "svg" in cfg.formats:
        p = out.path(f"{name}.svg")
        _render_preset_figure(p, preset, cells)
        files.append(p)
    write_manifest(
        out.path(f"{name}_manifest.txt"), __version__, f"figure {name}", cfg, files
    )


def _render_preset_figure(path: Path, preset: _Preset, cells) -> None:
    from . import figures

    if preset.style == "paths":
        mu, sigma, runs = cells[0]
        times = runs[0][1].times
        layers = [
            (variant, _VARIANT_COLOR[variant], ensemble.state_matrix())
            for variant, ensemble, _, _ in runs
        ]
        tail = times[times >= math.e]
        envelope = envelope_series("lil", tail) if len(tail) else None
        figures.save_paths_figure(
            path, times, layers, envelope=envelope, title=f"mu={mu:g}, sigma={sigma:g}"
        )
    elif preset.style == "scatter":
        panels = []
        for mu, sigma, runs in cells:
            layers = [
                (variant, _VARIANT_COLOR[variant], ensemble.times, ensemble.state_matrix())
                for variant, ensemble, _, _ in runs
            ]
            panels.append((f"mu={mu:g}, sigma={sigma:g}", layers))
        figures.save_scatter_grid(path, panels)
    else:
        panels = []
        for mu, sigma, runs in cells:
            curves = [
                (variant, _VARIANT_COLOR[variant], density.kde_grid, density.kde_values)
                for variant, _, density, _ in runs
            ]
            # Peak markers come from the constrained run of the cell.
            _, _, density, bands = runs[-1]
            peaks = (
                bands.mode_locations,
                np.interp(bands.mode_locations, density.kde_grid, density.kde_values),
            )
            panels.append((f"mu={mu:g}, sigma={sigma:g}", curves, peaks))
        figures.save_density_grid(path, panels)


_COMMANDS = {
    "simulate": _cmd_simulate,
    "density": _cmd_density,
    "envelope": _cmd_envelope,
    "barrier": _cmd_barrier,
    "lattice": _cmd_lattice,
    "check": _cmd_check,
    "figure": _cmd_figure,
}


# ----------------------------------------------------------------------
# argument handling
# ----------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    """Argparse that reports usage problems as ConfigError (exit 1)."""

    def error(self, message):
        raise ConfigError(message)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, metavar="FILE", help="config file to load")
    p.add_argument("--out", type=Path, metavar="DIR", help="output directory")
    p.add_argument("--seed", type=int, metavar="N", help="master seed override")
    p.add_argument(
        "--set",
        action="append",
        default=[],
        dest="overrides",
        metavar="KEY=VALUE",
        help="override one config key (repeatable)",
    )


def _build_parser() -> _Parser:
    parser = _Parser(prog="bgc", description="Constrained diffusion toolkit")
    parser.add_argument("--version", action="version", version=f"bgc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    helps = {
        "simulate": "integrate the configured ensemble and write the paths",
        "density": "pooled long-run density and band report",
        "envelope": "growth envelopes over the configured horizon",
        "barrier": "hidden-barrier estimates",
        "lattice": "exact unit lattice walk distribution",
        "check": "regularity scan of the configured coefficients",
        "figure": "canned comparison figures",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text, description=text)
        if name == "figure":
            p.add_argument("preset", help="one of: " + ", ".join(sorted(PRESETS)))
        _add_common(p)
    return parser


def _load_config(args) -> ExperimentConfig:
    if args.config is not None:
        try:
            text = args.config.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config file {args.config}: {exc}") from None
        cfg = parse_config(text)
    else:
        cfg = ExperimentConfig()
    if args.overrides:
        cfg = apply_overrides(cfg, args.overrides)
    if args.seed is not None:
        if not 0 <= args.seed < _MAX_SEED:
            raise ConfigError("seed must fit in 64 bits")
        cfg = dataclasses.replace(cfg, seed=args.seed)
    if args.out is not None:
        cfg = dataclasses.replace(cfg, out_dir=str(args.out))
    return cfg


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    out = None
    try:
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:  # --help and --version exit cleanly
            return int(exc.code or 0)
        cfg = _load_config(args)
        out = _Outputs(Path(cfg.out_dir))
        out.dir.mkdir(parents=True, exist_ok=True)
        try:
            _COMMANDS[args.command](args, cfg, out)
        except BaseException:
            out.discard()
            raise
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    for p in out.written:
        print(f"wrote {p}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
