"""Experiment configuration: parsing, rendering, validation.

Configs are flat ``key = value`` files with ``#`` comments.  Every key
has a default, so the empty file is a complete experiment: the
standard constrained diffusion with zero drift, unit diffusion, and
the quadratic constraint at strength 100, integrated for 1000 unit
steps over 1000 paths.

``parse_config`` and ``render_config`` are exact inverses on valid
configs, which is what lets a manifest double as a rerun recipe.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

from .lil import DEFAULT_T_MIN
from .model import BgcSde, constant_field, quadratic_constraint, zero_field
from .simulate import SimConfig

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "parse_config",
    "render_config",
    "apply_overrides",
    "make_sde",
    "sim_config",
]

_MAX_SEED = 2**64
_FORMATS = ("csv", "svg")
_PSI_KINDS = ("quadratic", "none")


class ConfigError(ValueError):
    """A config line or override could not be understood or validated."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one run needs, with the field order of the file format.

    ``t_min`` plays two roles: it is the left edge of the envelope
    ratio window and the pooling start for long-run densities.
    ``bandwidth`` and ``prominence`` of ``None`` mean the statistics
    pick their own (rendered as ``auto``).
    """

    mu: float = 0.0
    sigma: float = 1.0
    beta: float = 100.0
    psi: str = "quadratic"
    x0: float = 0.0
    dt: float = 1.0
    steps: int = 1000
    paths: int = 1000
    seed: int = 0
    antithetic: bool = False
    t_min: float = DEFAULT_T_MIN
    bins: int = 100
    bandwidth: float | None = None
    prominence: float | None = None
    quantile: float = 0.995
    radius: float = 100.0
    grid_step: float = 0.01
    dx: float = 1.0
    out_dir: str = "out"
    formats: tuple[str, ...] = ("csv", "svg")


# ----------------------------------------------------------------------
# per-key parsing
# ----------------------------------------------------------------------


def _parse_finite(value: str) -> float:
    out = float(value)
    if not math.isfinite(out):
        raise ValueError("must be finite")
    return out


def _parse_positive(value: str) -> float:
    out = _parse_finite(value)
    if not out > 0.0:
        raise ValueError("must be positive")
    return out


def _parse_int_at_least(minimum: int):
    def parse(value: str) -> int:
        out = int(value)
        if out < minimum:
            raise ValueError(f"must be at least {minimum}")
        return out

    return parse


def _parse_seed(value: str) -> int:
    out = int(value)
    if not 0 <= out < _MAX_SEED:
        raise ValueError("must fit in 64 bits")
    return out


def _parse_bool(value: str) -> bool:
    if value == "true":
        return True
    if value == "false":
        return False
    raise ValueError("must be true or false")


def _parse_psi(value: str) -> str:
    if value not in _PSI_KINDS:
        raise ValueError(f"must be one of {', '.join(_PSI_KINDS)}")
    return value


def _parse_auto_positive(value: str) -> float | None:
    if value == "auto":
        return None
    out = _parse_finite(value)
    if not out > 0.0:
        raise ValueError("must be positive or auto")
    return out


def _parse_quantile(value: str) -> float:
    out = _parse_finite(value)
    if not 0.5 < out < 1.0:
        raise ValueError("must lie strictly between 0.5 and 1")
    return out


def _parse_t_min(value: str) -> float:
    out = _parse_finite(value)
    if out < math.e:
        raise ValueError("must be at least e, the envelope domain edge")
    return out


def _parse_out_dir(value: str) -> str:
    if not value:
        raise ValueError("must be nonempty")
    return value


def _parse_formats(value: str) -> tuple[str, ...]:
    parts = tuple(p.strip() for p in value.split(",") if p.strip())
    if not parts:
        raise ValueError("must list at least one format")
    for p in parts:
        if p not in _FORMATS:
            raise ValueError(f"unknown format {p!r}; known: {', '.join(_FORMATS)}")
    if len(set(parts)) != len(parts):
        raise ValueError("formats must not repeat")
    return parts


_PARSERS = {
    "mu": _parse_finite,
    "sigma": _parse_finite,
    "beta": _parse_positive,
    "psi": _parse_psi,
    "x0": _parse_finite,
    "dt": _parse_positive,
    "steps": _parse_int_at_least(1),
    "paths": _parse_int_at_least(1),
    "seed": _parse_seed,
    "antithetic": _parse_bool,
    "t_min": _parse_t_min,
    "bins": _parse_int_at_least(2),
    "bandwidth": _parse_auto_positive,
    "prominence": _parse_auto_positive,
    "quantile": _parse_quantile,
    "radius": _parse_positive,
    "grid_step": _parse_positive,
    "dx": _parse_positive,
    "out_dir": _parse_out_dir,
    "formats": _parse_formats,
}


def _parse_value(key: str, value: str, where: str):
    if key not in _PARSERS:
        known = ", ".join(_PARSERS)
        raise ConfigError(f"{where}: unknown key {key!r} (known keys: {known})")
    try:
        return _PARSERS[key](value)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{where}: bad value for {key!r}: {exc}") from None


def _validate(cfg: ExperimentConfig) -> ExperimentConfig:
    if cfg.grid_step >= cfg.radius:
        raise ConfigError("grid_step must be smaller than radius")
    return cfg


# ----------------------------------------------------------------------
# whole-file parse and render
# ----------------------------------------------------------------------


def parse_config(text: str) -> ExperimentConfig:
    """Parse config text; unknown keys and bad values name their line.

    Blank lines and ``#`` comments are skipped.  A repeated key takes
    its last value, as in most flat config formats.
    """
    overrides: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}: expected key = value, got {line!r}")
        key = key.strip()
        value = value.strip()
        overrides[key] = _parse_value(key, value, f"line {lineno}")
    return _validate(ExperimentConfig(**overrides))


def apply_overrides(cfg: ExperimentConfig, pairs: list[str]) -> ExperimentConfig:
    """Apply command-line ``key=value`` overrides on top of a config."""
    overrides: dict = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep:
            raise ConfigError(f"override {pair!r}: expected key=value")
        key = key.strip()
        value = value.strip()
        overrides[key] = _parse_value(key, value, f"override {pair!r}")
    return _validate(dataclasses.replace(cfg, **overrides))


def _format_value(value) -> str:
    if value is None:
        return "auto"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ",".join(value)
    return str(value)


def render_config(cfg: ExperimentConfig) -> str:
    """Render a config as text that parses back to an equal config."""
    lines = [
        f"{f.name} = {_format_value(getattr(cfg, f.name))}"
        for f in dataclasses.fields(ExperimentConfig)
    ]
    return "\n".join(lines) + "\n"


# ----------------------------------------------------------------------
# builders
# ----------------------------------------------------------------------


def make_sde(cfg: ExperimentConfig, constrained: bool = True) -> BgcSde:
    """Build the configured diffusion, optionally with constraint removed.

    ``constrained=False`` gives the free twin of the same experiment:
    identical drift, diffusion, and start, with the constraint zeroed.
    The label records which one it is.
    """
    use_constraint = constrained and cfg.psi == "quadratic"
    constraint = quadratic_constraint(cfg.beta) if use_constraint else zero_field()
    return BgcSde(
        drift=constant_field(cfg.mu, label=f"mu={cfg.mu:g}"),
        diffusion=constant_field(cfg.sigma, label=f"sigma={cfg.sigma:g}"),
        constraint=constraint,
        x0=cfg.x0,
        label="bgc" if use_constraint else "unconstrained",
    )


def sim_config(cfg: ExperimentConfig) -> SimConfig:
    return SimConfig(
        dt=cfg.dt,
        n_steps=cfg.steps,
        n_paths=cfg.paths,
        master_seed=cfg.seed,
        antithetic=cfg.antithetic,
    )
