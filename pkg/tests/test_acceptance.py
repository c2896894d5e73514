"""End-to-end acceptance checks.

One test per headline guarantee, each with its own wall-clock budget,
so ``pytest -v`` on this module reads as a scorecard.  Several bands
here were frozen from pilot runs at the pinned seeds; the pilot notes
live outside the package.
"""

import contextlib
import math
import os
import shutil
import subprocess
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from bgcsim import (
    BgcSde,
    SimConfig,
    check_conditions,
    constant_field,
    detect_bands,
    empirical_limsup_ratio,
    envelope_crossover,
    envelope_series,
    escape_fraction,
    estimate_barrier,
    estimate_density,
    EnvelopeDomainError,
    ks_distance,
    lattice_evolve,
    lil_envelope,
    pooled_samples,
    quadratic_constraint,
    run_ensemble,
    scale_function,
    skewness,
    speed_measure_density,
    terminal_samples,
    zero_field,
)

E_E = math.exp(math.e)


@contextlib.contextmanager
def budget(seconds):
    start = time.perf_counter()
    yield
    elapsed = time.perf_counter() - start
    assert elapsed < seconds, f"runtime budget {seconds}s exceeded: {elapsed:.2f}s"


def bgc_sde(mu, sigma, beta=100.0):
    return BgcSde(constant_field(mu), constant_field(sigma), quadratic_constraint(beta))


def plain_sde(mu, sigma):
    return BgcSde(constant_field(mu), constant_field(sigma), zero_field())


def protocol(seed, n_steps=1000, n_paths=1000):
    return SimConfig(dt=1.0, n_steps=n_steps, n_paths=n_paths, master_seed=seed)


def cli_command():
    exe = shutil.which("bgc")
    return [exe] if exe else [sys.executable, "-m", "bgcsim"]


def test_criterion_01_byte_determinism_across_runs_and_workers(tmp_path):
    with budget(10.0):
        dirs = []
        for threads in ("1", "8"):
            out = tmp_path / f"workers_{threads}"
            env = dict(os.environ, BGC_THREADS=threads)
            result = subprocess.run(
                cli_command() + ["figure", "fig5c", "--seed", "42", "--out", str(out)],
                capture_output=True,
                text=True,
                env=env,
                check=False,
            )
            assert result.returncode == 0, result.stderr
            dirs.append(out)
        first, second = dirs
        names = sorted(p.name for p in first.iterdir() if p.suffix in (".csv", ".svg"))
        assert any(n.endswith(".csv") for n in names)
        assert any(n.endswith(".svg") for n in names)
        assert names == sorted(
            p.name for p in second.iterdir() if p.suffix in (".csv", ".svg")
        )
        for name in names:
            assert (first / name).read_bytes() == (second / name).read_bytes(), name


def test_criterion_02_quadrature_matches_closed_forms():
    with budget(1.0):
        for mu, sigma in ((0.05, 1.0), (0.0, 2.0)):
            drift = constant_field(mu)
            diffusion = constant_field(sigma)
            for x in np.linspace(-10.0, 10.0, 50):
                x = float(x)
                if mu == 0.0:
                    scale_exact = x
                else:
                    k = 2.0 * mu / sigma**2
                    scale_exact = (1.0 - math.exp(-k * x)) / k
                speed_exact = 2.0 * math.exp(2.0 * mu * x / sigma**2) / sigma**2
                assert scale_function(drift, diffusion, x) == pytest.approx(
                    scale_exact, rel=1e-8, abs=1e-12
                )
                assert speed_measure_density(drift, diffusion, x) == pytest.approx(
                    speed_exact, rel=1e-8
                )


def test_criterion_03_envelope_analytics():
    with budget(1.0):
        assert envelope_crossover() == pytest.approx(
            math.exp(math.sqrt(math.e)), abs=1e-8
        )
        assert lil_envelope(math.e) == 0.0
        rng = np.random.default_rng(0)
        for t in rng.uniform(0.0, math.e, size=100):
            with pytest.raises(EnvelopeDomainError):
                lil_envelope(float(t))


def test_criterion_04_lattice_oracle_equivalence():
    with budget(5.0):
        rng = np.random.default_rng(0)
        steps = np.sign(rng.standard_normal((100_000, 10)))
        walks = steps.sum(axis=1)
        assert ks_distance(walks, lattice_evolve(10)) <= 0.01
        for n in range(1, 21):
            lat = lattice_evolve(n)
            for j, pos in enumerate(lat.positions):
                k = int(pos) + n
                expected = (
                    0.0 if k % 2 else float(Fraction(math.comb(n, k // 2), 2**n))
                )
                assert lat.probabilities[j] == expected


def test_criterion_05_wiener_envelope_coverage():
    with budget(30.0):
        ens = run_ensemble(plain_sde(0.0, 1.0), protocol(2, n_steps=10_000, n_paths=200))
        times = ens.times
        window = times >= E_E
        envelope = envelope_series("lil", times[window]).values
        states = ens.state_matrix()[:, window]
        coverage = float(np.mean(np.abs(states) <= envelope))
        assert coverage >= 0.95, f"coverage {coverage:.4f}"
        ratios = [empirical_limsup_ratio(p) for p in ens.paths]
        median = float(np.median(ratios))
        assert 0.7 <= median <= 1.3, f"median limsup ratio {median:.4f}"


def test_criterion_06_constraint_confines_the_ensemble():
    with budget(20.0):
        constrained = run_ensemble(bgc_sde(0.0, 1.0), protocol(0))
        free = run_ensemble(plain_sde(0.0, 1.0), protocol(0))
        sd_constrained = float(np.std(terminal_samples(constrained)))
        sd_free = float(np.std(terminal_samples(free)))
        assert sd_constrained < 0.5 * sd_free, (sd_constrained, sd_free)
        peak_constrained = float(np.abs(constrained.state_matrix()).max())
        peak_free = float(np.abs(free.state_matrix()).max())
        assert peak_constrained < peak_free


def test_criterion_07_long_run_banding():
    with budget(30.0):
        constrained = run_ensemble(bgc_sde(0.0, 1.0), protocol(0))
        free = run_ensemble(plain_sde(0.0, 1.0), protocol(0))
        report = detect_bands(estimate_density(pooled_samples(constrained, 100.0)))
        free_report = detect_bands(estimate_density(pooled_samples(free, 100.0)))
        observed = (
            f"constrained modes at {np.round(report.mode_locations, 3).tolist()}, "
            f"unconstrained modes at {np.round(free_report.mode_locations, 3).tolist()}"
        )

        locations = report.mode_locations
        assert len(locations) >= 2, (
            "expected at least two bands in the pooled constrained density; "
            + observed
            + "; the pooled law at these settings is unimodal, so this "
            "reproduction target is not met"
        )
        paired = sorted(locations)
        while len(paired) >= 2:
            low = paired.pop(0)
            high = paired.pop(-1)
            assert abs((low + high) / 2.0) <= 0.5, observed
        if paired:
            assert abs(paired[0]) <= 0.5, observed

        assert len(free_report.mode_locations) == 1, observed
        assert abs(free_report.mode_locations[0]) <= 0.5, observed


def test_criterion_08_constraint_squeezes_skew():
    with budget(30.0):
        deltas = {}
        for mu in (-0.05, 0.05):
            constrained = run_ensemble(bgc_sde(mu, 1.0), protocol(0))
            free = run_ensemble(plain_sde(mu, 1.0), protocol(0))
            deltas[mu] = skewness(terminal_samples(constrained)) - skewness(
                terminal_samples(free)
            )
        assert deltas[-0.05] > 0.0, deltas
        assert deltas[0.05] < 0.0, deltas


def test_criterion_09_high_volatility_escapes_the_barrier():
    with budget(30.0):
        base = run_ensemble(bgc_sde(0.0, 1.0), protocol(0))
        wild = run_ensemble(bgc_sde(0.0, 3.5), protocol(0))
        level = estimate_barrier(
            bgc_sde(0.0, 1.0), method="empirical_quantile", ensemble=base, quantile=0.995
        ).x_plus
        assert level > 0.0
        assert escape_fraction(wild, level) > escape_fraction(base, level)


def test_criterion_10_growth_condition_flags():
    with budget(1.0):
        constrained = BgcSde(
            constant_field(0.05), constant_field(1.0), quadratic_constraint(100.0)
        )
        free = BgcSde(constant_field(0.05), constant_field(1.0), zero_field())
        assert check_conditions(constrained, 100.0, 0.01).linear_growth_violated
        assert not check_conditions(free, 100.0, 0.01).linear_growth_violated


def test_criterion_11_barrier_root_scale_consistency():
    with budget(1.0):
        for beta in (25.0, 100.0, 400.0):
            for mu in (0.01, 0.05):
                estimate = estimate_barrier(bgc_sde(mu, 1.0, beta))
                assert estimate.x_plus == pytest.approx(
                    math.sqrt(beta * mu), abs=1e-8
                )
