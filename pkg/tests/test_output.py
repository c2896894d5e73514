import math

import numpy as np
import pytest

from bgcsim import (
    BgcSde,
    ExperimentConfig,
    SimConfig,
    check_conditions,
    constant_field,
    envelope_series,
    estimate_density,
    lattice_evolve,
    parse_config,
    quadratic_constraint,
    run_ensemble,
)
from bgcsim.output import (
    emit_csv,
    sha256_of,
    write_check_csv,
    write_density_csv,
    write_envelope_csv,
    write_lattice_csv,
    write_manifest,
    write_paths_csv,
)


def small_ensemble():
    sde = BgcSde(constant_field(0.0), constant_field(1.0), quadratic_constraint(100.0))
    return run_ensemble(sde, SimConfig(n_steps=4, n_paths=3, master_seed=1))


def test_emit_csv_formatting(tmp_path):
    out = tmp_path / "t.csv"
    emit_csv(out, ("a", "b", "c"), [(math.pi, None, True), (1, -0.0, False)])
    text = out.read_text()
    lines = text.splitlines()
    assert lines[0] == "a,b,c"
    assert lines[1].split(",")[1] == ""
    assert lines[1].split(",")[2] == "true"
    assert lines[2].split(",")[2] == "false"
    # seventeen significant digits round-trip doubles exactly
    assert float(lines[1].split(",")[0]) == math.pi


def test_csv_files_use_unix_line_endings(tmp_path):
    out = tmp_path / "t.csv"
    emit_csv(out, ("a",), [(1.5,)])
    assert b"\r" not in out.read_bytes()


def test_paths_csv_layout(tmp_path):
    ens = small_ensemble()
    out = tmp_path / "paths.csv"
    write_paths_csv(out, ens)
    lines = out.read_text().splitlines()
    assert lines[0] == "path_index,t,x"
    assert len(lines) == 1 + 3 * 5
    first = lines[1].split(",")
    assert first[0] == "0" and float(first[1]) == 0.0
    # every recorded state round-trips to the in-memory value
    got = np.array([float(line.split(",")[2]) for line in lines[1:]])
    np.testing.assert_array_equal(got, ens.state_matrix().ravel())


def test_density_csv_is_rectangular(tmp_path):
    d = estimate_density(np.random.default_rng(0).normal(size=400), bins=20)
    out = tmp_path / "density.csv"
    write_density_csv(out, d)
    lines = out.read_text().splitlines()
    width = len(lines[0].split(","))
    assert all(len(line.split(",")) == width for line in lines)
    assert len(lines) == 1 + max(20, 512)


def test_envelope_csv_columns(tmp_path):
    t = [3.0, 5.0, 10.0]
    series = [envelope_series(k, t) for k in ("sqrt_t", "lil", "lil_adjusted")]
    out = tmp_path / "env.csv"
    write_envelope_csv(out, series)
    lines = out.read_text().splitlines()
    assert lines[0] == "t,sqrt_t,lil,lil_adjusted"
    assert len(lines) == 4
    with pytest.raises(ValueError):
        write_envelope_csv(out, [])


def test_lattice_csv(tmp_path):
    out = tmp_path / "lattice.csv"
    write_lattice_csv(out, lattice_evolve(2))
    lines = out.read_text().splitlines()
    assert lines[0] == "position,probability"
    assert len(lines) == 6


def test_check_csv(tmp_path):
    sde = BgcSde(constant_field(0.05), constant_field(1.0), quadratic_constraint(100.0))
    report = check_conditions(sde, domain_radius=10.0, grid_step=0.1)
    out = tmp_path / "check.csv"
    write_check_csv(out, report)
    lines = out.read_text().splitlines()
    assert lines[0] == "lambda1_est,lambda2_est,domain_radius,grid_step,linear_growth_violated"
    assert len(lines) == 2
    assert lines[1].endswith("true") or lines[1].endswith("false")


def test_sha256_matches_hashlib(tmp_path):
    import hashlib

    out = tmp_path / "blob.bin"
    out.write_bytes(b"bgc" * 1000)
    assert sha256_of(out) == hashlib.sha256(b"bgc" * 1000).hexdigest()


def test_manifest_round_trips_config(tmp_path):
    ens = small_ensemble()
    data = tmp_path / "paths.csv"
    write_paths_csv(data, ens)
    manifest = tmp_path / "manifest.txt"
    cfg = ExperimentConfig(mu=0.05, seed=3)
    write_manifest(manifest, "0.1.0", "simulate", cfg, [data])
    text = manifest.read_text()
    assert "code_version = 0.1.0" in text
    assert "command = simulate" in text
    assert f"checksum.paths.csv = sha256:{sha256_of(data)}" in text
    config_lines = [
        line[len("config.") :]
        for line in text.splitlines()
        if line.startswith("config.")
    ]
    assert parse_config("\n".join(config_lines)) == cfg


def test_manifest_is_byte_reproducible(tmp_path):
    data = tmp_path / "x.csv"
    emit_csv(data, ("a",), [(1,)])
    first = tmp_path / "m1.txt"
    second = tmp_path / "m2.txt"
    write_manifest(first, "0.1.0", "simulate", ExperimentConfig(), [data])
    write_manifest(second, "0.1.0", "simulate", ExperimentConfig(), [data])
    assert first.read_bytes() == second.read_bytes()
    assert str(tmp_path) not in first.read_text()
