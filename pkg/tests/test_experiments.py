"""Experiment driver and CLI: config round-trips, deterministic outputs,
manifest integrity, and exit codes."""

import csv
import hashlib
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from grclock import experiments


def run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "grclock.cli", *args],
        capture_output=True,
        text=True,
    )


# ---------------------------------------------------------------------------
# config handling

def test_config_json_roundtrip():
    cfg = experiments.ExperimentConfig(kind="sync", n_atoms=8, omega_split_over_njperp=1.5)
    again = experiments.ExperimentConfig.from_json(cfg.to_json())
    assert again == cfg


def test_config_defaults():
    cfg = experiments.ExperimentConfig(kind="sync", n_atoms=10)
    assert cfg.j_perp == pytest.approx(0.1)
    assert cfg.j_z == cfg.j_perp
    assert cfg.nj_perp == pytest.approx(1.0)


def test_config_rejects_unknown_fields():
    with pytest.raises(experiments.ConfigError):
        experiments.ExperimentConfig.from_json('{"kind": "sync", "bogus": 1}')
    with pytest.raises(experiments.ConfigError):
        experiments.ExperimentConfig.from_json('{"n_atoms": 8}')


def test_config_rejects_unknown_kind():
    with pytest.raises(experiments.ConfigError):
        experiments.ExperimentConfig(kind="nope")
    with pytest.raises(experiments.ConfigError):
        experiments.preset_config("nope")


def test_runner_kind_mismatch(tmp_path):
    cfg = experiments.ExperimentConfig(kind="sync")
    with pytest.raises(experiments.ConfigError):
        experiments.run_gr_budget(cfg, tmp_path)


def test_propagator_grid_honors_unwrapping():
    for preset in ("fig3b", "fig3c"):
        cfg = experiments.preset_config(preset)
        prop = cfg.propagator()
        omega_split = cfg.omega_split_over_njperp * cfg.nj_perp
        # max per-site frequency is omega_split/2 (centered chain ends)
        assert (omega_split / 2) * prop.dt_sample < np.pi / 2


# ---------------------------------------------------------------------------
# cheap experiment runs

def test_gr_budget_run_and_determinism(tmp_path):
    cfg = experiments.ExperimentConfig(kind="gr-budget")
    out1, out2 = tmp_path / "a", tmp_path / "b"
    experiments.run_gr_budget(cfg, out1)
    experiments.run_gr_budget(cfg, out2)
    for name in ("budget.csv", "budget.txt"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
    rows = list(csv.DictReader((out1 / "budget.csv").open()))
    terms = {r["term"] for r in rows}
    assert {"grs_per_site", "sds", "p4_kinetic", "phi_squared", "p_phi_p"} <= terms


def test_dressing_scan_run(tmp_path):
    cfg = experiments.ExperimentConfig(kind="dressing-scan")
    res = experiments.run_dressing_scan(cfg, tmp_path)
    assert res["heisenberg_point"] == pytest.approx(0.2581988897, abs=1e-8)
    md = list(csv.DictReader((tmp_path / "massdefect.csv").open()))
    vals = [float(r["mass_defect_fraction"]) for r in md]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    hp = json.loads((tmp_path / "heisenberg.json").read_text())
    assert hp["delta_over_omega"] == pytest.approx(res["heisenberg_point"])


def test_manifest_checksums(tmp_path):
    cfg = experiments.ExperimentConfig(kind="gr-budget")
    experiments.run_gr_budget(cfg, tmp_path)
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    for name, digest in manifest["files"].items():
        assert hashlib.sha256((tmp_path / name).read_bytes()).hexdigest() == digest
    assert manifest["config_sha256"] == hashlib.sha256(cfg.to_json().encode()).hexdigest()


def test_csv_17_significant_digits(tmp_path):
    cfg = experiments.ExperimentConfig(kind="dressing-scan")
    experiments.run_dressing_scan(cfg, tmp_path)
    rows = list(csv.DictReader((tmp_path / "couplings.csv").open()))
    val = rows[3]["jperp_over_chi"]
    # round-trip through float is exact at 17 significant digits
    assert format(float(val), ".17g") == val


def test_lindblad_size_guard(tmp_path):
    cfg = experiments.ExperimentConfig(kind="lindblad", n_atoms=12)
    with pytest.raises(experiments.ConfigError):
        experiments.run_lindblad(cfg, tmp_path)


# ---------------------------------------------------------------------------
# CLI

def test_cli_gr_budget_success(tmp_path):
    out = tmp_path / "run"
    proc = run_cli("gr-budget", "--out", str(out))
    assert proc.returncode == 0, proc.stderr
    assert (out / "budget.csv").exists()


def test_cli_config_file(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(experiments.ExperimentConfig(kind="dressing-scan").to_json())
    out = tmp_path / "run"
    proc = run_cli("dressing-scan", "--config", str(cfg_path), "--out", str(out))
    assert proc.returncode == 0, proc.stderr
    assert (out / "massdefect.csv").exists()


def test_cli_validation_errors(tmp_path):
    out = str(tmp_path / "run")
    # malformed config file
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": "sync", "bogus": 1}')
    assert run_cli("sync", "--config", str(bad), "--out", out).returncode == 2
    # missing config file
    assert run_cli("sync", "--config", str(tmp_path / "none.json"), "--out", out).returncode == 2
    # preset belonging to another subcommand
    assert run_cli("sync", "--preset", "fig4", "--out", out).returncode == 2
    # kind mismatch between config and verb
    good = tmp_path / "good.json"
    good.write_text(experiments.ExperimentConfig(kind="gr-budget").to_json())
    assert run_cli("sync", "--config", str(good), "--out", out).returncode == 2
    # oversized lindblad run
    big = tmp_path / "big.json"
    big.write_text(experiments.ExperimentConfig(kind="lindblad", n_atoms=12).to_json())
    assert run_cli("lindblad", "--config", str(big), "--out", out).returncode == 2


def test_cli_unknown_verb():
    proc = run_cli("frobnicate", "--out", "/tmp/x")
    assert proc.returncode != 0


def test_cli_determinism(tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert run_cli("dressing-scan", "--out", str(out1)).returncode == 0
    assert run_cli("dressing-scan", "--out", str(out2)).returncode == 0
    for name in ("massdefect.csv", "couplings.csv", "heisenberg.json"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
