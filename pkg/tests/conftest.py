"""Shared fixtures: the heavy N=16 experiment runs are executed once per
session and reused by the feature tests and the acceptance suite."""

import numpy as np
import pytest

from grclock import experiments


@pytest.fixture(scope="session")
def fig3b_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("fig3b")
    cfg = experiments.preset_config("fig3b")
    res = experiments.run_sync(cfg, out)
    return {"cfg": cfg, "out": out, **res}


@pytest.fixture(scope="session")
def fig3c_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("fig3c")
    cfg = experiments.preset_config("fig3c")
    res = experiments.run_sync(cfg, out)
    return {"cfg": cfg, "out": out, **res}


@pytest.fixture(scope="session")
def fig4_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("fig4")
    cfg = experiments.preset_config("fig4")
    res = experiments.run_squeeze_scan(cfg, out)
    return {"cfg": cfg, "out": out, **res}


@pytest.fixture(scope="session")
def lindblad_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("lindblad")
    cfg = experiments.ExperimentConfig(
        kind="lindblad", n_atoms=8, dt_sample=np.pi / 50
    )
    res = experiments.run_lindblad(cfg, out)
    return {"cfg": cfg, "out": out, **res}
