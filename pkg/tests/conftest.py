"""Shared fixtures and the --runslow switch for desk-scale acceptance runs."""

import numpy as np
import pytest

from src.screening import Dataset
from src.spline import build_basis


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow acceptance tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


def make_varying_data(n=200, p=20, seed=0, noise=0.5):
    """Two active covariates: beta_0(w) = 2 + sin(2 pi w), beta_1(w) = 3 w."""
    rng = np.random.default_rng(seed)
    w = rng.uniform(size=n)
    x = rng.standard_normal((n, p))
    y = (2 + np.sin(2 * np.pi * w)) * x[:, 0] + 3 * w * x[:, 1] + noise * rng.standard_normal(n)
    return Dataset(y=y, w=w, x=x)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def varying_data():
    return make_varying_data()


@pytest.fixture
def varying_basis(varying_data):
    return build_basis(varying_data.w, num_basis=5)


@pytest.fixture
def demo_csv(tmp_path):
    """n=50, p=5 CSV where only x2 drives the response."""
    rng = np.random.default_rng(7)
    n = 50
    w = rng.uniform(size=n)
    x = rng.standard_normal((n, 5))
    y = 4.0 * (1 + w) * x[:, 2] + 0.3 * rng.standard_normal(n)
    path = tmp_path / "demo.csv"
    Dataset(y=y, w=w, x=x, names=[f"x{j}" for j in range(5)]).to_frame().to_csv(path, index=False)
    return path
