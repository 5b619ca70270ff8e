import json

import pytest
from click.testing import CliRunner

import radialdpp
from radialdpp.lib.ensembles import Ensemble
from radialdpp.lib.funcs import TestFunction


@pytest.fixture
def runner() -> CliRunner:
    """Fixture for invoking command-line interfaces."""
    return CliRunner()


@pytest.fixture(autouse=True)
def isolated_config(tmp_path, monkeypatch):
    """Point the user config file at an empty temporary location."""
    path = tmp_path / "config" / "radialdpp.yaml"
    monkeypatch.setattr(radialdpp, "CONFIG_PATH", str(path))
    for env in (radialdpp.THREADS_ENV, radialdpp.SEED_ENV, radialdpp.EPS_TRUNC_ENV):
        monkeypatch.delenv(env, raising=False)
    return path


@pytest.fixture
def ginibre():
    return Ensemble.ginibre()


@pytest.fixture
def hyperbolic():
    return Ensemble.hyperbolic(1.0)


@pytest.fixture
def unit_indicator():
    return TestFunction.indicator(0.0, 1.0)


@pytest.fixture
def write_function(tmp_path):
    """Write a test function to a JSON file and return its path."""

    def write(f: TestFunction, name: str = "f.json") -> str:
        path = tmp_path / name
        path.write_text(json.dumps(f.to_dict()))
        return str(path)

    return write
