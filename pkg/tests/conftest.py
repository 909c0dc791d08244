import json
from pathlib import Path

import pytest

from qdp.cli_report import load_benchmark_config
from qdp.contracts import contract_from_dict
from qdp.market_model import GBMParams

DATA_DIR = Path(__file__).parent / "data"


def load_fixture(name: str) -> dict:
    with open(DATA_DIR / name, "r", encoding="utf-8") as fh:
        return json.load(fh)


@pytest.fixture(scope="session")
def autocall_fixture() -> dict:
    return load_fixture("autocall_fixture.json")


@pytest.fixture(scope="session")
def tarf_fixture() -> dict:
    return load_fixture("tarf_fixture.json")


@pytest.fixture(scope="session")
def autocall_config() -> dict:
    return load_benchmark_config("autocallable")


@pytest.fixture(scope="session")
def tarf_config() -> dict:
    return load_benchmark_config("tarf")


@pytest.fixture(scope="session")
def autocall_params(autocall_config) -> GBMParams:
    return GBMParams.from_dict(autocall_config["model"])


@pytest.fixture(scope="session")
def tarf_params(tarf_config) -> GBMParams:
    return GBMParams.from_dict(tarf_config["model"])


@pytest.fixture(scope="session")
def autocall_contract(autocall_config):
    return contract_from_dict(autocall_config["contract"])


@pytest.fixture(scope="session")
def tarf_contract(tarf_config):
    return contract_from_dict(tarf_config["contract"])
