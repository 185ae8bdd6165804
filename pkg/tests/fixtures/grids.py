import json
from pathlib import Path

import pytest

from qillum.oracle.verify import OracleConfig

input_path = Path(__file__).parent.parent / "input_files"


def load_input(name: str) -> dict | list:
    with open(input_path / name, "r") as f:
        return json.load(f)


@pytest.fixture
def small_grid_path() -> str:
    return str(input_path / "small_grid.json")


@pytest.fixture
def truncation_grid_path() -> str:
    return str(input_path / "truncation_grid.json")


@pytest.fixture
def empty_grid_path() -> str:
    return str(input_path / "empty_grid.json")


@pytest.fixture
def small_grid() -> list[OracleConfig]:
    items = load_input("small_grid.json")
    return [OracleConfig.from_dict(item) for item in items]


@pytest.fixture
def preset_headers() -> dict[str, list[str]]:
    return load_input("preset_headers.json")
