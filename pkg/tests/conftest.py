from importlib import resources
from pathlib import Path

import pytest

from gearkin.mechanism import load_mechanism_file

DATA = Path(str(resources.files("gearkin") / "data"))
GOLDEN = Path(__file__).parent / "golden"

GRM_SAMPLE = dict(zip(
    ("d1", "d2", "d3", "d4", "d5", "d6", "d7p", "d7pp", "A1", "A2", "A3", "B1", "B2"),
    (2, 3, 4, 5, 6, 7, 8, 9, 30, 40, 50, 20, 10),
))


@pytest.fixture(scope="session")
def grm():
    return load_mechanism_file(DATA / "grm.json")


@pytest.fixture(scope="session")
def minimal():
    return load_mechanism_file(DATA / "minimal.json")


@pytest.fixture(scope="session")
def two_stage():
    return load_mechanism_file(DATA / "two_stage.json")
