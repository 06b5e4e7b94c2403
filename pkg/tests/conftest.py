from pathlib import Path

import numpy as np
import pytest

from liegeom import scene
from liegeom.assembly import build

FIXTURES = Path(__file__).parent / "fixtures"


def fixture_path(name: str) -> Path:
    return FIXTURES / f"{name}.json"


def load_graph(name: str):
    return scene.load(fixture_path(name)).to_graph()


@pytest.fixture(scope="session")
def double_graph():
    return load_graph("figure_eight_double")


@pytest.fixture(scope="session")
def double_structure(double_graph):
    return build(double_graph)


@pytest.fixture(scope="session")
def klein_graph():
    return load_graph("figure_eight_klein")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance criteria record their verdicts here; printed at the end of the run
ACCEPTANCE_RESULTS: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(ACCEPTANCE_RESULTS[number])
