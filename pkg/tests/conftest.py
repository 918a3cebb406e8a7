from pathlib import Path

import pytest

from cdg_workbench.cdg_algebra import ground_ring, graded_field_model, upper_triangular
from cdg_workbench.exact_linear import DEFAULT_FIELD, RationalField
from cdg_workbench.workbench_cli import load

CONFIG_DIR = Path(__file__).resolve().parent.parent / "config"


@pytest.fixture
def fld():
    return DEFAULT_FIELD


@pytest.fixture
def qq():
    return RationalField()


@pytest.fixture
def r1(fld):
    return ground_ring(fld, 1)


@pytest.fixture
def gf(fld):
    """The graded-field model: A = k in Z/2 mode with curvature t."""
    return graded_field_model(fld, 1)


@pytest.fixture
def triangular(fld):
    return upper_triangular(fld, 1)


@pytest.fixture
def config_dir():
    return CONFIG_DIR


@pytest.fixture
def n_module():
    """N = 0 → k → R_1 → k → 0."""
    return load(str(CONFIG_DIR / "modules" / "n_example.json"))


@pytest.fixture
def periodic_module():
    """⋯ → R_1 → R_1 → ⋯ with d = t, Z/2-graded."""
    return load(str(CONFIG_DIR / "modules" / "periodic.json"))


def pytest_collection_modifyitems(config, items):
    """
    Deselect integration tests by default unless -m integration is used.
    """
    if config.getoption("-m") is None or "integration" not in config.getoption("-m"):
        skip_integration = pytest.mark.skip(
            reason="integration tests skipped by default. Use '-m integration' to run."
        )
        for item in items:
            if "integration" in item.keywords:
                item.add_marker(skip_integration)
