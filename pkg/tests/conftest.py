from pathlib import Path

import pytest

from factorcast import parse_matrix

from _support import FIXTURES, GOLDEN  # noqa: F401  (re-exported for tests)


@pytest.fixture
def worked_example_path() -> Path:
    return FIXTURES / "worked_example.csv"


@pytest.fixture
def worked_example(worked_example_path):
    return parse_matrix(worked_example_path.read_text(encoding="utf-8"))
