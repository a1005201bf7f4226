from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

from contactsub.catalog import example

settings.register_profile(
    "repo",
    max_examples=30,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")

_CRITERIA: list = []


@pytest.fixture
def criterion():
    """Record one acceptance line; the terminal summary prints them all."""

    def record(number: int, ok: bool, detail: str) -> bool:
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        _CRITERIA.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERIA:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def hopf():
    return example("hopf_s3").submersion


@pytest.fixture(scope="session")
def warped():
    return example("warped_quadratic").submersion


@pytest.fixture(scope="session")
def product():
    return example("product_flat_r2").submersion


@pytest.fixture(scope="session")
def olszak():
    return example("olszak_exp").structure
