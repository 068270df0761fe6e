from dataclasses import replace

import pytest

from browning.orchard import SyntheticAppleSpec, generate_batch

# quarter-scale canvas with the default geometry, for fast unit tests
SMALL = replace(SyntheticAppleSpec(), image_size=(400, 300), fruit_axes=(155.0, 130.0))

ACCEPTANCE_SEED = 7

_acceptance_lines: list[str] = []


@pytest.fixture(scope="session")
def small_batch():
    return generate_batch(3, 3, 2024, base=SMALL)


@pytest.fixture(scope="session")
def acceptance_lines():
    return _acceptance_lines


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
