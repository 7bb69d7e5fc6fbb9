from __future__ import annotations

import json
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from spectra_lab.rational_map import parse_normalize

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

FIXTURE_COEFFS = {
    "z2+1": ([1, 0, 1], [1]),
    "z2-1": ([-1, 0, 1], [1]),
    "z2": ([0, 0, 1], [1]),
    "z2-2": ([-2, 0, 1], [1]),
    "lattes": ([1, 0, 2, 0, 1], [0, -4, 0, 4]),
    "wandering": ([2, 1, 1], [0, 3]),  # (z^2 + z + 2) / 3z, critical points +-sqrt(2)
}
FIXTURES = {name: parse_normalize(*c) for name, c in FIXTURE_COEFFS.items()}
EXCEPTIONAL = ("z2", "z2-2", "lattes")


@pytest.fixture(scope="session")
def frozen():
    return json.loads((Path(__file__).parent / "oracles" / "frozen.json").read_text())


@pytest.fixture(params=sorted(FIXTURES))
def fixture_map(request):
    return request.param, FIXTURES[request.param]


ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
