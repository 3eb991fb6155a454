from __future__ import annotations

import random

import pytest
from hypothesis import settings

from gerbejlo.checks import Plan
from gerbejlo.gerbe import GerbeScenario
from gerbejlo.scenario import builtin_scenario

settings.register_profile("default", max_examples=60, deadline=None, derandomize=True)
settings.load_profile("default")

_ACCEPTANCE: list[str] = []


def record_acceptance(criterion: int, ok: bool, detail: str) -> None:
    """Print and remember one pass/fail line for an acceptance criterion."""
    line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'} - {detail}"
    print(line)
    _ACCEPTANCE.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):  # noqa: ARG001
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def s1() -> GerbeScenario:
    return builtin_scenario("s1").build()


@pytest.fixture(scope="session")
def s2() -> GerbeScenario:
    return builtin_scenario("s2").build()


@pytest.fixture(scope="session")
def sz() -> GerbeScenario:
    return builtin_scenario("sz").build()


@pytest.fixture(scope="session")
def trivial() -> GerbeScenario:
    return builtin_scenario("trivial").build()


@pytest.fixture(scope="session")
def plan() -> Plan:
    return Plan(seed=0)


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240917)
