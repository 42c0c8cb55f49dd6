from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from legal_deid.coref_eval import Partition
from legal_deid.person_names import Gazetteer
from legal_deid.pipeline import Resources
from legal_deid.resources import data_path
from legal_deid.segtok import AbbreviationLexicon


@pytest.fixture(scope="session")
def lex() -> AbbreviationLexicon:
    return AbbreviationLexicon.default()


@pytest.fixture(scope="session")
def gaz() -> Gazetteer:
    return Gazetteer.default()


@pytest.fixture(scope="session")
def resources() -> Resources:
    return Resources()


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return data_path("fixtures")


@pytest.fixture(scope="session")
def key_s() -> Partition:
    return Partition([["a1", "a2", "a3"], ["b1", "b2", "b3", "b4"]])


@pytest.fixture(scope="session")
def response_t() -> Partition:
    return Partition([["a1", "a2"], ["a3", "b1"], ["b3", "b4", "c1"]])


# -- one pass/fail line per acceptance criterion ---------------------------

_acceptance: dict[str, list[str]] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        name = report.nodeid.split("::")[-1]
        _acceptance.setdefault(name, []).append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcomes in sorted(_acceptance.items()):
        status = "PASS" if all(o == "passed" for o in outcomes) else "FAIL"
        terminalreporter.write_line(f"{status}  {name}")
