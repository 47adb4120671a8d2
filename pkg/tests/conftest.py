import json
from pathlib import Path

import pytest

from avanegar import CostConfig, load_default_inventory, tokenize_ipa

FIXTURES = Path(__file__).parent / "fixtures"

_acceptance_outcomes: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        _acceptance_outcomes[report.nodeid] = report.outcome


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, outcome in _acceptance_outcomes.items():
        label = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{label}  {nodeid.split('::')[-1]}")


@pytest.fixture(scope="session")
def inv():
    return load_default_inventory()


@pytest.fixture(scope="session")
def cfg():
    return CostConfig()


@pytest.fixture(scope="session")
def corpus_doc():
    with open(FIXTURES / "divan_sample.json", encoding="utf-8") as f:
        return json.load(f)


@pytest.fixture
def seq(inv):
    """Shorthand: seq('dɒːd') -> tokenized PhonemeSequence."""

    def make(text):
        return tokenize_ipa(text, inv)

    return make
