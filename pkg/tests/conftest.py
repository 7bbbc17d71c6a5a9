from __future__ import annotations

import pytest

from kbreconcile.cli import corpus_path
from kbreconcile.logic import load_kb
from kbreconcile.planning import parse_problem

ACCEPTANCE_LINES: list[str] = []


def load_problem(name):
    with open(corpus_path(name), encoding="utf-8") as fh:
        return parse_problem(fh.read())


@pytest.fixture(scope="session")
def corpus():
    return {
        name: load_kb(corpus_path(f"{name}.json"))
        for name in (
            "p1_kb_a",
            "p1_kb_h",
            "p1_epsilon",
            "p2_kb_a",
            "p2_kb_h",
            "p2_epsilon",
            "p2_kb_h_updated",
            "example1_kb",
            "inconsistent_kb",
        )
    }


@pytest.fixture(scope="session")
def problem1():
    return load_problem("problem1.json")


@pytest.fixture(scope="session")
def problem2():
    return load_problem("problem2.json")


@pytest.fixture
def report():
    def record(criterion: str, ok: bool, detail: str = ""):
        ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {criterion}" + (f"  ({detail})" if detail else ""))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
