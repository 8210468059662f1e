from pathlib import Path

import pytest

from vunify.theoryparse import load_module, parse_problem, parse_term

DATA = Path(__file__).resolve().parents[1] / "src" / "vunify" / "data"


def load(name):
    return load_module(DATA / name)


@pytest.fixture(scope="session")
def xor():
    return load("exclusive_or.maude")


@pytest.fixture(scope="session")
def dh():
    return load("dh_cfvp.maude")


@pytest.fixture(scope="session")
def fg():
    return load("fastvscr.maude")


@pytest.fixture(scope="session")
def xc():
    """Exclusive-or plus the free constructors used by the benchmark suite."""
    return load("xor_ctor.maude")


def term(theory, text):
    return parse_term(text, theory.sig, theory.vars)


def pair(theory, text):
    return parse_problem(text, theory).as_pair()


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
