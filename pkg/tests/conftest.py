import pytest

from uscmatch import load_fixture


@pytest.fixture
def example1():
    return load_fixture("example1.json").market


@pytest.fixture
def one_way():
    return load_fixture("one_way_pair.json").market


@pytest.fixture
def school_market():
    return load_fixture("school_sec4.json").market


@pytest.fixture
def sec5():
    return load_fixture("example_sec5.json")



def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    lines = test_acceptance.summary_lines()
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
