import pytest
from hypothesis import settings

from henon_fatou.dynamics import Params

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture
def p23():
    return Params(2, 3.0)


@pytest.fixture
def p33():
    return Params(3, 3.0)


@pytest.fixture
def p53():
    return Params(5, 3.0)


_ACCEPTANCE = []


@pytest.fixture
def acceptance_lines():
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
