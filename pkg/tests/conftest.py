import pytest

from cocliquelab.psl2 import psl2_enumerate

_groups = {}


def group(q):
    """Shared enumerated groups; building PSL(2,49) or PSL(2,53) takes seconds."""
    if q not in _groups:
        _groups[q] = psl2_enumerate(q)
    return _groups[q]


@pytest.fixture(scope="session")
def G5():
    return group(5)


@pytest.fixture(scope="session")
def G7():
    return group(7)


@pytest.fixture(scope="session")
def G9():
    return group(9)


@pytest.fixture(scope="session")
def G11():
    return group(11)


@pytest.fixture(scope="session")
def G13():
    return group(13)


@pytest.fixture(scope="session")
def G25():
    return group(25)
