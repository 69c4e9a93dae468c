import pytest

from bordcalc import builtin, g64_group


@pytest.fixture(scope="session")
def G64():
    return g64_group()


@pytest.fixture(scope="session")
def G243():
    from bordcalc import g243_group

    return g243_group()


def make(name):
    return builtin(name)
