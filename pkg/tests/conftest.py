import pytest

from hql.field import context_for_q


@pytest.fixture(scope="session")
def ctx2():
    return context_for_q(2)


@pytest.fixture(scope="session")
def ctx4():
    return context_for_q(4)


@pytest.fixture(scope="session")
def ctx8():
    return context_for_q(8)
