import pytest

import helpers


@pytest.fixture
def example1():
    return helpers.load_system("example1")


@pytest.fixture
def boost():
    return helpers.load_system("boost")


@pytest.fixture
def chain10():
    return helpers.load_system("chain10")
