import pytest

from bouslp.spectral import Grid


@pytest.fixture
def grid64():
    return Grid(64)


@pytest.fixture
def grid32():
    return Grid(32)
