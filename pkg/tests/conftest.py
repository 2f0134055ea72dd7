import mpmath
import pytest

mpmath.mp.dps = 40


@pytest.fixture(scope="session")
def mp():
    return mpmath
