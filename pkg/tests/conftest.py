import pytest

from hilbert_k3.numkernel import PrecisionPolicy


@pytest.fixture(scope="session")
def policy():
    return PrecisionPolicy(128)


@pytest.fixture(scope="session")
def policy256():
    return PrecisionPolicy(256)
