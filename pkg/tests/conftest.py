import pytest

from cohgen.spinsys import ModelSetup


@pytest.fixture(scope="session")
def setup_j1() -> ModelSetup:
    return ModelSetup.make(1.0)


@pytest.fixture(scope="session")
def setup_j32() -> ModelSetup:
    return ModelSetup.make(1.5)
