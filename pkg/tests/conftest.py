import pytest

from scatmap import ModelParams


@pytest.fixture(scope="session")
def p06():
    """Single-map regime running example."""
    return ModelParams(a00=0.0, a10=0.6, a01=1.0, eps=0.01)


@pytest.fixture(scope="session")
def p09():
    """Tangency regime."""
    return ModelParams(a00=0.0, a10=0.9, a01=1.0, eps=0.01)


@pytest.fixture(scope="session")
def p15():
    """Holes regime."""
    return ModelParams(a00=0.0, a10=1.5, a01=1.0, eps=0.01)
