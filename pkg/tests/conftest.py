import pytest

from leakystage import ModelParams


@pytest.fixture
def figure_params() -> ModelParams:
    """Rates used by all illustrative runs; critical level 1/3."""
    return ModelParams(beta=0.6, mu=1.0, delta=1.8, rho=0.5)
