import pytest

from fronttrack.models import Box, GasModel, LinearModel


@pytest.fixture(scope="session")
def gas():
    """Reference isentropic gas model on a comfortably subsonic box."""
    return GasModel(K=1.0, gamma=2.0, box=Box([0.5, -0.6], [1.5, 0.6]))


@pytest.fixture(scope="session")
def gas_slow():
    """Near-sonic working box: family 1 creeps left while family 2 crosses
    fast, so collisions happen well before fronts reach the boundary."""
    return GasModel(K=1.0, gamma=2.0, box=Box([0.95, 0.88], [1.10, 1.00]),
                    ref_state=[1.0, 0.98], min_speed=0.002)


@pytest.fixture(scope="session")
def diag_linear():
    return LinearModel([[-1.0, 0.0], [0.0, 1.0]])
