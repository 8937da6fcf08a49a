import numpy as np
import pytest

from qcwb.fixtures import get_fixture
from qcwb.spectrum import sector_eigenvalues


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def fixture_2e2o():
    return get_fixture("2e2o")


@pytest.fixture(scope="session")
def fixture_6e4o():
    return get_fixture("6e4o")


@pytest.fixture(scope="session")
def fixture_10e6o():
    return get_fixture("10e6o")


@pytest.fixture(scope="session")
def ground_energies():
    """Oracle ground energies in each fixture's electron-number sector."""
    out = {}
    for name in ("2e2o", "6e4o", "10e6o"):
        f = get_fixture(name)
        out[name] = float(sector_eigenvalues(f.hamiltonian(), f.n_electrons)[0])
    return out
