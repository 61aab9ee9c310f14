import numpy as np
import pytest

from qreinhardt import PolynomialMap, WeightMatrix
from qreinhardt.verify import phi_k, phi_k_inverse


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def w12():
    return WeightMatrix.of([[1], [2]])


@pytest.fixture
def phi2():
    return phi_k(2)


@pytest.fixture
def phi2_inv():
    return phi_k_inverse(2)


@pytest.fixture
def ident2():
    return PolynomialMap.identity(2)
