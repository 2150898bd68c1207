import numpy as np
import pytest

from utils.config import EngineSettings
from utils.lie_algebras import build_L41, build_T
from utils.polynomials import universe


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def settings():
    return EngineSettings()


@pytest.fixture
def uni4():
    return universe(4)


@pytest.fixture
def uni41():
    return universe(4, 1)


@pytest.fixture
def t4():
    return build_T(4)


@pytest.fixture
def l41_special():
    """L(4,1) con a14 = a23 = 0: tres invariantes"""
    return build_L41(1, 0, -1)
