import numpy as np
import pytest

from psiepistemic.constants import PhysicsConstants


@pytest.fixture(scope="session")
def consts():
    return PhysicsConstants()


@pytest.fixture(scope="session")
def massless(consts):
    """Defaults with every lepton massless."""
    c = consts
    for ell in ("e", "mu", "tau"):
        c = c.with_lepton_mass(ell, 0.0)
    return c


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
