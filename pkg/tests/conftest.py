import math

import numpy as np
import pytest

from bclab import factory
from bclab.profile import integrate_profile

# a profile with psi0 != phi0, so grad s1 does not vanish
GENERIC_INITIAL = (1.0, 1.3, math.pi / 4)
DEFAULT_INITIAL = (1.0, 1.0, math.pi / 4)


@pytest.fixture(scope="session")
def rot_curve():
    return integrate_profile("rotational", 2, 2, GENERIC_INITIAL, 0.5, 1e-10)


@pytest.fixture(scope="session")
def cone_curve():
    return integrate_profile("rotational", 2, 2, DEFAULT_INITIAL, 0.5, 1e-10)


@pytest.fixture(scope="session")
def cyl_curve():
    return integrate_profile("cylinder", 2, 2, DEFAULT_INITIAL, 0.5, 1e-10)


@pytest.fixture(scope="session")
def rot_surface(rot_curve):
    return factory.generalized_rotational(rot_curve, 2, 2)


@pytest.fixture(scope="session")
def cone_surface(cone_curve):
    return factory.generalized_rotational(cone_curve, 2, 2)


@pytest.fixture(scope="session")
def cyl_surface(cyl_curve):
    return factory.generalized_cylinder(cyl_curve, 2, 2)


@pytest.fixture(scope="session")
def rot_q1_surface():
    curve = integrate_profile("rotational", 2, 1, GENERIC_INITIAL, 0.5, 1e-10)
    return factory.generalized_rotational(curve, 2, 1)


@pytest.fixture(scope="session")
def cyl_q1_surface():
    curve = integrate_profile("cylinder", 2, 1, DEFAULT_INITIAL, 0.5, 1e-10)
    return factory.generalized_cylinder(curve, 2, 1)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
