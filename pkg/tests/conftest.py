import random

import pytest

from qfactor.pointgeom import PointSet, ProjectivePoint
from qfactor.scalar import FieldSpec


@pytest.fixture(scope="session")
def QQ():
    return FieldSpec.rational()


@pytest.fixture(scope="session")
def F101():
    return FieldSpec.prime(101)


def make_points(field, coords):
    return PointSet([ProjectivePoint([field.coerce(c) for c in row], field)
                     for row in coords])


@pytest.fixture(scope="session")
def burkhardt_example():
    from qfactor import models

    return models.burkhardt(31)


@pytest.fixture(scope="session")
def plane_family_n3():
    from qfactor import models

    return models.plane_family(3)


@pytest.fixture
def rng():
    return random.Random(0xB4)
