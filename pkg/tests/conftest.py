import math

import numpy as np
import pytest

from altbound.linalg import NormKind, as_matrix
from altbound.system import AlternatingSystem, Orientation


@pytest.fixture
def squeeze():
    return as_matrix([[0.5, 0.0], [0.0, 2.0]])


@pytest.fixture
def rotation_m30():
    s3 = math.sqrt(3.0) / 2.0
    return as_matrix([[s3, 0.5], [-0.5, s3]])


def make_system(a_set, b_set, norm=NormKind.MAX_ROW, orientation=Orientation.RIGHT):
    a_set = tuple(as_matrix(m) for m in a_set)
    b_set = tuple(as_matrix(m) for m in b_set)
    n, m = a_set[0].shape
    return AlternatingSystem(
        n_dim=n, m_dim=m, a_set=a_set, b_set=b_set, norm=norm, orientation=orientation
    )


def random_small_system(rng, size=2):
    """A 2x2 system with two distinct A's and B's, entries in {0, +-0.5, +-1}."""
    choices = np.array([-1.0, -0.5, 0.0, 0.5, 1.0])

    def draw_pair():
        while True:
            first = rng.choice(choices, size=(size, size))
            second = rng.choice(choices, size=(size, size))
            if not np.array_equal(first, second):
                return first, second

    a_set = draw_pair()
    b_set = draw_pair()
    return make_system(a_set, b_set)


@pytest.fixture
def identity_system():
    return make_system([np.eye(2)], [np.eye(2)])
