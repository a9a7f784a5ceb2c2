import numpy as np
import pytest

from sipsdp.poly import Polynomial, Space

XY = Space(("x1", "x2"), ("y1", "y2"))


def example_two_p(space: Space = XY) -> Polynomial:
    x1, x2, y1, y2 = space.gens()
    return -x1**2 - 2 * y2 * x1 * x2 - y1 * x2**2 - x1 - x2


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
