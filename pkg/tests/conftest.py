from fractions import Fraction

import pytest

from removal_lab.construct import odd_cycle_blowup_instance, rs_graph, theorem13_instance
from removal_lab.graph import cycle_graph

# Smallest scale with a usable digit cap for h = 5 is m = 17, so r = 15 * 17 = 255.
C5_EPSILON = Fraction(1, 50000)


@pytest.fixture(scope="session")
def small_rs():
    """Three layers over m = 5 with S = {1, 3}: 30 vertices, 10 triangles."""
    return rs_graph(3, "1/100")


@pytest.fixture(scope="session")
def c5_instance():
    return theorem13_instance(cycle_graph(5), C5_EPSILON, 255)


@pytest.fixture(scope="session")
def c5_blowup():
    return odd_cycle_blowup_instance(5, 25)
