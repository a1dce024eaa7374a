"""Shared fixtures."""
from fractions import Fraction

import pytest

from submeasure_lab.conclab import Scenario
from submeasure_lab.submeasure import example_easy, make_measure


@pytest.fixture
def half_atoms():
    """Six atoms of mass 1/2."""
    return make_measure([Fraction(1, 2)] * 6)


@pytest.fixture
def quarter_atoms():
    """Twelve atoms of mass 1/4."""
    return make_measure([Fraction(1, 4)] * 12)


@pytest.fixture
def easy_depth_two():
    """The level-block construction cut at depth 2."""
    return example_easy(2)


@pytest.fixture
def cube_scenario():
    """{0,1}^4, uniform, normalized Hamming."""
    return Scenario(alphabet_sizes=[2, 2, 2, 2])
