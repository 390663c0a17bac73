import sys
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from maxvar.core import DiscreteFunction, StepFunction


def small_rationals(max_num: int = 4, max_den: int = 4):
    return st.builds(Fraction,
                     st.integers(min_value=0, max_value=max_num),
                     st.integers(min_value=1, max_value=max_den))


@st.composite
def discrete_functions(draw, max_len: int = 7, max_num: int = 3, max_den: int = 2,
                       with_tails: bool = False):
    length = draw(st.integers(min_value=1, max_value=max_len))
    values = tuple(draw(small_rationals(max_num, max_den)) for _ in range(length))
    start = draw(st.integers(min_value=-4, max_value=4))
    if with_tails:
        left = draw(small_rationals(2, 2))
        right = draw(small_rationals(2, 2))
        return DiscreteFunction(start, values, left, right)
    return DiscreteFunction(start, values)


@st.composite
def step_functions(draw, max_pieces: int = 5, max_num: int = 4, max_den: int = 3):
    m = draw(st.integers(min_value=2, max_value=max_pieces + 1))
    raw = draw(st.lists(
        st.builds(Fraction, st.integers(min_value=-10, max_value=10),
                  st.integers(min_value=1, max_value=3)),
        min_size=m, max_size=m, unique=True))
    breakpoints = tuple(sorted(raw))
    pieces = tuple(draw(small_rationals(max_num, max_den)) for _ in range(m - 1))
    return StepFunction(breakpoints, pieces)


@pytest.fixture
def chi_0_4():
    """Indicator of the two-point set {0, 4}."""
    one, zero = Fraction(1), Fraction(0)
    return DiscreteFunction(0, (one, zero, zero, zero, one))


@pytest.fixture
def delta_0():
    return DiscreteFunction(0, (Fraction(1),))
