import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from resolventkit.errors import RootFindingError
from resolventkit.rootfind import expand_bracket, safeguarded_newton, solve_increasing


def test_cubic_root():
    r = solve_increasing(lambda x: x**3 + x - 2, lambda x: 3 * x * x + 1, 10.0)
    assert r == pytest.approx(1.0, abs=1e-12)


def test_bracket_walks_downhill():
    lo, hi = expand_bracket(lambda x: x - 100.0, 0.0)
    assert lo <= 100.0 <= hi


def test_bracket_gives_up_on_constant():
    with pytest.raises(RootFindingError, match="no sign change"):
        expand_bracket(lambda x: 1.0, 0.0, max_expand=10)


def test_newton_bad_derivative_falls_back_to_bisection():
    # derivative deliberately wrong; bisection must still find the root
    r = safeguarded_newton(lambda x: x - 0.3, lambda x: 1e-9, 0.0, 1.0)
    assert r == pytest.approx(0.3, abs=1e-12)


def test_collapsed_bracket():
    assert safeguarded_newton(lambda x: x, lambda x: 1.0, 2.0, 2.0) == 2.0


@given(st.floats(-50, 50), st.floats(0.1, 5))
def test_shifted_exponential(c, k):
    g = lambda x: k * x + math.exp(x / 10) - c
    r = solve_increasing(g, lambda x: k + math.exp(x / 10) / 10, 0.0)
    assert abs(g(r)) <= 1e-9 * max(1, abs(c))
