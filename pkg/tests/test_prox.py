import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from resolventkit import prox as px
from resolventkit.errors import ToolkitError

# the root of u + e^u = 0 (Omega constant, negated)
PROX_EXP_AT_ZERO = -0.567143290409783873


def test_quadratic_value():
    assert px.prox_quadratic(3.0, [1.0], [5.0])[0] == pytest.approx(1.0)


def test_quadratic_rejects_negative():
    with pytest.raises(ToolkitError):
        px.prox_quadratic(-1.0, [0.0], [1.0])


def test_soft_threshold():
    assert np.array_equal(px.prox_abs([3.0, -0.5, -2.0]), [2.0, 0.0, -1.0])


def test_exp_at_zero():
    assert px.ExpSum(1).prox([0.0])[0] == pytest.approx(PROX_EXP_AT_ZERO, abs=1e-14)


def test_linear_is_translation():
    assert np.allclose(px.Linear([1.0, -2.0]).prox([0.0, 0.0]), [-1.0, 2.0])


def test_indicator_is_projection():
    from resolventkit.convex_sets import Ball

    f = px.Indicator(Ball([0.0, 0.0], 1.0))
    assert np.allclose(f.prox([2.0, 0.0]), [1.0, 0.0])
    assert f.eval([2.0, 0.0]) == np.inf and f.eval([0.0, 0.0]) == 0.0


def test_smooth_1d_matches_closed_form():
    f = px.Smooth1D(lambda u: u * u, lambda u: 2 * u, lambda u: 2.0)
    assert f.prox([3.0])[0] == pytest.approx(1.0, abs=1e-14)


@given(st.floats(-40, 40))
def test_smooth_1d_optimality(x):
    f = px.Smooth1D(lambda u: np.log1p(np.exp(u)), lambda u: 1 / (1 + np.exp(-u)))
    u = px.prox_smooth_1d(f, x)
    assert abs(u + f.derivative(u) - x) <= 1e-11 * max(1, abs(x))


@given(st.floats(-40, 40), st.floats(-40, 40))
def test_moreau_decomposition_abs(x, y):
    # prox_f + prox_{f*} = Id with f* the indicator of [-1, 1]
    v = np.array([x, y])
    assert np.allclose(px.prox_abs(v) + np.clip(v, -1, 1), v, atol=1e-12)


def test_many_matches_single():
    X = np.random.default_rng(1).uniform(-10, 10, (100, 2))
    for f in [px.Quadratic(0.5, [1.0, 0.0]), px.AbsSum(2), px.ExpSum(2), px.Linear([1.0, 1.0])]:
        assert np.allclose(f.prox_many(X), np.array([f.prox(x) for x in X]), atol=1e-13)
