import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from resolventkit import convex_sets as cs
from resolventkit import prox as px
from resolventkit.averaging import (
    WeightedFamily,
    average_maps,
    matrix_resolvent_average,
    prox_of_proximal_average,
    resolvent_average,
)
from resolventkit.errors import DimensionError, ToolkitError
from resolventkit.operators import check_firmly_nonexpansive


def test_interval_average_values():
    T = average_maps(WeightedFamily.uniform(cs.interval(0, 1), cs.interval(2, 3)))
    assert T([5.0])[0] == pytest.approx(2.0)
    assert T([1.5])[0] == pytest.approx(1.5)


def test_weights_validated():
    with pytest.raises(ToolkitError, match="sum to"):
        WeightedFamily([cs.interval(0, 1), cs.interval(2, 3)], [0.5, 0.6])
    with pytest.raises(ToolkitError, match="positive"):
        WeightedFamily([cs.interval(0, 1), cs.interval(2, 3)], [1.5, -0.5])
    with pytest.raises(DimensionError):
        WeightedFamily.uniform(cs.interval(0, 1), cs.Ball([0.0, 0.0], 1.0))


def test_matrix_resolvent_average_zero_identity():
    R = matrix_resolvent_average([np.zeros((2, 2)), np.eye(2)], [0.5, 0.5])
    assert np.allclose(R, np.eye(2) / 3, atol=1e-12, rtol=0)


@given(st.floats(0, 50), st.floats(0, 50), st.floats(0.05, 0.95))
def test_matrix_resolvent_average_scalar_formula(a, b, lam):
    R = matrix_resolvent_average([[[a]], [[b]]], [lam, 1 - lam])
    want = 1 / (lam / (1 + a) + (1 - lam) / (1 + b)) - 1
    assert R[0, 0] == pytest.approx(want, rel=1e-10, abs=1e-12)


def test_matrix_resolvent_average_of_equal_matrices():
    A = np.array([[2.0, 1.0], [1.0, 3.0]])
    assert np.allclose(matrix_resolvent_average([A, A, A], [0.2, 0.3, 0.5]), A, atol=1e-12)


def test_matrix_resolvent_average_rejects_indefinite():
    with pytest.raises(ToolkitError, match="semidefinite"):
        matrix_resolvent_average([np.diag([1.0, -1.0]), np.eye(2)], [0.5, 0.5])
    with pytest.raises(ToolkitError, match="symmetric"):
        matrix_resolvent_average([np.array([[1.0, 1.0], [0.0, 1.0]]), np.eye(2)], [0.5, 0.5])


def test_resolvent_average_self():
    J = px.AbsSum(2).oracle()
    A = resolvent_average(WeightedFamily.uniform(J, J))
    X = np.random.default_rng(0).uniform(-5, 5, (100, 2))
    assert np.allclose(A.resolvent.many(X), J.many(X), atol=1e-12, rtol=0)


def test_proximal_average_of_quadratics():
    # prox of the proximal average of a/2|u|^2 and b/2|u|^2 is the average of the proxes
    fam = WeightedFamily([px.Quadratic(1.0, [0.0]), px.Quadratic(3.0, [0.0])], [0.5, 0.5])
    P = prox_of_proximal_average(fam)
    assert P([4.0])[0] == pytest.approx(0.5 * 2.0 + 0.5 * 1.0)


def test_mixed_average_is_fne():
    fam = WeightedFamily([cs.Epigraph(), px.AbsSum(2), cs.horizontal_line(1.0)], [0.2, 0.3, 0.5])
    assert check_firmly_nonexpansive(average_maps(fam), [-10, -10], [10, 10], n_pairs=3000).passed
