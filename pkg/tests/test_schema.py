import numpy as np
import pytest

from resolventkit.maps import FirmlyNonexpansiveMap
from resolventkit.operators import check_firmly_nonexpansive
from resolventkit.schema import SchemaError, parse_function, parse_operator, parse_set


def test_box_with_open_side():
    C = parse_set({"kind": "box", "lo": [0, None], "hi": [1, 3]})
    assert np.array_equal(C.project([5.0, -100.0]), [1.0, -100.0])


def test_epigraph_by_name():
    C = parse_set({"kind": "epigraph", "f": "square"})
    assert np.allclose(C.project([0.0, -1.0]), [0.0, 0.0])
    with pytest.raises(SchemaError, match="unknown epigraph"):
        parse_set({"kind": "epigraph", "f": "log"})


def test_functions():
    assert parse_function({"kind": "quadratic", "a": 3, "b": [1]}).prox([5.0])[0] == pytest.approx(1.0)
    assert parse_function({"kind": "abs", "dim": 2}).dim == 2
    with pytest.raises(SchemaError):
        parse_function({"kind": "huber"})


def test_linear_must_be_fne():
    T = parse_operator({"kind": "linear", "matrix": [[0.5, 0], [0, 0.25]]})
    assert isinstance(T, FirmlyNonexpansiveMap)
    with pytest.raises(SchemaError, match="not firmly nonexpansive"):
        parse_operator({"kind": "linear", "matrix": [[0, -1], [1, 0]]})


def test_resolvent_of_rotation():
    T = parse_operator({"kind": "resolvent_of", "matrix": [[0, -1], [1, 0]]})
    assert np.allclose(T([1.0, 0.0]), [0.5, -0.5])


def test_nested_average_is_fne():
    T = parse_operator({
        "kind": "average", "weights": [0.25, 0.75],
        "members": [
            {"kind": "projection", "set": {"kind": "ball", "center": [0, 0], "radius": 2}},
            {"kind": "prox", "fn": {"kind": "indicator", "set": {"kind": "affine", "point": [0, 1], "basis": [[1, 0]]}}},
        ],
    })
    assert check_firmly_nonexpansive(T, [-5, -5], [5, 5], n_pairs=1000).passed


def test_compose_order():
    T = parse_operator({"kind": "compose", "members": [
        {"kind": "projection", "set": {"kind": "ball", "center": [0, 0], "radius": 1}},
        {"kind": "projection", "set": {"kind": "affine", "point": [0, 2], "basis": [[1, 0]]}},
    ]})
    assert np.allclose(T([0.0, -7.0]), [0.0, 1.0])


@pytest.mark.parametrize("bad", [
    {"kind": "projection"},
    {"kind": "warp"},
    [1, 2],
    {"kind": "average", "weights": [1.0], "members": [{"kind": "identity", "dim": 2}, {"kind": "identity", "dim": 2}]},
])
def test_bad_descriptors(bad):
    with pytest.raises(Exception):
        parse_operator(bad)
