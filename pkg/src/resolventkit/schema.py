"""JSON descriptors for sets, functions and operators.

Sets::

    {"kind": "box", "lo": [0, null], "hi": [1, 3]}          # null = unbounded
    {"kind": "ball", "center": [0, 0], "radius": 1}
    {"kind": "affine", "point": [0, 2], "basis": [[1, 0]]}
    {"kind": "epigraph", "f": "exp"}                         # "exp" | "square"

Functions::

    {"kind": "quadratic", "a": 1, "b": [0]}
    {"kind": "abs", "dim": 2}
    {"kind": "exp", "dim": 1}
    {"kind": "linear", "c": [1]}
    {"kind": "indicator", "set": {...}}

Operators (each evaluates to a map; monotone operators are given by their
resolvent)::

    {"kind": "linear", "matrix": [[..]]}      # x -> Mx, must be firmly nonexpansive
    {"kind": "resolvent_of", "matrix": [[..]]} # (I + M)^{-1} for monotone M
    {"kind": "projection", "set": {...}}
    {"kind": "prox", "fn": {...}}
    {"kind": "translation", "v": [..]}
    {"kind": "identity", "dim": 2}
    {"kind": "average", "weights": [..], "members": [...]}
    {"kind": "compose", "members": [...]}     # nonexpansive only
"""
import numpy as np

from . import convex_sets as cs
from . import prox as px
from .averaging import WeightedFamily, average_maps
from .errors import ToolkitError
from .maps import FirmlyNonexpansiveMap, compose, identity, linear_map, projection, translation
from .operators import LinearMonotoneOperator


class SchemaError(ToolkitError):
    pass


def _need(d, *keys):
    if not isinstance(d, dict):
        raise SchemaError(f"descriptor must be an object, got {d!r}")
    missing = [k for k in keys if k not in d]
    if missing:
        raise SchemaError(f"{d.get('kind', '?')} descriptor is missing {', '.join(missing)}")


def _bound(values, inf):
    return [inf if v is None else float(v) for v in values]


def parse_set(d):
    _need(d, "kind")
    kind = d["kind"]
    if kind == "box":
        _need(d, "lo", "hi")
        return cs.Box(_bound(d["lo"], -np.inf), _bound(d["hi"], np.inf))
    if kind == "ball":
        _need(d, "center")
        return cs.Ball(d["center"], float(d.get("radius", 1.0)))
    if kind == "affine":
        _need(d, "point")
        return cs.AffineSet(d["point"], d.get("basis", []))
    if kind == "epigraph":
        name = d.get("f", "exp")
        if name not in cs.EPIGRAPH_FUNCTIONS:
            raise SchemaError(f"unknown epigraph function {name!r}; choose from {sorted(cs.EPIGRAPH_FUNCTIONS)}")
        return cs.Epigraph(cs.EPIGRAPH_FUNCTIONS[name])
    raise SchemaError(f"unknown set kind {kind!r}")


def parse_function(d):
    _need(d, "kind")
    kind = d["kind"]
    if kind == "quadratic":
        _need(d, "b")
        return px.Quadratic(float(d.get("a", 0.0)), d["b"])
    if kind == "abs":
        return px.AbsSum(int(d.get("dim", 1)))
    if kind == "exp":
        return px.ExpSum(int(d.get("dim", 1)))
    if kind == "linear":
        _need(d, "c")
        return px.Linear(d["c"])
    if kind == "indicator":
        _need(d, "set")
        return px.Indicator(parse_set(d["set"]))
    raise SchemaError(f"unknown function kind {kind!r}")


def parse_operator(d):
    _need(d, "kind")
    kind = d["kind"]
    if kind == "linear":
        _need(d, "matrix")
        M = np.atleast_2d(np.asarray(d["matrix"], dtype=float))
        # <x, Mx> >= ||Mx||^2 for all x  <=>  sym(M) - M^T M is PSD
        S = 0.5 * (M + M.T) - M.T @ M
        if np.linalg.eigvalsh(S).min() < -1e-10:
            raise SchemaError("linear map is not firmly nonexpansive; use resolvent_of for a monotone matrix")
        T = linear_map(M)
        return FirmlyNonexpansiveMap(T.apply, T.dim, T.descriptor, batch=T.batch)
    if kind == "resolvent_of":
        _need(d, "matrix")
        return LinearMonotoneOperator(d["matrix"]).resolvent()
    if kind == "projection":
        _need(d, "set")
        return projection(parse_set(d["set"]))
    if kind == "prox":
        _need(d, "fn")
        return parse_function(d["fn"]).oracle()
    if kind == "translation":
        _need(d, "v")
        return translation(d["v"])
    if kind == "identity":
        return identity(int(d.get("dim", 1)))
    if kind == "average":
        _need(d, "weights", "members")
        return average_maps(WeightedFamily([parse_operator(m) for m in d["members"]], d["weights"]))
    if kind == "compose":
        _need(d, "members")
        return compose(*[parse_operator(m) for m in d["members"]])
    raise SchemaError(f"unknown operator kind {kind!r}")
