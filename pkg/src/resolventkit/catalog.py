"""The built-in operators, grouped the way the checks iterate over them.

Every entry is ``name -> (map, lo, hi)`` with a sampling box for the probes.
"""
import numpy as np

from . import convex_sets as cs
from . import prox as px
from .averaging import WeightedFamily, average_maps, prox_of_proximal_average
from .maps import identity, projection, translation
from .operators import LinearMonotoneOperator

RADIUS = 10.0


def _box(d, r=RADIUS):
    return -r * np.ones(d), r * np.ones(d)


def projections():
    sets = {
        "box": cs.Box([0.0, -1.0], [1.0, 2.0]),
        "half_box": cs.Box([0.0, -np.inf], [np.inf, 1.0]),
        "interval": cs.interval(0.0, 1.0),
        "ball": cs.Ball([0.5, -0.5], 1.5),
        "ball_3d": cs.Ball([0.0, 0.0, 0.0], 1.0),
        "line": cs.horizontal_line(0.0),
        "plane_3d": cs.AffineSet([0.0, 0.0, 1.0], [[1.0, 0.0, 0.0], [0.0, 0.6, 0.8]]),
        "epi_exp": cs.Epigraph(cs.EXP),
        "epi_square": cs.Epigraph(cs.SQUARE),
    }
    return {f"P[{k}]": (projection(C), *_box(C.dim)) for k, C in sets.items()}


def prox_oracles():
    fns = {
        "quadratic": px.Quadratic(2.0, [1.0, -1.0]),
        "zero": px.zero_function(2),
        "abs": px.AbsSum(2),
        "exp": px.ExpSum(2),
        "linear": px.Linear([1.0, -0.5]),
        "indicator_ball": px.Indicator(cs.Ball([0.0, 0.0], 2.0)),
        "smooth_1d": px.Smooth1D(lambda u: np.log1p(np.exp(u)), lambda u: 1.0 / (1.0 + np.exp(-u)), name="softplus"),
    }
    out = {f"prox[{k}]": (f.oracle(), *_box(f.dim)) for k, f in fns.items()}
    rot = LinearMonotoneOperator([[1.0, 1.0], [-1.0, 1.0]])
    out["resolvent[rotation+I]"] = (rot.resolvent(), *_box(2))
    out["identity"] = (identity(2), *_box(2))
    out["translation"] = (translation([1.0, -2.0]), *_box(2))
    return out


def averages():
    P = {k: v[0] for k, v in projections().items()}
    F = {k: v[0] for k, v in prox_oracles().items()}
    fams = {
        "intervals": WeightedFamily.uniform(cs.interval(0.0, 1.0), cs.interval(2.0, 3.0)),
        "ball+line": WeightedFamily.uniform(P["P[ball]"], P["P[line]"]),
        "kool": WeightedFamily.uniform(P["P[line]"], P["P[epi_exp]"]),
        "mixed": WeightedFamily(
            [P["P[box]"], F["prox[abs]"], F["resolvent[rotation+I]"]], [0.2, 0.5, 0.3]
        ),
    }
    out = {f"avg[{k}]": (average_maps(f), *_box(f.dim)) for k, f in fams.items()}
    fam = WeightedFamily([px.Quadratic(1.0, [0.0, 0.0]), px.AbsSum(2)], [0.25, 0.75])
    out["prox_avg[quadratic,abs]"] = (prox_of_proximal_average(fam), *_box(2))
    return out


def all_operators():
    return {**projections(), **prox_oracles(), **averages()}
