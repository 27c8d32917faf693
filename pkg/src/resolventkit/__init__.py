"""Resolvents, firmly nonexpansive averages, and nearly convex sets on grids."""
__version__ = "0.1.0"

from .errors import (
    BudgetExceededError,
    DimensionError,
    IterationError,
    RootFindingError,
    ToolkitError,
    UnsupportedDimensionError,
)
from .convex_sets import AffineSet, Ball, Box, Epigraph, EpigraphSpec, interval, horizontal_line
from .maps import FirmlyNonexpansiveMap, Map, ProxOracle, compose, identity, linear_map, projection, translation
from .prox import AbsSum, ExpSum, Indicator, Linear, Quadratic, Smooth1D, prox_abs, prox_quadratic, prox_smooth_1d
from .operators import (
    LinearMonotoneOperator,
    MonotoneOperatorView,
    check_firmly_nonexpansive,
    fitzpatrick_estimate,
    minty_graph_sample,
    operator_from_resolvent,
    rectangularity_gamma_estimate,
)
from .averaging import WeightedFamily, average_maps, matrix_resolvent_average, prox_of_proximal_average, resolvent_average
from .iteration import Diagnosis, IterationTrace, Thresholds, Verdict, check_resolvent_regularity, diagnose, iterate
