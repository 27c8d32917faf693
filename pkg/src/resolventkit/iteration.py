"""Picard iteration ``x_{n+1} = T x_n`` of a firmly nonexpansive map and a
finite-budget classification of the orbit.

For firmly nonexpansive ``T`` the orbit either converges to a fixed point, or
``x_n - x_{n+1} -> 0`` while ``||x_n|| -> inf``, or the successive differences
stay bounded away from zero. The classification below turns those limits into
threshold rules; at a finite budget a divergence verdict is a heuristic and
the diagnosis keeps the raw evidence.
"""
import csv
import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._vec import as_points, as_vector
from .errors import IterationError, ToolkitError

STORE_LIMIT = 100_000
RESIDUAL_SLACK = 1e-12


@dataclass
class IterationTrace:
    """Orbit of ``T``: ``residuals[n] = ||x_n - x_{n+1}||``, ``norms[n] = ||x_n||``.

    Residuals and norms are dense; ``iterates`` holds every ``stride``-th point
    (plus the last one) at the steps listed in ``iterate_steps``.
    """

    iterates: np.ndarray
    iterate_steps: np.ndarray
    residuals: np.ndarray
    norms: np.ndarray
    steps_taken: int
    last: np.ndarray
    x0: np.ndarray
    stride: int = 1

    def residual_increases(self):
        """Largest ``r_{n+1} - r_n`` (should be at most ``RESIDUAL_SLACK``)."""
        if len(self.residuals) < 2:
            return 0.0
        return float(np.diff(self.residuals).max())

    def residuals_monotone(self, slack=RESIDUAL_SLACK):
        return self.residual_increases() <= slack

    def to_csv(self, path, coordinates=False):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            d = self.last.shape[0]
            header = ["step", "residual", "norm"]
            if coordinates:
                header += [f"x{i}" for i in range(d)]
            w.writerow(header)
            stored = {int(s): i for i, s in enumerate(self.iterate_steps)}
            for n in range(self.steps_taken + 1):
                row = [n, repr(float(self.residuals[n])) if n < len(self.residuals) else "", repr(float(self.norms[n]))]
                if coordinates:
                    i = stored.get(n)
                    row += [repr(float(v)) for v in self.iterates[i]] if i is not None else [""] * d
                w.writerow(row)


def iterate(T, x0, max_iter=10_000, tol_fix=1e-10, store_limit=STORE_LIMIT):
    """Run ``x_{n+1} = T x_n`` until ``||x_n - x_{n+1}|| <= tol_fix`` or ``max_iter`` steps."""
    if max_iter < 1:
        raise ToolkitError("max_iter must be at least 1")
    x = as_vector(x0, T.dim, "x0")
    apply = T.apply
    stride = max(1, math.ceil((max_iter + 1) / store_limit))
    stored, steps = [x.copy()], [0]
    residuals = np.empty(max_iter)
    norms = np.empty(max_iter + 1)
    norms[0] = math.sqrt(float(x @ x))
    n = 0
    while n < max_iter:
        y = np.asarray(apply(x), dtype=float)
        if not np.all(np.isfinite(y)):
            raise IterationError(n + 1)
        dx = x - y
        r = math.sqrt(float(dx @ dx))
        residuals[n] = r
        n += 1
        norms[n] = math.sqrt(float(y @ y))
        x = y
        if n % stride == 0:
            stored.append(x.copy())
            steps.append(n)
        if r <= tol_fix:
            break
    if steps[-1] != n:
        stored.append(x.copy())
        steps.append(n)
    return IterationTrace(
        np.array(stored),
        np.array(steps),
        residuals[:n].copy(),
        norms[: n + 1].copy(),
        n,
        x,
        as_vector(x0, T.dim, "x0"),
        stride,
    )


class Verdict(str, enum.Enum):
    CONVERGED = "ConvergedToFixedPoint"
    DIVERGENT = "AsymptoticallyRegularDivergent"
    NOT_REGULAR = "NotAsymptoticallyRegular"
    BUDGET = "BudgetExhausted"


@dataclass(frozen=True)
class Thresholds:
    tol_fix: float = 1e-10
    reg_tol: float = 1e-3
    # None: 10 * (1 + ||x0||)
    norm_escape: Optional[float] = None
    reg_floor: float = 1e-2
    window_frac: float = 0.1
    # a converged orbit's geometric tail estimate must be below this
    cauchy_tol: float = 1e-8
    # log-residual change over the trailing window that still counts as flat
    flat_tol: float = 1e-3

    def escape_radius(self, x0):
        if self.norm_escape is not None:
            return self.norm_escape
        return 10.0 * (1.0 + float(np.linalg.norm(x0)))


@dataclass
class Diagnosis:
    verdict: Verdict
    point: Optional[np.ndarray]
    final_residual: float
    final_norm: float
    residual_slope: float
    norm_slope: float
    fixed_point_residual: Optional[float] = None
    evidence: dict = field(default_factory=dict)

    def as_dict(self):
        return {
            "verdict": self.verdict.value,
            "point": None if self.point is None else self.point.tolist(),
            "final_residual": self.final_residual,
            "final_norm": self.final_norm,
            "residual_slope": self.residual_slope,
            "norm_slope": self.norm_slope,
            "fixed_point_residual": self.fixed_point_residual,
            **self.evidence,
        }


def _slope(y):
    if len(y) < 2:
        return 0.0
    t = np.arange(len(y), dtype=float)
    t -= t.mean()
    return float((t @ (y - y.mean())) / (t @ t))


def diagnose(trace, T=None, thresholds=None):
    """Classify an orbit; ``T`` is needed to re-check a claimed fixed point."""
    th = thresholds or Thresholds()
    if trace.steps_taken == 0:
        raise ToolkitError("cannot diagnose an empty trace")
    r = trace.residuals
    w = max(2, int(math.ceil(th.window_frac * len(r))))
    tail = r[-w:]
    pos = tail[tail > 0]
    log_slope = _slope(np.log(pos)) if len(pos) >= 2 else 0.0
    norm_slope = _slope(trace.norms[-w:])
    r_last = float(r[-1])
    final_norm = float(trace.norms[-1])
    escape = th.escape_radius(trace.x0)
    evidence = {
        "steps": trace.steps_taken,
        "window": int(len(tail)),
        "norm_escape": escape,
        "log_residual_change": log_slope * max(len(tail) - 1, 1),
    }
    common = dict(
        final_residual=r_last,
        final_norm=final_norm,
        residual_slope=log_slope,
        norm_slope=norm_slope,
        evidence=evidence,
    )

    if r_last <= th.tol_fix:
        if r_last == 0.0:
            tail_bound = 0.0
        elif log_slope < 0:
            q = math.exp(log_slope)
            tail_bound = r_last * q / (1.0 - q)
        else:
            tail_bound = math.inf
        evidence["tail_bound"] = tail_bound
        if tail_bound <= th.cauchy_tol:
            p = trace.last
            fp = None
            if T is not None:
                fp = float(np.linalg.norm(p - T(p)))
            if fp is None or fp <= th.tol_fix:
                return Diagnosis(Verdict.CONVERGED, p.copy(), fixed_point_residual=fp, **common)
    if r_last <= th.reg_tol and final_norm > escape and norm_slope > 0:
        return Diagnosis(Verdict.DIVERGENT, None, **common)
    if r_last > th.reg_floor and abs(evidence["log_residual_change"]) <= th.flat_tol:
        return Diagnosis(Verdict.NOT_REGULAR, None, **common)
    return Diagnosis(Verdict.BUDGET, None, **common)


@dataclass
class RegularityReport:
    min_inverse_resolvent_norm: float
    zero_in_range_closure: bool
    diagnosis: Diagnosis
    asymptotically_regular: Optional[bool]
    consistent: Optional[bool]

    def as_dict(self):
        return {
            "min_inverse_resolvent_norm": self.min_inverse_resolvent_norm,
            "zero_in_range_closure": self.zero_in_range_closure,
            "asymptotically_regular": self.asymptotically_regular,
            "consistent": self.consistent,
            "diagnosis": self.diagnosis.as_dict(),
        }


def check_resolvent_regularity(A, probes, max_iter=10_000, thresholds=None):
    """Cross-check two signals for ``0 in cl ran A``.

    The first is ``min ||x - J_A x||`` over Minty samples (points of ``ran A``);
    the second is the diagnosis of iterating ``J_A`` from the first probe. The
    two agree for a maximally monotone ``A``; ``consistent`` is ``None`` when
    the iteration ran out of budget without a verdict.
    """
    th = thresholds or Thresholds()
    X = as_points(probes, A.dim)
    if len(X) == 0:
        raise ToolkitError("need at least one probe")
    ran = A.range_sample(X)
    dmin = float(np.linalg.norm(ran, axis=1).min())
    near_zero = dmin <= th.reg_tol
    J = A.resolvent
    dg = diagnose(iterate(J, X[0], max_iter, th.tol_fix), J, th)
    if dg.verdict is Verdict.BUDGET:
        regular = consistent = None
    else:
        regular = dg.verdict in (Verdict.CONVERGED, Verdict.DIVERGENT)
        consistent = regular == near_zero
    return RegularityReport(dmin, near_zero, dg, regular, consistent)
