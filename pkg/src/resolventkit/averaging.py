"""Convex combinations of firmly nonexpansive maps, the resolvent average,
and the prox of the proximal average."""
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ToolkitError
from .maps import FirmlyNonexpansiveMap, ProxOracle
from .operators import MonotoneOperatorView

WEIGHT_TOL = 1e-12
PSD_TOL = 1e-10


def _as_map(m):
    """Accept maps, prox oracles, convex functions and convex sets alike."""
    if isinstance(m, FirmlyNonexpansiveMap):
        return m
    if hasattr(m, "oracle"):
        return m.oracle()
    if hasattr(m, "project"):
        return FirmlyNonexpansiveMap(m.project, m.dim, f"P[{m.descriptor}]", batch=m.project_many)
    raise ToolkitError(f"cannot use {m!r} as a firmly nonexpansive map")


@dataclass(frozen=True, eq=False)
class WeightedFamily:
    members: tuple
    weights: np.ndarray

    def __post_init__(self):
        members = tuple(_as_map(m) for m in self.members)
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if not members:
            raise ToolkitError("a weighted family needs at least one member")
        if len(members) != len(w):
            raise ToolkitError(f"{len(members)} members but {len(w)} weights")
        if np.any(~np.isfinite(w)) or np.any(w <= 0):
            raise ToolkitError("weights must be strictly positive")
        if abs(w.sum() - 1.0) > WEIGHT_TOL:
            raise ToolkitError(f"weights sum to {w.sum()!r}, not 1")
        if len({m.dim for m in members}) != 1:
            raise DimensionError("family members act on different dimensions")
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "weights", w)

    @property
    def dim(self):
        return self.members[0].dim

    @classmethod
    def uniform(cls, *members):
        return cls(members, np.full(len(members), 1.0 / len(members)))


def _weighted_sum(fam):
    def apply(x):
        out = np.zeros_like(x)
        for lam, T in zip(fam.weights, fam.members):
            out += lam * np.asarray(T.apply(x), dtype=float)
        return out

    def batch(X):
        out = np.zeros_like(X)
        for lam, T in zip(fam.weights, fam.members):
            out += lam * T.many(X)
        return out

    desc = " + ".join(f"{lam:g}*{T.descriptor}" for lam, T in zip(fam.weights, fam.members))
    return apply, batch, desc


def average_maps(fam):
    """``x -> sum_i lambda_i T_i x``; firmly nonexpansive again."""
    apply, batch, desc = _weighted_sum(fam)
    return FirmlyNonexpansiveMap(apply, fam.dim, desc, batch=batch)


def resolvent_average(fam):
    """The operator whose resolvent is the weighted average of the members'.

    The operator itself is never formed; its domain and range are sampled as
    ``ran J_A`` and ``ran (Id - J_A)``.
    """
    T = average_maps(fam)
    return MonotoneOperatorView(T, f"resolvent average of [{T.descriptor}]")


def matrix_resolvent_average(mats, weights):
    """``(sum_i lambda_i (I + A_i)^{-1})^{-1} - I`` for PSD matrices."""
    mats = [np.atleast_2d(np.asarray(A, dtype=float)) for A in mats]
    w = np.asarray(weights, dtype=float).reshape(-1)
    if len(mats) != len(w) or not mats:
        raise ToolkitError("need one weight per matrix")
    if np.any(w <= 0) or abs(w.sum() - 1.0) > WEIGHT_TOL:
        raise ToolkitError("weights must be strictly positive and sum to 1")
    d = mats[0].shape[0]
    I = np.eye(d)
    acc = np.zeros((d, d))
    for A, lam in zip(mats, w):
        if A.shape != (d, d):
            raise DimensionError("matrices differ in shape")
        if not np.allclose(A, A.T, rtol=0.0, atol=PSD_TOL):
            raise ToolkitError("matrix is not symmetric")
        if np.linalg.eigvalsh(0.5 * (A + A.T)).min() < -PSD_TOL:
            raise ToolkitError("matrix is not positive semidefinite")
        acc += lam * np.linalg.inv(I + A)
    R = np.linalg.inv(acc) - I
    R = 0.5 * (R + R.T)
    if np.linalg.eigvalsh(R).min() < -1e-9:
        raise ToolkitError("resolvent average lost positive semidefiniteness")
    return R


def prox_of_proximal_average(fam):
    """Prox of the proximal average: the weighted average of the members' proxes."""
    apply, batch, desc = _weighted_sum(fam)
    return ProxOracle(apply, fam.dim, f"proximal average of [{desc}]", batch=batch, source=fam)
