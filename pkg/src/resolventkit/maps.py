"""Single-valued maps on R^d.

A :class:`FirmlyNonexpansiveMap` doubles as the resolvent of the maximally
monotone operator ``T^{-1} - Id``; operators are only ever handled through
their resolvents.
"""
from dataclasses import dataclass
from typing import Any, Callable, Optional

import numpy as np

from ._vec import as_points, as_vector


@dataclass(frozen=True, eq=False)
class Map:
    """A total map ``R^dim -> R^dim``; ``batch`` evaluates row-wise on an
    ``(n, dim)`` array when a vectorized form exists."""

    apply: Callable[[np.ndarray], np.ndarray]
    dim: int
    descriptor: str = "map"
    batch: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __call__(self, x):
        return np.asarray(self.apply(as_vector(x, self.dim)), dtype=float)

    def many(self, X):
        X = as_points(X, self.dim)
        if self.batch is not None:
            return np.asarray(self.batch(X), dtype=float).reshape(X.shape)
        out = np.empty_like(X)
        for i, x in enumerate(X):
            out[i] = self.apply(x)
        return out

    def __repr__(self):
        return f"{type(self).__name__}({self.descriptor!r}, dim={self.dim})"


@dataclass(frozen=True, eq=False, repr=False)
class FirmlyNonexpansiveMap(Map):
    """Contract: ``<x - y, Tx - Ty> >= ||Tx - Ty||^2`` for all ``x, y``."""


@dataclass(frozen=True, eq=False, repr=False)
class ProxOracle(FirmlyNonexpansiveMap):
    source: Any = None


def identity(dim):
    return FirmlyNonexpansiveMap(lambda x: x.copy(), dim, "identity", batch=lambda X: X.copy())


def translation(v):
    v = as_vector(v, name="v")
    return FirmlyNonexpansiveMap(
        lambda x: x + v, v.shape[0], f"translation by {v.tolist()}", batch=lambda X: X + v
    )


def projection(C):
    """``P_C`` for a :class:`~resolventkit.convex_sets.ConvexSet`."""
    return FirmlyNonexpansiveMap(C.project, C.dim, f"P[{C.descriptor}]", batch=C.project_many)


def linear_map(M, descriptor=None):
    """``x -> M x``; firmly nonexpansive only when ``<x, Mx> >= ||Mx||^2``."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    return Map(lambda x: M @ x, M.shape[0], descriptor or f"linear {M.tolist()}", batch=lambda X: X @ M.T)


def compose(*maps):
    """``maps[0] o maps[1] o ...``; nonexpansive at best, even for projections."""
    dim = maps[0].dim

    def apply(x):
        for T in reversed(maps):
            x = T(x)
        return x

    def batch(X):
        for T in reversed(maps):
            X = T.many(X)
        return X

    return Map(apply, dim, " o ".join(T.descriptor for T in maps), batch=batch)
