"""Convex functions with proximal oracles.

``prox_f = (Id + df)^{-1}`` is the resolvent of the subdifferential, so every
oracle here is a :class:`~resolventkit.maps.ProxOracle`. Indicator functions
route to the projections in :mod:`resolventkit.convex_sets`.
"""
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import kernels
from ._vec import as_points, as_vector
from .convex_sets import MEMBERSHIP_TOL
from .errors import ToolkitError
from .maps import ProxOracle
from .rootfind import solve_increasing

PROX_RESIDUAL_TOL = 1e-11


def prox_quadratic(a, b, x):
    """Minimizer of ``0.5||u - x||^2 + (a/2)||u||^2 + <b, u>``."""
    if not a >= 0:
        raise ToolkitError(f"quadratic coefficient must be nonnegative, got {a!r}")
    x = as_vector(x)
    b = as_vector(b, x.shape[0], "b")
    return (x - b) / (1.0 + a)


def prox_abs(x):
    """Soft thresholding at level one, componentwise."""
    x = as_vector(x)
    return np.sign(x) * np.maximum(np.abs(x) - 1.0, 0.0)


def prox_smooth_1d(f, x):
    """Solve ``u + f'(u) = x`` for a differentiable convex ``f`` on the line."""
    x = float(x)
    u = solve_increasing(
        lambda u: u + f.derivative(u) - x,
        lambda u: 1.0 + f.second_derivative(u),
        x,
    )
    r = abs(u + f.derivative(u) - x)
    if r > PROX_RESIDUAL_TOL * max(1.0, abs(x)):
        raise ToolkitError(f"prox residual {r:.3e} above tolerance at x={x!r}")
    return u


class ConvexFunction:
    dim: int
    descriptor: str

    def eval(self, u):
        raise NotImplementedError

    def prox(self, x):
        raise NotImplementedError

    def prox_many(self, X):
        X = as_points(X, self.dim)
        return np.array([self.prox(x) for x in X]).reshape(X.shape)

    def subgradient_hint(self, u):
        return None

    def domain_box(self):
        return np.full(self.dim, -np.inf), np.full(self.dim, np.inf)

    def oracle(self):
        return ProxOracle(self.prox, self.dim, f"prox[{self.descriptor}]", batch=self.prox_many, source=self)

    def __call__(self, u):
        return self.eval(u)


@dataclass(frozen=True, eq=False)
class Quadratic(ConvexFunction):
    """``(a/2)||u||^2 + <b, u>``."""

    a: float
    b: np.ndarray

    def __post_init__(self):
        if not self.a >= 0:
            raise ToolkitError(f"quadratic coefficient must be nonnegative, got {self.a!r}")
        object.__setattr__(self, "b", as_vector(self.b, name="b"))

    @property
    def dim(self):
        return self.b.shape[0]

    @property
    def descriptor(self):
        return f"quadratic(a={self.a:g}, b={self.b.tolist()})"

    def eval(self, u):
        u = as_vector(u, self.dim)
        return 0.5 * self.a * float(u @ u) + float(self.b @ u)

    def subgradient_hint(self, u):
        return self.a * as_vector(u, self.dim) + self.b

    def derivative(self, u):
        return self.a * u + float(self.b[0])

    def second_derivative(self, u):
        return self.a

    def prox(self, x):
        return prox_quadratic(self.a, self.b, x)

    def prox_many(self, X):
        return (as_points(X, self.dim) - self.b) / (1.0 + self.a)


def zero_function(dim):
    return Quadratic(0.0, np.zeros(dim))


@dataclass(frozen=True, eq=False)
class AbsSum(ConvexFunction):
    """``sum_i |u_i|``."""

    dim: int = 1

    @property
    def descriptor(self):
        return f"abs(dim={self.dim})"

    def eval(self, u):
        return float(np.abs(as_vector(u, self.dim)).sum())

    def subgradient_hint(self, u):
        return np.sign(as_vector(u, self.dim))

    def prox(self, x):
        return prox_abs(as_vector(x, self.dim))

    def prox_many(self, X):
        X = as_points(X, self.dim)
        return np.sign(X) * np.maximum(np.abs(X) - 1.0, 0.0)


@dataclass(frozen=True, eq=False)
class ExpSum(ConvexFunction):
    """``sum_i exp(u_i)``; the prox is solved coordinatewise."""

    dim: int = 1

    @property
    def descriptor(self):
        return f"exp(dim={self.dim})"

    def eval(self, u):
        return float(np.exp(as_vector(u, self.dim)).sum())

    def derivative(self, u):
        return np.exp(u)

    second_derivative = derivative

    def subgradient_hint(self, u):
        return np.exp(as_vector(u, self.dim))

    def prox(self, x):
        return kernels.prox_exp_many(as_vector(x, self.dim))

    def prox_many(self, X):
        return kernels.prox_exp_many(as_points(X, self.dim))


@dataclass(frozen=True, eq=False)
class Linear(ConvexFunction):
    """``<c, u>``; its prox is translation by ``-c``."""

    c: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "c", as_vector(self.c, name="c"))

    @property
    def dim(self):
        return self.c.shape[0]

    @property
    def descriptor(self):
        return f"linear(c={self.c.tolist()})"

    def eval(self, u):
        return float(self.c @ as_vector(u, self.dim))

    def derivative(self, u):
        return float(self.c[0]) if self.dim == 1 else self.c

    def second_derivative(self, u):
        return 0.0

    def subgradient_hint(self, u):
        return self.c.copy()

    def prox(self, x):
        return as_vector(x, self.dim) - self.c

    def prox_many(self, X):
        return as_points(X, self.dim) - self.c


@dataclass(frozen=True, eq=False)
class Smooth1D(ConvexFunction):
    """A differentiable convex function of one variable given by callables."""

    f: Callable[[float], float]
    f_prime: Callable[[float], float]
    f_second: Optional[Callable[[float], float]] = None
    name: str = "smooth"
    dim: int = field(default=1, init=False)

    @property
    def descriptor(self):
        return self.name

    def eval(self, u):
        return float(self.f(float(as_vector(u, 1)[0])))

    def derivative(self, u):
        return self.f_prime(u)

    def second_derivative(self, u):
        if self.f_second is not None:
            return self.f_second(u)
        e = 1e-6 * max(1.0, abs(u))
        return (self.f_prime(u + e) - self.f_prime(u - e)) / (2 * e)

    def prox(self, x):
        return np.array([prox_smooth_1d(self, as_vector(x, 1)[0])])


@dataclass(frozen=True, eq=False)
class Indicator(ConvexFunction):
    """``0`` on a closed convex set, ``+inf`` elsewhere."""

    set: object

    @property
    def dim(self):
        return self.set.dim

    @property
    def descriptor(self):
        return f"indicator[{self.set.descriptor}]"

    def eval(self, u):
        return 0.0 if self.set.contains(u, MEMBERSHIP_TOL) else np.inf

    def prox(self, x):
        return self.set.project(x)

    def prox_many(self, X):
        return self.set.project_many(X)

    def domain_box(self):
        return self.set.hint_box()
