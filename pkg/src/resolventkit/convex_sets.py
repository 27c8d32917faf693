"""Primitive closed convex sets and their projection operators."""
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import kernels
from ._vec import as_points, as_vector
from .errors import DimensionError, ToolkitError
from .rootfind import solve_increasing

MEMBERSHIP_TOL = 1e-8
SAMPLE_RADIUS = 10.0


def project_box(x, lo, hi):
    """Componentwise clamp of ``x`` into ``[lo, hi]``; infinite bounds allowed."""
    x = as_vector(x)
    lo = np.asarray(lo, dtype=float).reshape(-1)
    hi = np.asarray(hi, dtype=float).reshape(-1)
    if lo.shape != x.shape or hi.shape != x.shape:
        raise DimensionError(f"box of dimension {lo.shape[0]} vs point of dimension {x.shape[0]}")
    if np.any(lo > hi):
        raise ToolkitError("box lower bound exceeds upper bound")
    return np.clip(x, lo, hi)


def project_ball(x, center, radius):
    x = as_vector(x)
    c = as_vector(center, x.shape[0], "center")
    if not radius > 0:
        raise ToolkitError(f"ball radius must be positive, got {radius!r}")
    d = x - c
    n = np.linalg.norm(d)
    if n <= radius:
        return x
    return c + radius * d / n


def project_affine(x, point, basis):
    """Projection onto ``point + span(basis)``; ``basis`` rows must be orthonormal."""
    x = as_vector(x)
    p = as_vector(point, x.shape[0], "point")
    B = _orthonormal_rows(basis, x.shape[0])
    return p + B.T @ (B @ (x - p))


def _orthonormal_rows(basis, dim):
    B = np.asarray(basis, dtype=float).reshape(-1, dim) if len(basis) else np.zeros((0, dim))
    if B.shape[1] != dim:
        raise DimensionError("basis vectors do not match the ambient dimension")
    if not np.allclose(B @ B.T, np.eye(B.shape[0]), rtol=0.0, atol=1e-10):
        raise ToolkitError("affine basis is not orthonormal within 1e-10")
    return B


@dataclass(frozen=True)
class EpigraphSpec:
    """A convex, twice differentiable ``f`` on an interval of the real line.

    ``f_second`` is optional; without it Newton steps use a central difference
    of ``f_prime``.
    """

    f: Callable[[float], float]
    f_prime: Callable[[float], float]
    domain_interval: tuple = (-np.inf, np.inf)
    f_second: Optional[Callable[[float], float]] = None
    name: str = "f"

    def validate(self, n=200, seed=0, radius=SAMPLE_RADIUS):
        lo, hi = self.domain_interval
        lo = max(lo, -radius)
        hi = min(hi, radius)
        rng = np.random.default_rng(seed)
        a, b = rng.uniform(lo, hi, (2, n))
        for u, v in zip(a, b):
            fm = self.f(0.5 * (u + v))
            bound = 0.5 * (self.f(u) + self.f(v))
            if fm > bound + 1e-10 * (1.0 + abs(bound)):
                raise ToolkitError(
                    f"{self.name} fails midpoint convexity at ({u!r}, {v!r}): {fm!r} > {bound!r}"
                )
        return self

    def second(self, x):
        if self.f_second is not None:
            return self.f_second(x)
        e = 1e-6 * max(1.0, abs(x))
        return (self.f_prime(x + e) - self.f_prime(x - e)) / (2 * e)


EXP = EpigraphSpec(np.exp, np.exp, f_second=np.exp, name="exp")
SQUARE = EpigraphSpec(lambda u: u * u, lambda u: 2.0 * u, f_second=lambda u: 2.0, name="square")
EPIGRAPH_FUNCTIONS = {"exp": EXP, "square": SQUARE}


def project_epigraph(spec, p):
    """Projection of the planar point ``p = (x0, t0)`` onto ``epi f``.

    Below the epigraph the nearest point is ``(u, f(u))`` where ``u`` is the
    root of ``(u - x0) + f'(u) * max(f(u) - t0, 0)``; that function is
    increasing with slope at least one, so the root is unique.
    """
    x0, t0 = as_vector(p, 2, "p")
    if spec is EXP:
        return np.array(kernels.epi_exp_project(x0, t0))
    lo, hi = spec.domain_interval
    if not lo <= x0 <= hi:
        raise ToolkitError(f"x0={x0!r} outside the domain of {spec.name}")
    if t0 >= spec.f(x0):
        return np.array([x0, t0])
    f, fp = spec.f, spec.f_prime

    def g(x):
        return (x - x0) + fp(x) * max(f(x) - t0, 0.0)

    def dg(x):
        gap = f(x) - t0
        return 1.0 + (spec.second(x) * gap + fp(x) ** 2 if gap > 0 else 0.0)

    u = solve_increasing(g, dg, x0)
    return np.array([u, f(u)])


class ConvexSet:
    """Common interface: ``project``, ``contains``, ``hint_box`` and ``descriptor``."""

    dim: int
    descriptor: str

    def project(self, x):
        raise NotImplementedError

    def project_many(self, X):
        X = as_points(X, self.dim)
        return np.array([self.project(x) for x in X]).reshape(X.shape)

    def contains(self, x, tol=MEMBERSHIP_TOL):
        x = as_vector(x, self.dim)
        return bool(np.linalg.norm(self.project(x) - x) <= tol)

    def hint_box(self):
        """``(lo, hi)`` arrays; unbounded axes carry ``-inf``/``inf``."""
        return np.full(self.dim, -np.inf), np.full(self.dim, np.inf)

    def sample_region(self, inflate=3.0, radius=SAMPLE_RADIUS):
        """Finite box for random sampling: finite axes inflated about their
        midpoint, unbounded axes truncated to ``[-radius, radius]``."""
        lo, hi = self.hint_box()
        lo = lo.copy()
        hi = hi.copy()
        fin = np.isfinite(lo) & np.isfinite(hi)
        mid = 0.5 * (lo[fin] + hi[fin])
        half = 0.5 * inflate * np.maximum(hi[fin] - lo[fin], 1e-3)
        lo[fin], hi[fin] = mid - half, mid + half
        lo[~fin] = np.where(np.isfinite(lo[~fin]), lo[~fin] - radius, -radius)
        hi[~fin] = np.where(np.isfinite(hi[~fin]), hi[~fin] + radius, radius)
        return lo, hi

    def __call__(self, x):
        return self.project(x)


@dataclass(frozen=True, eq=False)
class Box(ConvexSet):
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lo, dtype=float).reshape(-1)
        hi = np.asarray(self.hi, dtype=float).reshape(-1)
        if lo.shape != hi.shape:
            raise DimensionError("box bounds differ in dimension")
        if np.any(np.isnan(lo)) or np.any(np.isnan(hi)) or np.any(lo > hi):
            raise ToolkitError("box bounds must satisfy lo <= hi")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self):
        return self.lo.shape[0]

    @property
    def descriptor(self):
        return "box " + " x ".join(f"[{a:g}, {b:g}]" for a, b in zip(self.lo, self.hi))

    def project(self, x):
        return project_box(x, self.lo, self.hi)

    def project_many(self, X):
        return np.clip(as_points(X, self.dim), self.lo, self.hi)

    def contains(self, x, tol=MEMBERSHIP_TOL):
        x = as_vector(x, self.dim)
        return bool(np.all(x >= self.lo - tol) and np.all(x <= self.hi + tol))

    def hint_box(self):
        return self.lo.copy(), self.hi.copy()


def interval(a, b):
    return Box([a], [b])


@dataclass(frozen=True, eq=False)
class Ball(ConvexSet):
    center: np.ndarray
    radius: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "center", as_vector(self.center, name="center"))
        if not self.radius > 0:
            raise ToolkitError(f"ball radius must be positive, got {self.radius!r}")

    @property
    def dim(self):
        return self.center.shape[0]

    @property
    def descriptor(self):
        return f"ball(center={self.center.tolist()}, radius={self.radius:g})"

    def project(self, x):
        return project_ball(x, self.center, self.radius)

    def project_many(self, X):
        D = as_points(X, self.dim) - self.center
        n = np.linalg.norm(D, axis=1, keepdims=True)
        scale = np.where(n > self.radius, self.radius / np.where(n > 0, n, 1.0), 1.0)
        return self.center + D * scale

    def contains(self, x, tol=MEMBERSHIP_TOL):
        x = as_vector(x, self.dim)
        return bool(np.linalg.norm(x - self.center) <= self.radius + tol)

    def hint_box(self):
        return self.center - self.radius, self.center + self.radius


@dataclass(frozen=True, eq=False)
class AffineSet(ConvexSet):
    """``point + span(basis)``; an empty basis gives the singleton ``{point}``."""

    point: np.ndarray
    basis: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))

    def __post_init__(self):
        p = as_vector(self.point, name="point")
        object.__setattr__(self, "point", p)
        object.__setattr__(self, "basis", _orthonormal_rows(self.basis, p.shape[0]))

    @property
    def dim(self):
        return self.point.shape[0]

    @property
    def descriptor(self):
        return f"affine(point={self.point.tolist()}, basis={self.basis.tolist()})"

    def project(self, x):
        x = as_vector(x, self.dim)
        return self.point + self.basis.T @ (self.basis @ (x - self.point))

    def project_many(self, X):
        D = as_points(X, self.dim) - self.point
        return self.point + (D @ self.basis.T) @ self.basis

    def hint_box(self):
        lo = self.point.copy()
        hi = self.point.copy()
        free = np.any(np.abs(self.basis) > 1e-14, axis=0)
        lo[free] = -np.inf
        hi[free] = np.inf
        return lo, hi


def horizontal_line(height=0.0):
    """The line ``R x {height}`` in the plane."""
    return AffineSet([0.0, height], [[1.0, 0.0]])


@dataclass(frozen=True, eq=False)
class Epigraph(ConvexSet):
    spec: EpigraphSpec = EXP
    dim: int = 2

    @property
    def descriptor(self):
        return f"epi {self.spec.name}"

    def project(self, x):
        return project_epigraph(self.spec, x)

    def project_many(self, X):
        X = as_points(X, 2)
        if self.spec is EXP:
            return kernels.epi_exp_project_many(X)
        return super().project_many(X)

    def contains(self, x, tol=MEMBERSHIP_TOL):
        x0, t0 = as_vector(x, 2)
        return bool(t0 >= self.spec.f(x0) - tol)

    def hint_box(self):
        return np.full(2, -np.inf), np.full(2, np.inf)
