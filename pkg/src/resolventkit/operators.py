"""Maximally monotone operators, represented through their resolvents.

The Minty parametrization ``x -> (J_A x, x - J_A x)`` turns any resolvent into
graph samples of ``A``; those feed the Fitzpatrick lower bound. Linear
operators additionally get an exact rectangularity test.
"""
from dataclasses import dataclass, field
import numpy as np
from scipy.linalg import lu_factor, lu_solve

from ._vec import as_points, as_vector
from .errors import DimensionError, ToolkitError
from .maps import FirmlyNonexpansiveMap, Map

FNE_TOL = 1e-9
MONOTONE_TOL = 1e-10
KERNEL_CUTOFF = 1e-12


@dataclass(frozen=True, eq=False)
class MonotoneOperatorView:
    """An operator ``A`` known only through ``J_A``."""

    resolvent: FirmlyNonexpansiveMap
    descriptor: str = ""

    @property
    def dim(self):
        return self.resolvent.dim

    def inverse_resolvent(self, x):
        """``J_{A^{-1}} x = x - J_A x``."""
        x = as_vector(x, self.dim)
        return x - self.resolvent(x)

    def domain_sample(self, probes):
        """Points of ``ran J_A = dom A``."""
        return self.resolvent.many(probes)

    def range_sample(self, probes):
        """Points of ``ran (Id - J_A) = ran A``."""
        X = as_points(probes, self.dim)
        return X - self.resolvent.many(X)

    def graph_sample(self, probes):
        return minty_graph_sample(self, probes)


@dataclass(frozen=True, eq=False)
class LinearMonotoneOperator:
    matrix: np.ndarray

    def __post_init__(self):
        M = np.atleast_2d(np.asarray(self.matrix, dtype=float))
        if M.shape[0] != M.shape[1]:
            raise DimensionError(f"operator matrix must be square, got {M.shape}")
        if not np.all(np.isfinite(M)):
            raise ToolkitError("operator matrix has non-finite entries")
        lam = np.linalg.eigvalsh(0.5 * (M + M.T)).min()
        if lam < -MONOTONE_TOL:
            raise ToolkitError(f"matrix is not monotone: symmetric part has eigenvalue {lam:.3e}")
        object.__setattr__(self, "matrix", M)

    @property
    def dim(self):
        return self.matrix.shape[0]

    def resolvent(self):
        """``(I + M)^{-1}`` as a map, factorized once."""
        d = self.dim
        lu = lu_factor(np.eye(d) + self.matrix, check_finite=False)
        if np.any(np.abs(np.diag(lu[0])) < 1e-14):
            raise ToolkitError("I + M is singular")
        desc = f"J[linear {self.matrix.tolist()}]"
        return FirmlyNonexpansiveMap(
            lambda x: lu_solve(lu, x, check_finite=False),
            d,
            desc,
            batch=lambda X: lu_solve(lu, X.T, check_finite=False).T,
        )

    def view(self):
        return MonotoneOperatorView(self.resolvent(), f"linear {self.matrix.tolist()}")


def resolvent_of_linear(M, x):
    """Solve ``(I + M) u = x`` for monotone ``M``."""
    if not isinstance(M, LinearMonotoneOperator):
        M = LinearMonotoneOperator(M)
    x = as_vector(x, M.dim)
    A = np.eye(M.dim) + M.matrix
    try:
        u = np.linalg.solve(A, x)
    except np.linalg.LinAlgError as exc:
        raise ToolkitError(f"I + M is singular: {exc}") from None
    r = np.linalg.norm(A @ u - x)
    if r > 1e-10 * (1.0 + np.linalg.norm(x)):
        raise ToolkitError(f"linear resolvent residual {r:.3e} too large")
    return u


@dataclass(frozen=True)
class GraphSample:
    """Finite sample ``{(a_i, a*_i)}`` of a graph; rows of ``points``/``values``."""

    points: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        P = np.asarray(self.points, dtype=float)
        V = np.asarray(self.values, dtype=float)
        if P.ndim == 1:
            P = P[:, None]
        if V.ndim == 1:
            V = V[:, None]
        if P.shape != V.shape:
            raise DimensionError(f"points {P.shape} and values {V.shape} differ in shape")
        if not (np.all(np.isfinite(P)) and np.all(np.isfinite(V))):
            raise ToolkitError("graph sample contains non-finite entries")
        object.__setattr__(self, "points", P)
        object.__setattr__(self, "values", V)

    def __len__(self):
        return self.points.shape[0]

    @property
    def dim(self):
        return self.points.shape[1]

    def pairs(self):
        return list(zip(self.points, self.values))

    def merged(self, other):
        return GraphSample(np.vstack([self.points, other.points]), np.vstack([self.values, other.values]))

    def worst_monotonicity(self):
        """``min_{i,j} <a_i - a_j, a*_i - a*_j>`` (0 for fewer than two pairs)."""
        P, V = self.points, self.values
        if len(P) < 2:
            return 0.0
        worst = np.inf
        diag = np.einsum("ij,ij->i", P, V)
        step = max(1, 4_000_000 // len(P))
        for s in range(0, len(P), step):
            cross = P[s:s + step] @ V.T
            cross_t = V[s:s + step] @ P.T
            G = diag[s:s + step, None] + diag[None, :] - cross - cross_t
            worst = min(worst, G.min())
        return float(worst)

    def is_monotone(self, tol=FNE_TOL):
        return self.worst_monotonicity() >= -tol


def minty_graph_sample(A, probes):
    """Graph points ``(J_A x, x - J_A x)`` for each probe ``x``."""
    X = as_points(probes, A.dim)
    J = A.resolvent.many(X)
    return GraphSample(J, X - J)


def fitzpatrick_estimate(g, x, xstar):
    """Lower bound ``max_i <x, a*_i> + <a_i, x*> - <a_i, a*_i>`` of ``F_A(x, x*)``."""
    if len(g) == 0:
        raise ToolkitError("Fitzpatrick estimate needs a nonempty graph sample")
    x = as_vector(x, g.dim)
    xstar = as_vector(xstar, g.dim, "xstar")
    P, V = g.points, g.values
    vals = V @ x + P @ xstar - np.einsum("ij,ij->i", P, V)
    return float(vals.max())


def fitzpatrick_growth(A, x, xstar, radii=(1, 10, 100, 1000), n=2000, seed=0):
    """Fitzpatrick lower bounds from probes in boxes of growing radius.

    Returns ``(estimates, suspected)``; ``suspected`` flags a non-rectangular
    pattern where the bound keeps growing roughly in proportion to the radius.
    This is a heuristic: only divergence of the true supremum is meaningful.
    """
    rng = np.random.default_rng(seed)
    g = None
    est = []
    for r in radii:
        s = minty_graph_sample(A, rng.uniform(-r, r, (n, A.dim)))
        g = s if g is None else g.merged(s)
        est.append(fitzpatrick_estimate(g, x, xstar))
    est = np.array(est)
    gains = np.diff(est)
    suspected = bool(len(gains) >= 2 and np.all(gains[1:] > 0.5 * gains[:-1]) and gains[-1] > 1.0)
    return est, suspected


def direction_samples(d, n, seed=0):
    """Deterministic unit vectors: golden-angle points on the circle,
    Fibonacci points on the sphere, normalized Gaussians beyond that."""
    if d == 1:
        return np.array([[1.0], [-1.0]])
    k = np.arange(n) + 0.5
    if d == 2:
        th = np.pi * (3.0 - np.sqrt(5.0)) * k
        return np.column_stack([np.cos(th), np.sin(th)])
    if d == 3:
        z = 1.0 - 2.0 * k / n
        r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
        th = np.pi * (3.0 - np.sqrt(5.0)) * k
        return np.column_stack([r * np.cos(th), r * np.sin(th), z])
    G = np.random.default_rng(seed).standard_normal((n, d))
    return G / np.linalg.norm(G, axis=1, keepdims=True)


def rectangularity_gamma_estimate(M, n_samples=100_000, seed=0):
    """Estimate the largest ``gamma`` with ``<x, Mx> >= gamma ||Mx||^2``.

    Minimum of ``<x, Mx> / ||Mx||^2`` over sampled unit directions and the
    eigenvectors of the symmetric part; directions with ``||Mx|| <= 1e-12``
    are skipped. A value near zero signals a non-rectangular operator;
    ``inf`` means ``M`` vanished on every sample.
    """
    if n_samples < 1:
        raise ToolkitError("n_samples must be at least 1")
    if not isinstance(M, LinearMonotoneOperator):
        M = LinearMonotoneOperator(M)
    A = M.matrix
    _, vecs = np.linalg.eigh(0.5 * (A + A.T))
    X = np.vstack([direction_samples(M.dim, n_samples, seed), vecs.T, -vecs.T])
    MX = X @ A.T
    nrm2 = np.einsum("ij,ij->i", MX, MX)
    keep = nrm2 > KERNEL_CUTOFF ** 2
    if not np.any(keep):
        return np.inf
    return float((np.einsum("ij,ij->i", X[keep], MX[keep]) / nrm2[keep]).min())


@dataclass
class FNEReport:
    """Worst violations of three equivalent forms of firm nonexpansiveness.

    ``direct``: ``||Tx-Ty||^2 - <x-y, Tx-Ty>``; ``complement``: the same for
    ``Id - T``; ``reflected``: ``||Rx-Ry|| - ||x-y||`` with ``R = 2T - Id``.
    Each is at most zero for a firmly nonexpansive map.
    """

    direct: float
    complement: float
    reflected: float
    n_pairs: int
    tol: float = FNE_TOL
    worst_pair: tuple = field(default=None, repr=False)

    @property
    def worst(self):
        return max(self.direct, self.complement, self.reflected)

    @property
    def passed(self):
        return self.worst <= self.tol

    def as_dict(self):
        return {
            "direct": self.direct,
            "complement": self.complement,
            "reflected": self.reflected,
            "worst": self.worst,
            "n_pairs": self.n_pairs,
            "tol": self.tol,
            "passed": self.passed,
        }


def _evaluate(T, X):
    if isinstance(T, Map):
        return T.many(X)
    return np.array([np.asarray(T(x), dtype=float) for x in X]).reshape(X.shape)


def check_firmly_nonexpansive(T, lo, hi, n_pairs=10_000, seed=0, tol=FNE_TOL, pairs=None):
    """Sampled test of firm nonexpansiveness on the box ``[lo, hi]``.

    ``T`` is a :class:`~resolventkit.maps.Map` or any callable on vectors.
    ``pairs=(X, Y)`` overrides random sampling.
    """
    if pairs is None:
        lo = np.atleast_1d(np.asarray(lo, dtype=float))
        hi = np.atleast_1d(np.asarray(hi, dtype=float))
        rng = np.random.default_rng(seed)
        X = rng.uniform(lo, hi, (n_pairs, lo.shape[0]))
        Y = rng.uniform(lo, hi, (n_pairs, lo.shape[0]))
    else:
        X, Y = (np.atleast_2d(np.asarray(a, dtype=float)) for a in pairs)
    TX, TY = _evaluate(T, X), _evaluate(T, Y)
    D, DT = X - Y, TX - TY
    DC = D - DT
    direct = np.einsum("ij,ij->i", DT, DT) - np.einsum("ij,ij->i", D, DT)
    complement = np.einsum("ij,ij->i", DC, DC) - np.einsum("ij,ij->i", D, DC)
    reflected = np.linalg.norm(2 * DT - D, axis=1) - np.linalg.norm(D, axis=1)
    total = np.maximum(np.maximum(direct, complement), reflected)
    i = int(total.argmax())
    return FNEReport(
        float(direct.max()),
        float(complement.max()),
        float(reflected.max()),
        len(X),
        tol,
        (X[i], Y[i]),
    )


def complement_map(T):
    """``Id - T``; firmly nonexpansive whenever ``T`` is."""
    return FirmlyNonexpansiveMap(
        lambda x: x - T(x), T.dim, f"Id - {T.descriptor}", batch=lambda X: X - T.many(X)
    )


def operator_from_resolvent(T: FirmlyNonexpansiveMap, descriptor: str = "") -> MonotoneOperatorView:
    return MonotoneOperatorView(T, descriptor or f"({T.descriptor})^-1 - Id")

