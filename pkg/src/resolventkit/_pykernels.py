"""Pure-Python/numpy implementations of the hot kernels.

Used when the compiled ``_ckernels`` extension is unavailable, and as the
reference the compiled path is tested against.
"""
import math

import numpy as np

from .errors import ToolkitError
from .rootfind import solve_increasing

# floor(p / h + TIE): points sitting exactly on a cell face go to the upper cell
TIE = 1e-9
_PAIR_CHUNK = 2_000_000


def epi_exp_project(x0, t0):
    """Nearest point of the epigraph of exp to ``(x0, t0)``."""
    x0 = float(x0)
    t0 = float(t0)
    try:
        e0 = math.exp(x0)
    except OverflowError:
        raise ToolkitError(f"exp overflows at x={x0!r}") from None
    if t0 >= e0:
        return x0, t0

    def g(x):
        ex = math.exp(x)
        return (x - x0) + ex * max(ex - t0, 0.0)

    def dg(x):
        ex = math.exp(x)
        gap = ex - t0
        return 1.0 + (ex * gap + ex * ex if gap > 0.0 else 0.0)

    u = solve_increasing(g, dg, x0)
    return u, math.exp(u)


def epi_exp_project_many(P):
    P = np.asarray(P, dtype=float)
    out = np.empty_like(P)
    for i in range(P.shape[0]):
        out[i, 0], out[i, 1] = epi_exp_project(P[i, 0], P[i, 1])
    return out


def prox_exp(x):
    """Solve ``u + exp(u) = x``."""
    x = float(x)
    return solve_increasing(lambda u: u + math.exp(u) - x, lambda u: 1.0 + math.exp(u), x)


def prox_exp_many(x):
    x = np.asarray(x, dtype=float)
    return np.array([prox_exp(v) for v in x.ravel()]).reshape(x.shape)


def minkowski_mark(A, wa, B, wb, h, offset, shape):
    """Occupancy of cells hit by ``wa*a + wb*b`` for all row pairs ``(a, b)``.

    Cell ``k`` along an axis covers ``[k*h, (k+1)*h)``; ``offset`` is the
    index of the output array's first cell.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    offset = np.asarray(offset, dtype=np.int64)
    shape = tuple(int(s) for s in shape)
    out = np.zeros(shape, dtype=bool)
    if len(A) == 0 or len(B) == 0:
        return out
    d = A.shape[1]
    lim = np.asarray(shape, dtype=np.int64)
    Bs = wb * B
    chunk = max(1, _PAIR_CHUNK // len(B))
    for s in range(0, len(A), chunk):
        P = (wa * A[s:s + chunk])[:, None, :] + Bs[None, :, :]
        idx = np.floor(P.reshape(-1, d) / h + TIE).astype(np.int64) - offset
        ok = np.all((idx >= 0) & (idx < lim), axis=1)
        out[tuple(idx[ok].T)] = True
    return out
