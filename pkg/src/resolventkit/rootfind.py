"""Scalar root finding for increasing functions: bracket by doubling, then
Newton steps safeguarded by bisection.

Every scalar solve in the package (epigraph projections, smooth 1-D proxes)
goes through :func:`solve_increasing`.
"""
import math

from .errors import RootFindingError

MAX_ITER = 200
GTOL = 1e-12
MAX_EXPAND = 80


def expand_bracket(g, x, step=1.0, max_expand=MAX_EXPAND):
    """Return ``(lo, hi)`` with ``g(lo) <= 0 <= g(hi)`` for increasing ``g``.

    Starts at ``x`` and walks in the downhill direction, doubling the step.
    """
    gx = g(x)
    if gx == 0.0:
        return x, x
    step = abs(step) if step else 1.0
    direction = -1.0 if gx > 0 else 1.0
    far = x
    for _ in range(max_expand):
        far = x + direction * step
        gf = g(far)
        if (gf <= 0.0) if direction < 0 else (gf >= 0.0):
            return (far, x) if direction < 0 else (x, far)
        step *= 2.0
    raise RootFindingError(
        f"no sign change found from x={x!r} (g={gx!r}) after {max_expand} doublings; "
        f"last probe {far!r}"
    )


def safeguarded_newton(g, dg, lo, hi, x0=None, gtol=GTOL, maxiter=MAX_ITER):
    """Root of increasing ``g`` inside ``[lo, hi]``.

    A Newton step is accepted only if it lands strictly inside the current
    bracket; otherwise the bracket is bisected. Stops when ``|g| <= gtol`` or
    the bracket has collapsed to a few ulps.
    """
    if lo > hi:
        lo, hi = hi, lo
    if lo == hi:
        return lo
    x = 0.5 * (lo + hi) if x0 is None or not (lo <= x0 <= hi) else x0
    best, gbest = x, math.inf
    for _ in range(maxiter):
        gx = g(x)
        if abs(gx) < gbest:
            best, gbest = x, abs(gx)
        if abs(gx) <= gtol:
            return x
        if gx < 0.0:
            lo = x
        else:
            hi = x
        if hi - lo <= 4.0 * math.ulp(max(abs(lo), abs(hi), 1e-300)):
            return best
        d = dg(x)
        xn = x - gx / d if d > 0.0 else math.nan
        if not (lo < xn < hi):
            xn = 0.5 * (lo + hi)
        x = xn
    raise RootFindingError(f"no convergence in {maxiter} iterations; bracket [{lo!r}, {hi!r}], |g|={gbest!r}")


def solve_increasing(g, dg, x_start, step=None, gtol=GTOL, maxiter=MAX_ITER):
    """Bracket then solve ``g(x) = 0`` for increasing ``g``, starting at ``x_start``."""
    g0 = g(x_start)
    if g0 == 0.0:
        return x_start
    # a step below ulp(x_start) would leave the probe where it is
    step = max(step if step else abs(g0), 2.0 * math.ulp(x_start))
    lo, hi = expand_bracket(g, x_start, step)
    d0 = dg(x_start)
    guess = x_start - g0 / d0 if d0 > 0 else None
    return safeguarded_newton(g, dg, lo, hi, x0=guess, gtol=gtol, maxiter=maxiter)
