# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Mirrors the API of ``_pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, floor, fabs, nextafter, INFINITY

from .errors import RootFindingError, ToolkitError

cnp.import_array()

cdef double TIE = 1e-9
cdef double GTOL = 1e-12
cdef int MAX_ITER = 200
cdef int MAX_EXPAND = 80


cdef inline double _ulp(double x) nogil:
    x = fabs(x)
    if x < 1e-300:
        x = 1e-300
    return nextafter(x, INFINITY) - x


cdef inline double _epi_g(double x, double x0, double t0) nogil:
    cdef double ex = exp(x)
    cdef double gap = ex - t0
    if gap < 0.0:
        gap = 0.0
    return (x - x0) + ex * gap


cdef inline double _epi_dg(double x, double t0) nogil:
    cdef double ex = exp(x)
    cdef double gap = ex - t0
    if gap > 0.0:
        return 1.0 + (ex * gap + ex * ex)
    return 1.0


cdef inline double _pe_g(double u, double x) nogil:
    return u + exp(u) - x


cdef inline double _pe_dg(double u) nogil:
    return 1.0 + exp(u)


# kind 0: epigraph stationarity, kind 1: prox of exp
cdef double _g(int kind, double x, double a, double b) nogil:
    if kind == 0:
        return _epi_g(x, a, b)
    return _pe_g(x, a)


cdef double _dg(int kind, double x, double a, double b) nogil:
    if kind == 0:
        return _epi_dg(x, b)
    return _pe_dg(x)


cdef int _solve(int kind, double start, double a, double b, double *root) nogil:
    """Returns 0 on success, 1 if no bracket, 2 if no convergence."""
    cdef double g0 = _g(kind, start, a, b)
    cdef double step, far, gf, lo, hi, x, gx, d, xn, best, gbest
    cdef int i
    if g0 == 0.0:
        root[0] = start
        return 0
    step = fabs(g0)
    # same floor as the Python solver: never step by less than two ulps
    far = nextafter(fabs(start), INFINITY) - fabs(start)
    if step < 2.0 * far:
        step = 2.0 * far
    lo = start
    hi = start
    for i in range(MAX_EXPAND):
        if g0 > 0.0:
            far = start - step
            gf = _g(kind, far, a, b)
            if gf <= 0.0:
                lo = far
                hi = start
                break
        else:
            far = start + step
            gf = _g(kind, far, a, b)
            if gf >= 0.0:
                lo = start
                hi = far
                break
        step *= 2.0
    else:
        return 1
    if lo == hi:
        root[0] = lo
        return 0
    d = _dg(kind, start, a, b)
    x = start - g0 / d
    if not (lo <= x <= hi):
        x = 0.5 * (lo + hi)
    best = x
    gbest = INFINITY
    for i in range(MAX_ITER):
        gx = _g(kind, x, a, b)
        if fabs(gx) < gbest:
            best = x
            gbest = fabs(gx)
        if fabs(gx) <= GTOL:
            root[0] = x
            return 0
        if gx < 0.0:
            lo = x
        else:
            hi = x
        if hi - lo <= 4.0 * _ulp(fabs(lo) if fabs(lo) > fabs(hi) else fabs(hi)):
            root[0] = best
            return 0
        d = _dg(kind, x, a, b)
        if d > 0.0:
            xn = x - gx / d
        else:
            xn = lo - 1.0
        if not (lo < xn < hi):
            xn = 0.5 * (lo + hi)
        x = xn
    return 2


cdef _raise(int status, double start):
    if status == 1:
        raise RootFindingError(f"no sign change found from x={start!r}")
    raise RootFindingError(f"no convergence in {MAX_ITER} iterations from x={start!r}")


def epi_exp_project(double x0, double t0):
    """Nearest point of the epigraph of exp to ``(x0, t0)``."""
    cdef double u
    cdef int status
    if x0 > 709.0:
        raise ToolkitError(f"exp overflows at x={x0!r}")
    if t0 >= exp(x0):
        return x0, t0
    status = _solve(0, x0, x0, t0, &u)
    if status:
        _raise(status, x0)
    return u, exp(u)


def epi_exp_project_many(P):
    cdef double[:, ::1] src = np.ascontiguousarray(P, dtype=np.float64)
    cdef Py_ssize_t n = src.shape[0]
    out_arr = np.empty((n, 2), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i
    cdef double x0, t0, u
    cdef int status
    for i in range(n):
        x0 = src[i, 0]
        t0 = src[i, 1]
        if x0 > 709.0:
            raise ToolkitError(f"exp overflows at x={x0!r}")
        if t0 >= exp(x0):
            out[i, 0] = x0
            out[i, 1] = t0
            continue
        status = _solve(0, x0, x0, t0, &u)
        if status:
            _raise(status, x0)
        out[i, 0] = u
        out[i, 1] = exp(u)
    return out_arr


def prox_exp(double x):
    """Solve ``u + exp(u) = x``."""
    cdef double u
    cdef int status = _solve(1, x, x, 0.0, &u)
    if status:
        _raise(status, x)
    return u


def prox_exp_many(x):
    arr = np.asarray(x, dtype=np.float64)
    cdef double[::1] src = np.ascontiguousarray(arr.ravel())
    out_arr = np.empty(src.shape[0], dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i
    cdef double u
    cdef int status
    for i in range(src.shape[0]):
        status = _solve(1, src[i], src[i], 0.0, &u)
        if status:
            _raise(status, src[i])
        out[i] = u
    return out_arr.reshape(arr.shape)


def minkowski_mark(A, double wa, B, double wb, double h, offset, shape):
    """Occupancy of cells hit by ``wa*a + wb*b`` for all row pairs ``(a, b)``."""
    cdef double[:, ::1] a = np.ascontiguousarray(A, dtype=np.float64)
    cdef double[:, ::1] b = np.ascontiguousarray(B, dtype=np.float64)
    shape = tuple(int(s) for s in shape)
    out_arr = np.zeros(shape, dtype=np.uint8)
    if a.shape[0] == 0 or b.shape[0] == 0:
        return out_arr.astype(bool)
    cdef Py_ssize_t d = a.shape[1]
    cdef cnp.int64_t[::1] off = np.ascontiguousarray(offset, dtype=np.int64)
    cdef cnp.int64_t[::1] lim = np.asarray(shape, dtype=np.int64)
    cdef cnp.int64_t[::1] stride = np.asarray(
        [int(np.prod(shape[k + 1:])) for k in range(len(shape))], dtype=np.int64)
    cdef cnp.uint8_t[::1] flat = out_arr.reshape(-1)
    cdef double[:, ::1] bs = np.ascontiguousarray(np.asarray(B, dtype=np.float64) * wb)
    cdef double[::1] pa = np.empty(d, dtype=np.float64)
    cdef Py_ssize_t i, j, k
    cdef cnp.int64_t idx, lin
    cdef double inv_h = 1.0 / h
    cdef bint ok
    with nogil:
        for i in range(a.shape[0]):
            for k in range(d):
                pa[k] = wa * a[i, k]
            for j in range(bs.shape[0]):
                lin = 0
                ok = True
                for k in range(d):
                    idx = <cnp.int64_t>floor((pa[k] + bs[j, k]) * inv_h + TIE) - off[k]
                    if idx < 0 or idx >= lim[k]:
                        ok = False
                        break
                    lin += idx * stride[k]
                if ok:
                    flat[lin] = 1
    return out_arr.astype(bool)
