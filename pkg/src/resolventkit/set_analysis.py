"""Discretized set calculus on a global lattice of cubic cells.

Cell ``k`` along an axis is ``[k*h, (k+1)*h)``, so every grid with the same
``h`` lives on the same lattice and grids only differ in the index box they
store. Topology is approximated at resolution ``h``: the closure is a
morphological closing, the relative interior is a one-cell erosion carried
out inside the detected affine hull, and Hausdorff distances come from exact
Euclidean distance transforms. Every comparison is therefore a tolerance
statement in units of cells.
"""
import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage
from scipy.spatial import ConvexHull

from . import kernels
from ._vec import as_points, as_vector
from .errors import BudgetExceededError, DimensionError, ToolkitError, UnsupportedDimensionError

TIE = kernels.TIE
MARGIN = 2
PAIR_BUDGET = 100_000_000
DEFAULT_TOL_CELLS = 2


class IncompatibleGridsError(ToolkitError):
    pass


@dataclass(frozen=True)
class PointCloudSet:
    points: np.ndarray
    h: float

    def __post_init__(self):
        P = np.asarray(self.points, dtype=float)
        if P.ndim == 1:
            P = P[:, None]
        if P.ndim != 2:
            raise DimensionError("points must be an (n, d) array")
        if not np.all(np.isfinite(P)):
            raise ToolkitError("point cloud contains non-finite points")
        if not self.h > 0:
            raise ToolkitError("resolution h must be positive")
        object.__setattr__(self, "points", P)

    @property
    def dim(self):
        return self.points.shape[1]

    def __len__(self):
        return self.points.shape[0]


@dataclass(frozen=True, eq=False)
class GriddedSet:
    """Occupied cells ``offset + idx`` of the lattice with spacing ``h``."""

    h: float
    offset: np.ndarray
    occupancy: np.ndarray

    def __post_init__(self):
        occ = np.asarray(self.occupancy, dtype=bool)
        off = np.asarray(self.offset, dtype=np.int64).reshape(-1)
        if off.shape[0] != occ.ndim:
            raise DimensionError(f"offset of length {off.shape[0]} for a {occ.ndim}-D occupancy array")
        if not self.h > 0:
            raise ToolkitError("cell size must be positive")
        object.__setattr__(self, "occupancy", occ)
        object.__setattr__(self, "offset", off)

    @property
    def dim(self):
        return self.occupancy.ndim

    @property
    def cell(self):
        return self.h

    @property
    def origin(self):
        return self.offset * self.h

    @property
    def bounds(self):
        lo = self.origin
        return lo, lo + np.asarray(self.occupancy.shape) * self.h

    @property
    def count(self):
        return int(self.occupancy.sum())

    def is_empty(self):
        return not self.occupancy.any()

    def indices(self):
        """Global lattice indices of occupied cells, shape ``(n, d)``."""
        return np.argwhere(self.occupancy) + self.offset

    def centers(self):
        return (self.indices() + 0.5) * self.h

    def contains_point(self, p):
        k = np.floor(np.asarray(p, dtype=float) / self.h + TIE).astype(np.int64) - self.offset
        if np.any(k < 0) or np.any(k >= self.occupancy.shape):
            return False
        return bool(self.occupancy[tuple(k)])

    def __repr__(self):
        return f"GriddedSet(dim={self.dim}, h={self.h:g}, cells={self.count}, shape={self.occupancy.shape})"


def empty_grid(dim, h):
    return GriddedSet(h, np.zeros(dim, dtype=np.int64), np.zeros((0,) * dim, dtype=bool))


def from_indices(idx, h, dim=None, margin=MARGIN):
    """Grid whose occupied cells are the rows of ``idx`` (global indices)."""
    idx = np.asarray(idx, dtype=np.int64)
    if idx.size == 0:
        return empty_grid(dim if dim is not None else (idx.shape[1] if idx.ndim == 2 else 1), h)
    lo = idx.min(axis=0) - margin
    shape = idx.max(axis=0) - lo + 1 + margin
    occ = np.zeros(tuple(shape), dtype=bool)
    occ[tuple((idx - lo).T)] = True
    return GriddedSet(h, lo, occ)


def embed(g, offset, shape):
    """Occupancy of ``g`` inside the index box ``[offset, offset + shape)``."""
    out = np.zeros(tuple(shape), dtype=bool)
    if g.is_empty():
        return out
    idx = g.indices() - offset
    ok = np.all((idx >= 0) & (idx < np.asarray(shape)), axis=1)
    out[tuple(idx[ok].T)] = True
    return out


def _common_box(grids, pad=0):
    live = [g for g in grids if not g.is_empty()]
    d = grids[0].dim
    if not live:
        return np.zeros(d, dtype=np.int64), (0,) * d
    lo = np.min([g.offset for g in live], axis=0) - pad
    hi = np.max([g.offset + np.asarray(g.occupancy.shape) for g in live], axis=0) + pad
    return lo, tuple(int(s) for s in hi - lo)


def _check_compatible(*grids):
    h = grids[0].h
    d = grids[0].dim
    for g in grids[1:]:
        if g.dim != d:
            raise IncompatibleGridsError(f"grids of dimension {d} and {g.dim}")
        if abs(g.h - h) > 1e-12 * h:
            raise IncompatibleGridsError(f"cell sizes {h!r} and {g.h!r} differ")


def compact(g, margin=MARGIN):
    """Shrink the stored box to the occupied cells plus ``margin``."""
    return from_indices(g.indices(), g.h, g.dim, margin)


def _with_array(g, occ, offset):
    return compact(GriddedSet(g.h, offset, occ))


def union(*grids):
    _check_compatible(*grids)
    off, shape = _common_box(grids)
    occ = np.zeros(shape, dtype=bool)
    for g in grids:
        occ |= embed(g, off, shape)
    return compact(GriddedSet(grids[0].h, off, occ))


def difference(a, b):
    _check_compatible(a, b)
    off, shape = _common_box([a, b])
    return compact(GriddedSet(a.h, off, embed(a, off, shape) & ~embed(b, off, shape)))


def is_subset(a, b):
    _check_compatible(a, b)
    off, shape = _common_box([a, b])
    return not np.any(embed(a, off, shape) & ~embed(b, off, shape))


def clip_to_window(g, radius):
    """Keep cells whose centers lie in ``[-radius, radius]^d``."""
    if g.is_empty():
        return g
    idx = g.indices()
    c = (idx + 0.5) * g.h
    keep = np.all(np.abs(c) <= radius + 1e-12, axis=1)
    return from_indices(idx[keep], g.h, g.dim)


def rasterize(cloud, h=None):
    """Mark every cell containing at least one point; the stored box is the
    bounding box of the points inflated by two cells."""
    if isinstance(cloud, PointCloudSet):
        P, h = cloud.points, h or cloud.h
    else:
        P = as_points(cloud)
    if not (h and h > 0):
        raise ToolkitError("rasterize needs a positive cell size")
    if len(P) == 0:
        return empty_grid(P.shape[1], h)
    if not np.all(np.isfinite(P)):
        raise ToolkitError("cannot rasterize non-finite points")
    idx = np.floor(P / h + TIE).astype(np.int64)
    return from_indices(np.unique(idx, axis=0), h, P.shape[1])


@dataclass(frozen=True)
class AffineHullModel:
    base_point: np.ndarray
    basis: np.ndarray
    dim_aff: int
    rank_tol: float
    max_residual: float = 0.0

    def coordinates(self, P):
        return (np.asarray(P, dtype=float) - self.base_point) @ self.basis.T


def _hull_from_points(P, keep):
    base = P.mean(axis=0)
    C = P - base
    if len(P) < 2:
        return base, np.zeros((0, P.shape[1])), C
    _, s, Vt = np.linalg.svd(C, full_matrices=False)
    return base, Vt[keep(C, s, Vt)], C


def affine_hull(cloud, rank_tol=1e-8):
    """Orthonormal model of ``aff`` of a point cloud.

    Directions whose singular value is below ``rank_tol`` times the largest
    one are dropped.
    """
    P = cloud.points if isinstance(cloud, PointCloudSet) else as_points(cloud)
    if len(P) == 0:
        raise ToolkitError("affine hull of an empty cloud is undefined")

    def keep(C, s, Vt):
        if s[0] == 0:
            return np.zeros(len(s), dtype=bool)
        return s > rank_tol * s[0]

    base, B, C = _hull_from_points(P, keep)
    resid = C - (C @ B.T) @ B if len(B) else C
    return AffineHullModel(base, B, B.shape[0], rank_tol, float(np.linalg.norm(resid, axis=1).max()))


def grid_affine_hull(g, thickness_cells=2.0):
    """Affine hull of a grid's cell centers at resolution ``h``.

    A principal direction is kept only if the centers extend more than
    ``thickness_cells`` cells along it; thinner sets are lower-dimensional at
    this resolution.
    """
    P = g.centers()
    if len(P) == 0:
        raise ToolkitError("affine hull of an empty grid is undefined")
    lim = thickness_cells * g.h * (1 + 1e-9)

    def keep(C, s, Vt):
        ext = np.ptp(C @ Vt.T, axis=0)
        return ext > lim

    base, B, C = _hull_from_points(P, keep)
    resid = C - (C @ B.T) @ B if len(B) else C
    return AffineHullModel(base, B, B.shape[0], lim, float(np.linalg.norm(resid, axis=1).max()))


def _structure(d):
    return ndimage.generate_binary_structure(d, 1)


def _padded(g, pad):
    off = g.offset - pad
    shape = tuple(int(s) + 2 * pad for s in g.occupancy.shape)
    return embed(g, off, shape), off


def dilate_grid(g, cells=1):
    if g.is_empty():
        return g
    occ, off = _padded(g, cells + 1)
    return _with_array(g, ndimage.binary_dilation(occ, _structure(g.dim), iterations=cells), off)


def erode_grid(g, cells=1):
    if g.is_empty():
        return g
    occ, off = _padded(g, 1)
    return _with_array(g, ndimage.binary_erosion(occ, _structure(g.dim), iterations=cells, border_value=0), off)


def closure_grid(g):
    """Morphological closing by one cell (dilate, then erode)."""
    if g.is_empty():
        return g
    occ, off = _padded(g, 3)
    s = _structure(g.dim)
    closed = ndimage.binary_erosion(ndimage.binary_dilation(occ, s), s, border_value=0)
    return _with_array(g, closed, off)


def relative_interior_grid(g, hull=None):
    """One-cell erosion inside the affine hull.

    Full-dimensional sets are eroded directly. Lower-dimensional ones are
    re-gridded in hull coordinates (cell size ``h * max ||b||_1`` over the
    basis, so a rasterized flat has no gaps), eroded there, and mapped back;
    a point stays a point.
    """
    if g.is_empty():
        return g
    hull = hull if hull is not None else grid_affine_hull(g)
    k = hull.dim_aff
    if k == g.dim:
        return erode_grid(g)
    if k == 0:
        return g
    idx = g.indices()
    t = hull.coordinates((idx + 0.5) * g.h)
    hf = g.h * float(np.abs(hull.basis).sum(axis=1).max())
    fidx = np.floor(t / hf + TIE).astype(np.int64)
    lo = fidx.min(axis=0) - 1
    shape = tuple(fidx.max(axis=0) - lo + 2)
    flat = np.zeros(shape, dtype=bool)
    flat[tuple((fidx - lo).T)] = True
    inner = ndimage.binary_erosion(flat, _structure(k), border_value=0)
    keep = inner[tuple((fidx - lo).T)]
    return from_indices(idx[keep], g.h, g.dim)


def _monotone_chain(P):
    """Counter-clockwise hull vertices of distinct 2-D points."""
    P = sorted(map(tuple, P))
    if len(P) <= 2:
        return np.array(P)

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in P:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(P):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1])


def _halfspaces(P):
    """``(normals, offsets)`` with ``normals @ x <= offsets`` on ``conv P``
    (full-dimensional ``P`` in 2-D or 3-D)."""
    d = P.shape[1]
    if d == 2:
        V = _monotone_chain(P)
        E = np.roll(V, -1, axis=0) - V
        N = np.column_stack([E[:, 1], -E[:, 0]])
    else:
        hull = ConvexHull(P)
        N = hull.equations[:, :d]
        V = P[hull.simplices[:, 0]]
    N = N / np.linalg.norm(N, axis=1, keepdims=True)
    return N, np.einsum("ij,ij->i", N, V)


def _fill_halfspaces(N, b, lo_idx, hi_idx, h):
    """Cells in the index box whose centers satisfy ``N c <= b`` (up to 1e-9 h).

    Scans lines along the last axis and solves each for an interval.
    """
    d = len(lo_idx)
    eps = 1e-9 * h
    axes = [np.arange(lo_idx[i], hi_idx[i] + 1) for i in range(d - 1)]
    grids = np.meshgrid(*axes, indexing="ij")
    C = np.column_stack([(a.ravel() + 0.5) * h for a in grids])
    rhs = b[None, :] - C @ N[:, :-1].T + eps
    a = N[:, -1]
    with np.errstate(divide="ignore", invalid="ignore"):
        bound = rhs / a[None, :]
    up = np.where(a[None, :] > 0, bound, np.inf).min(axis=1)
    dn = np.where(a[None, :] < 0, bound, -np.inf).max(axis=1)
    flat_ok = np.all(np.where(a[None, :] == 0, rhs >= 0, True), axis=1)
    kmin = np.clip(np.ceil(dn / h - 0.5 - TIE), lo_idx[-1], hi_idx[-1]).astype(np.int64)
    kmax = np.clip(np.floor(up / h - 0.5 + TIE), lo_idx[-1], hi_idx[-1]).astype(np.int64)
    live = flat_ok & (kmax >= kmin)
    lens = (kmax - kmin + 1)[live]
    if lens.sum() == 0:
        return np.zeros((0, d), dtype=np.int64)
    heads = np.column_stack([a.ravel() for a in grids]).astype(np.int64)[live]
    starts = np.repeat(np.cumsum(lens) - lens, lens)
    ks = np.repeat(kmin[live], lens) + (np.arange(lens.sum()) - starts)
    return np.column_stack([np.repeat(heads, lens, axis=0), ks])


def _fill_polytope(P, h):
    """Global indices of cells whose centers lie in ``conv P``; ``P`` is
    full-dimensional in its ambient space (d = 1, 2 or 3)."""
    d = P.shape[1]
    if d == 1:
        ks = np.arange(math.floor(P.min() / h + TIE), math.floor(P.max() / h + TIE) + 1)
        return ks[:, None]
    N, b = _halfspaces(P)
    lo = np.floor(P.min(axis=0) / h + TIE).astype(np.int64)
    hi = np.floor(P.max(axis=0) / h + TIE).astype(np.int64)
    return _fill_halfspaces(N, b, lo, hi, h)


def polytope_grid(points, h):
    """Rasterized convex hull of a full-dimensional point set (d <= 3)."""
    P = as_points(points)
    if P.shape[1] > 3:
        raise UnsupportedDimensionError("polytope rasterization is limited to d <= 3")
    return from_indices(_fill_polytope(P, h), h, P.shape[1])


def disk_grid(center, radius, h, n_vertices=64):
    """Cells of a disk, through its inscribed regular polygon."""
    t = 2 * np.pi * np.arange(n_vertices) / n_vertices
    c = as_vector(center, 2, "center")
    return polytope_grid(c + radius * np.column_stack([np.cos(t), np.sin(t)]), h)


def convex_hull_grid(g):
    """Cells of the convex hull of the occupied cell centers (``d <= 3``)."""
    if g.dim > 3:
        raise UnsupportedDimensionError("convex hulls are supported for d <= 3 only")
    if g.is_empty():
        return g
    idx = g.indices()
    P = (idx + 0.5) * g.h
    exact = affine_hull(P, rank_tol=1e-9)
    k = exact.dim_aff
    if k == g.dim:
        filled = _fill_polytope(P, g.h)
    elif k == 0:
        filled = idx
    else:
        # lower-dimensional hull: fill it in flat coordinates on a lattice of
        # spacing h/4, map the samples back and rasterize them
        T = exact.coordinates(P)
        step = g.h / 4
        inner = _fill_polytope(T, step)
        S = exact.base_point + ((inner + 0.5) * step) @ exact.basis
        S = np.vstack([S, P])
        filled = np.floor(S / g.h + TIE).astype(np.int64)
    return from_indices(np.unique(np.vstack([filled, idx]), axis=0), g.h, g.dim)


def minkowski_combination(sets, weights, budget=PAIR_BUDGET):
    """Rasterized ``sum_i w_i A_i`` over occupied cell centers.

    Two summands are combined exactly; with more, intermediate sums are kept
    on a lattice four times finer than ``h``. Cells are represented by their
    centers, so ``A + {0}`` reproduces ``A`` cell for cell.
    """
    sets = list(sets)
    w = [float(v) for v in np.asarray(weights, dtype=float).reshape(-1)]
    if not sets or len(sets) != len(w):
        raise ToolkitError("need one weight per set")
    _check_compatible(*sets)
    h, d = sets[0].h, sets[0].dim
    if any(s.is_empty() for s in sets):
        return empty_grid(d, h)
    ops = 1
    for s in sets[1:]:
        ops *= s.count
    ops *= sets[0].count
    if ops > budget:
        raise BudgetExceededError(
            f"{ops:.3g} pair operations exceed the budget of {budget:.3g}; use a coarser h"
        )
    # cells stand for their centers; with sum(w) != 1 the sum of centers drifts
    # by (sum(w) - 1) * h / 2 off the center lattice, so take that back out
    P = w[0] * sets[0].centers() - (sum(w) - 1.0) * h / 2
    for i, s in enumerate(sets[1:], start=1):
        C = s.centers()
        cell = h if i == len(sets) - 1 else h / 4
        lo = P.min(axis=0) + np.minimum(w[i] * C.min(axis=0), w[i] * C.max(axis=0))
        hi = P.max(axis=0) + np.maximum(w[i] * C.min(axis=0), w[i] * C.max(axis=0))
        off = np.floor(lo / cell + TIE).astype(np.int64) - MARGIN
        shape = np.floor(hi / cell + TIE).astype(np.int64) - off + 1 + MARGIN
        occ = kernels.minkowski_mark(P, 1.0, C, w[i], cell, off, shape)
        if i == len(sets) - 1:
            return compact(GriddedSet(h, off, occ))
        P = (np.argwhere(occ) + off + 0.5) * cell
    return rasterize(P, h)


def directed_hausdorff(a, b):
    """``max_{cell in a} dist(cell, b)`` in the ambient length unit."""
    _check_compatible(a, b)
    if a.is_empty():
        return 0.0
    if b.is_empty():
        return math.inf
    off, shape = _common_box([a, b], pad=1)
    A = embed(a, off, shape)
    B = embed(b, off, shape)
    D = ndimage.distance_transform_edt(~B)
    return float(D[A].max()) * a.h


def hausdorff_distance(a, b):
    if a.is_empty() and b.is_empty():
        return 0.0
    return max(directed_hausdorff(a, b), directed_hausdorff(b, a))


def near_equal(a, b, tol_cells=DEFAULT_TOL_CELLS):
    """Closures and relative interiors both within ``tol_cells * h`` in Hausdorff distance."""
    _check_compatible(a, b)
    dc = hausdorff_distance(closure_grid(a), closure_grid(b))
    dr = hausdorff_distance(relative_interior_grid(a), relative_interior_grid(b))
    tol = tol_cells * a.h
    ok = dc <= tol * (1 + 1e-12) and dr <= tol * (1 + 1e-12)
    return ok, {
        "closure_hausdorff": dc,
        "ri_hausdorff": dr,
        "tolerance": tol,
        "tol_cells": tol_cells,
        "h": a.h,
    }


def nearly_convex(g, tol_cells=DEFAULT_TOL_CELLS):
    """Check ``ri conv g`` against ``g`` cell by cell.

    Returns ``(ok, witness)``; the witness describes the hull-interior cell
    farthest from ``g`` and is ``None`` when every such cell is within
    ``tol_cells``.
    """
    if g.dim > 3:
        raise UnsupportedDimensionError("near convexity is checked for d <= 3 only")
    if g.is_empty():
        return True, None
    R = relative_interior_grid(convex_hull_grid(g))
    if R.is_empty():
        return True, None
    off, shape = _common_box([g, R], pad=1)
    G = embed(g, off, shape)
    D = ndimage.distance_transform_edt(~G)
    rmask = embed(R, off, shape)
    cells = np.argwhere(rmask)
    dist = D[rmask]
    i = int(dist.argmax())
    worst = float(dist[i])
    if worst <= tol_cells:
        return True, None
    return False, {
        "cell": (cells[i] + off).tolist(),
        "center": ((cells[i] + off + 0.5) * g.h).tolist(),
        "distance_cells": worst,
    }


def to_csv(g, path):
    """Every stored cell as ``x, y[, z], occupied`` with cell-center coordinates."""
    names = ["x", "y", "z"][: g.dim] if g.dim <= 3 else [f"x{i}" for i in range(g.dim)]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names + ["occupied"])
        for k in np.ndindex(*g.occupancy.shape):
            c = (np.asarray(k) + g.offset + 0.5) * g.h
            w.writerow([repr(float(v)) for v in c] + [int(g.occupancy[k])])


def to_pbm(g):
    """Plain-text portable bitmap, ``y`` increasing upward; 3-D grids are
    stacked ``z`` slices."""
    occ = g.occupancy
    if g.dim == 1:
        img = occ[None, :]
    elif g.dim == 2:
        img = occ.T[::-1]
    elif g.dim == 3:
        img = np.vstack([occ[:, :, z].T[::-1] for z in range(occ.shape[2])])
    else:
        raise UnsupportedDimensionError("bitmap export supports d <= 3")
    lines = ["P1", f"# h={g.h!r} offset={g.offset.tolist()}", f"{img.shape[1]} {img.shape[0]}"]
    lines += [" ".join("1" if v else "0" for v in row) for row in img]
    return "\n".join(lines) + "\n"
