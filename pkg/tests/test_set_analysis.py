import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from resolventkit import set_analysis as sa
from resolventkit.errors import BudgetExceededError, UnsupportedDimensionError

H = 1e-3


def seg(a, b, h=H):
    return sa.rasterize(np.linspace(a, b, int(round((b - a) / h)) * 2 + 1)[:, None], h)


def block(lo, hi, h=0.1):
    return sa.polytope_grid([[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]], h)


def test_tie_rule():
    g = sa.rasterize([[1.0]], 0.5)
    assert g.indices().tolist() == [[2]]
    assert g.contains_point([1.0]) and not g.contains_point([0.99])


def test_minkowski_intervals():
    m = sa.minkowski_combination([seg(0, 1), seg(2, 3)], [0.5, 0.5])
    assert sa.hausdorff_distance(m, seg(1, 2)) == 0.0


def test_minkowski_identity_element():
    A = block([0, 0], [1, 1])
    zero = sa.rasterize([[0.0, 0.0]], 0.1)
    assert sa.hausdorff_distance(sa.minkowski_combination([A, zero], [1, 1]), A) == 0.0


def test_minkowski_disk_halves():
    D = sa.disk_grid([0, 0], 1.0, 0.05)
    assert sa.near_equal(sa.minkowski_combination([D, D], [0.5, 0.5]), D, 2)[0]


def test_minkowski_three_sets():
    m = sa.minkowski_combination([seg(0, 1, 0.01), seg(2, 3, 0.01), seg(4, 5, 0.01)], [0.25, 0.25, 0.5])
    assert sa.near_equal(m, seg(2.5, 3.5, 0.01), 2)[0]


def test_minkowski_budget():
    with pytest.raises(BudgetExceededError, match="coarser"):
        sa.minkowski_combination([seg(0, 1), seg(0, 1)], [0.5, 0.5], budget=1000)


def test_half_open_interval_near_equal():
    half_open = sa.from_indices(seg(0, 1).indices()[:-1], H)
    assert sa.near_equal(half_open, seg(0, 1))[0]


def test_isolated_point_breaks_near_equality():
    A = sa.union(sa.rasterize([[0.0]], H), seg(1, 2))
    ok, m = sa.near_equal(A, seg(1, 2))
    assert not ok and m["closure_hausdorff"] == pytest.approx(1.0, abs=2 * H)


def test_incompatible_grids():
    with pytest.raises(sa.IncompatibleGridsError):
        sa.near_equal(seg(0, 1, 0.1), seg(0, 1, 0.2))


def test_segment_relative_interior():
    P = np.column_stack([np.linspace(0, 1, 401), np.zeros(401)])
    g = sa.rasterize(P, 0.01)
    hull = sa.grid_affine_hull(g)
    assert hull.dim_aff == 1
    ri = sa.relative_interior_grid(g)
    assert ri.count == g.count - 2


def test_square_interior_and_singleton():
    sq = block([0, 0], [1, 1])
    assert sa.relative_interior_grid(sq).count == sa.erode_grid(sq).count
    pt = sa.rasterize([[0.3, 0.3]], 0.1)
    assert sa.relative_interior_grid(pt).count == 1


def test_affine_hull_of_cloud():
    P = np.array([[0, 0, 0], [1, 1, 0], [2, 2, 0]], dtype=float)
    assert sa.affine_hull(P).dim_aff == 1
    assert sa.affine_hull(np.eye(3)).dim_aff == 2


def test_convex_hull_cases():
    two = sa.rasterize([[0.0, 0.0], [1.0, 0.5]], 0.05)
    seg_hull = sa.convex_hull_grid(two)
    assert seg_hull.count > 20 and sa.grid_affine_hull(seg_hull).dim_aff == 1
    corners = sa.rasterize([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]], 0.1)
    sq = sa.convex_hull_grid(corners)
    assert sq.count == 11 * 11
    D = sa.disk_grid([0, 0], 1.0, 0.05)
    assert sa.hausdorff_distance(sa.convex_hull_grid(D), D) <= 0.05


def test_convex_hull_3d():
    P = np.random.default_rng(0).uniform(-1, 1, (30, 3))
    g = sa.rasterize(P, 0.1)
    hull = sa.convex_hull_grid(g)
    assert sa.is_subset(g, hull) and hull.count > g.count


def test_high_dim_rejected():
    g = sa.rasterize(np.zeros((1, 4)), 0.1)
    with pytest.raises(UnsupportedDimensionError):
        sa.convex_hull_grid(g)
    with pytest.raises(UnsupportedDimensionError):
        sa.nearly_convex(g)


def test_nearly_convex_cases():
    assert sa.nearly_convex(block([0, 0], [1, 1]))[0]
    two = sa.union(block([0, 0], [1, 1]), block([3, 0], [4, 1]))
    ok, w = sa.nearly_convex(two)
    assert not ok and 1.0 < w["center"][0] < 3.0
    sq = block([0, 0], [1, 1])
    idx = sq.indices()
    no_edge = sa.from_indices(idx[idx[:, 0] != idx[:, 0].max()], 0.1)
    assert sa.nearly_convex(no_edge)[0]


def test_sum_absorbs_full_space():
    big = block([-6, -6], [6, 6], h=0.25)
    small = sa.disk_grid([3, 3], 0.5, 0.25)
    m = sa.clip_to_window(sa.minkowski_combination([big, small], [0.5, 0.5]), 1.0)
    window = block([-1, -1], [1, 1], h=0.25)
    assert sa.is_subset(sa.clip_to_window(window, 1.0), m)


def test_export(tmp_path):
    g = block([0, 0], [0.3, 0.2])
    sa.to_csv(g, tmp_path / "g.csv")
    lines = (tmp_path / "g.csv").read_text().splitlines()
    assert lines[0] == "x,y,occupied"
    assert sum(l.endswith(",1") for l in lines[1:]) == g.count
    pbm = sa.to_pbm(g).splitlines()
    assert pbm[0] == "P1" and sum(l.count("1") for l in pbm[3:]) == g.count


shapes = st.integers(0, 10_000)


def _shape(seed, h=0.1):
    from resolventkit.scenarios import random_convex_shape

    return random_convex_shape(np.random.default_rng(seed), h)


@given(shapes)
def test_squeeze(seed):
    C = _shape(seed)
    ri, cl = sa.relative_interior_grid(C), sa.closure_grid(C)
    rim = sa.difference(cl, ri)
    keep = rim.occupancy & (np.random.default_rng(seed).random(rim.occupancy.shape) < 0.5)
    S = sa.union(ri, sa.GriddedSet(C.h, rim.offset, keep))
    assert sa.near_equal(S, C, 3)[0]


@given(shapes)
def test_closure_interior_hull_stability(seed):
    g = _shape(seed)
    forms = [g, sa.closure_grid(g), sa.relative_interior_grid(g), sa.convex_hull_grid(g)]
    for i in range(4):
        for j in range(i + 1, 4):
            assert sa.near_equal(forms[i], forms[j], 3)[0]


@given(shapes, st.floats(0.2, 0.8))
def test_minkowski_ri_distribution(seed, lam):
    A, B = _shape(seed), _shape(seed + 1)
    lhs = sa.relative_interior_grid(sa.minkowski_combination([A, B], [lam, 1 - lam]))
    rhs = sa.minkowski_combination([sa.relative_interior_grid(A), sa.relative_interior_grid(B)], [lam, 1 - lam])
    assert sa.near_equal(lhs, rhs, 3)[0]


@given(shapes, st.integers(0, 4))
def test_cancellation(seed, variant):
    A = _shape(seed)
    B = [A, sa.erode_grid(A), sa.dilate_grid(A), _shape(seed + 7), sa.GriddedSet(A.h, A.offset + 1, A.occupancy)][variant]
    E = sa.disk_grid([0, 0], 0.25, A.h)
    if sa.near_equal(sa.minkowski_combination([A, E], [1, 1]), sa.minkowski_combination([B, E], [1, 1]), 2)[0]:
        assert sa.near_equal(A, B, 3)[0]
