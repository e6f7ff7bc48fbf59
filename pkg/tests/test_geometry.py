import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial import ConvexHull
from scipy.spatial.distance import directed_hausdorff as scipy_directed

from torusrot.geometry import (
    ConvexRegion,
    EmptyInput,
    RegionMeetsInfinityLine,
    apply_hat_region,
    box,
    hausdorff,
    hull,
    inflate,
    line_region_distance,
)
from torusrot.projective import IntMatrix3, PlanarLine, apply_hat, pullback_infinity_line

from conftest import L_SHEAR, L_WORKED

points = st.lists(
    st.tuples(st.floats(-10, 10, allow_nan=False), st.floats(-10, 10, allow_nan=False)),
    min_size=1,
    max_size=30,
)


def random_polygon(rng, n=None):
    n = n or int(rng.integers(1, 12))
    return hull(rng.normal(size=(n, 2)) * rng.uniform(0.1, 3) + rng.uniform(-2, 2, size=2))


def boundary_samples(A: ConvexRegion, per_edge=400):
    v = A.vertices
    if len(v) == 1:
        return v
    w = np.roll(v, -1, axis=0)
    t = np.linspace(0, 1, per_edge, endpoint=False)[:, None, None]
    return (v[None] + t * (w - v)[None]).reshape(-1, 2)


def test_hull_examples():
    H = hull([(0, 0), (1, 0), (0, 1), (0.2, 0.2)])
    assert sorted(map(tuple, H.vertices.tolist())) == [(0, 0), (0, 1), (1, 0)]
    assert hull([(3, 4)]).is_point
    assert hull([(0, 0), (1, 1), (2, 2), (0.5, 0.5)]).is_segment
    theta = np.linspace(0, 2 * np.pi, 1000, endpoint=False)
    circle = hull(np.column_stack([np.cos(theta), np.sin(theta)]))
    assert abs(circle.area() - math.pi) < 1e-2
    with pytest.raises(EmptyInput):
        hull([])


def test_hull_is_ccw_and_strictly_convex(rng):
    for _ in range(50):
        H = random_polygon(rng, 20)
        v = H.vertices
        if len(v) < 3:
            continue
        a, b, c = v, np.roll(v, -1, 0), np.roll(v, -2, 0)
        cross = (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])
        assert np.all(cross > 0)


def test_hull_matches_qhull(rng):
    pts = rng.normal(size=(500, 2))
    ours = hull(pts)
    ref = ConvexHull(pts)
    assert len(ours) == len(ref.vertices)
    assert abs(ours.area() - ref.volume) < 1e-12


def test_translation_samples_are_collinear():
    # 0.1 * k is not exact in binary, yet the hull must see a segment
    pts = np.array([[0.1 * k, 0.3 * k] for k in range(50)])
    assert hull(pts).is_segment


@settings(max_examples=200, deadline=None)
@given(points)
def test_hull_idempotent(pts):
    H = hull(pts)
    again = hull(H.vertices)
    assert len(again) == len(H)
    assert hausdorff(H, again) == 0


def test_hausdorff_examples():
    sq = box(0, 1, 0, 1)
    assert hausdorff(sq, sq) == 0
    assert hausdorff(sq, sq.translated([0.1, 0])) == pytest.approx(0.1, abs=1e-15)
    assert hausdorff(hull([(0, 0)]), hull([(1, 0), (1, 1)])) == pytest.approx(math.sqrt(2))
    # filled regions: a point inside the square is at distance 0 from it one way
    assert hausdorff(sq, hull([(0.5, 0.5)])) == pytest.approx(math.sqrt(0.5))


def test_hausdorff_example_point_segment_nearest():
    # the nearest point of the segment to the origin is (1, 0)
    B = hull([(1, 0), (1, 1)])
    assert B.distance([[0, 0]])[0] == 1.0


def test_hausdorff_against_dense_sampling(rng):
    # boundary samples of a filled convex set give the right Hausdorff
    # distance only one way, so compare against points-to-region distances
    for _ in range(20):
        A, B = random_polygon(rng), random_polygon(rng)
        sa, sb = boundary_samples(A), boundary_samples(B)
        dense = max(B.distance(sa).max(), A.distance(sb).max())
        assert hausdorff(A, B) == pytest.approx(dense, abs=1e-12)
        # and when both are far apart the boundary-to-boundary value agrees
        if A.distance(B.vertices).min() > 0 and B.distance(A.vertices).min() > 0:
            ref = max(scipy_directed(sa, sb)[0], scipy_directed(sb, sa)[0])
            assert hausdorff(A, B) <= ref + 1e-12


def test_hausdorff_metric_axioms(rng):
    for _ in range(100):
        A, B, C = random_polygon(rng), random_polygon(rng), random_polygon(rng)
        assert hausdorff(A, A) == 0
        assert abs(hausdorff(A, B) - hausdorff(B, A)) <= 1e-12
        assert hausdorff(A, C) <= hausdorff(A, B) + hausdorff(B, C) + 1e-12


def test_inflate_examples():
    disk = inflate(hull([(0, 0)]), 1.0)
    assert len(disk) >= 64 and disk.area() >= math.pi
    theta = np.linspace(0, 2 * np.pi, 720, endpoint=False)
    assert np.all(disk.contains(np.column_stack([np.cos(theta), np.sin(theta)])))
    sq = box(0, 1, 0, 1)
    assert inflate(sq, 0) is sq
    rounded = inflate(sq, 0.5)
    assert np.abs(rounded.vertices).max() <= 1.5 + 0.005
    assert np.abs(rounded.vertices).max() >= 1.5 - 1e-12
    # the true rounded square: square corners plus half-disks on every side
    corners = sq.vertices[:, None, :] + 0.5 * np.column_stack([np.cos(theta), np.sin(theta)])[None]
    assert np.all(rounded.contains(corners.reshape(-1, 2)))
    with pytest.raises(ValueError):
        inflate(sq, -1)


def test_inflate_error_bound(rng):
    for _ in range(20):
        A = random_polygon(rng)
        r = float(rng.uniform(0.01, 2))
        out = inflate(A, r)
        # every vertex of the outer polygon is within r + r/100 of A
        assert A.distance(out.vertices).max() <= r * 1.01


@settings(max_examples=100, deadline=None)
@given(points, st.floats(0, 5))
def test_inflate_monotone(pts, r):
    A = hull(pts)
    assert inflate(A, r).contains_region(A)


def test_line_distance_examples():
    x1 = PlanarLine(1, 0, -1)
    assert line_region_distance(x1, hull([(0, 0), (0.5, 0), (0, 0.5)])) == 0.5
    assert line_region_distance(x1, box(0, 2, 0, 2)) == 0
    assert line_region_distance(PlanarLine(0, 1, 0), hull([(0, 0.25)])) == 0.25
    assert line_region_distance(pullback_infinity_line(L_SHEAR), box(0, 1, 0, 1)) == math.inf


def test_apply_hat_region_examples():
    A = random_polygon(np.random.default_rng(1))
    assert hausdorff(apply_hat_region(IntMatrix3.identity(), A), A) == 0
    img = apply_hat_region(L_WORKED, hull([(0.5, 1 / 3)]))
    assert img.is_point
    np.testing.assert_allclose(img.vertices[0], [1, 2 / 3], atol=1e-12)
    para = apply_hat_region(L_SHEAR, box(0, 1, 0, 1))
    assert hausdorff(para, hull([(0, 0), (1, 0), (2, 1), (1, 1)])) == 0
    with pytest.raises(RegionMeetsInfinityLine):
        apply_hat_region(L_WORKED, box(0, 2, 0, 2))


def test_apply_hat_region_commutes_with_hull(rng):
    from torusrot.projective import random_sl3z

    done = 0
    while done < 100:
        L = random_sl3z(rng)
        pts = rng.uniform(-1, 1, size=(15, 2))
        line = pullback_infinity_line(L)
        if line_region_distance(line, hull(pts)) < 0.05:
            continue
        lhs = hull(apply_hat(L, pts))
        rhs = apply_hat_region(L, hull(pts))
        assert hausdorff(lhs, rhs) <= 1e-9 * (1 + lhs.max_norm())
        done += 1


def test_region_vertices_are_read_only():
    H = box(0, 1, 0, 1)
    with pytest.raises(ValueError):
        H.vertices[0, 0] = 5


def test_thin_vertical_sets_keep_their_extent():
    # x-spread at rounding level must not decide the hull's end points
    A = hull([(0, 0), (0, 0.125)])
    tiny = inflate(A, 2.220446049250313e-16)
    assert tiny.contains_region(A)
    rng = np.random.default_rng(5)
    pts = np.column_stack([rng.normal(scale=1e-17, size=200), rng.uniform(0, 1, size=200)])
    H = hull(pts)
    assert H.is_segment
    assert H.bbox()[2] == pts[:, 1].min() and H.bbox()[3] == pts[:, 1].max()
