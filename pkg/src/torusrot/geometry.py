"""Planar convex geometry on filled convex polygons.

A :class:`ConvexRegion` is the convex hull of its vertex list, which may
degenerate to a segment (two vertices) or a single point.  Every operation
treats regions as filled sets.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .projective import (
    EMPTY_IN_PLANE,
    EmptyInPlane,
    IntMatrix3,
    PlanarLine,
    apply_hat,
    pullback_infinity_line,
)

COLLINEAR_TOL = 1e-12
DISK_ARCS = 64


class EmptyInput(ValueError):
    pass


class RegionMeetsInfinityLine(ValueError):
    pass


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _collinear_extremes(pts: np.ndarray, tol: float) -> np.ndarray | None:
    """End points of ``pts`` if they all lie within ``tol`` of a line, else None.

    The monotone chain orders points by x, which breaks down for a nearly
    vertical set whose x-spread is rounding noise, so this case is settled
    first along the set's own long direction.
    """
    a = pts[0]
    b = pts[np.argmax(((pts - a) ** 2).sum(1))]
    c = pts[np.argmax(((pts - b) ** 2).sum(1))]
    d = c - b
    cross = d[0] * (pts[:, 1] - b[1]) - d[1] * (pts[:, 0] - b[0])
    if np.max(np.abs(cross)) > tol:
        return None
    t = (pts - b) @ d
    ends = pts[[np.argmin(t), np.argmax(t)]]
    return ends[np.lexsort((ends[:, 1], ends[:, 0]))]


def _monotone_chain(pts: np.ndarray, tol: float) -> np.ndarray:
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    p = [tuple(x) for x in pts[order]]

    def half(seq):
        out = []
        for q in seq:
            while len(out) >= 2 and _cross(out[-2], out[-1], q) <= tol:
                out.pop()
            out.append(q)
        return out

    lower = half(p)
    upper = half(reversed(p))
    return np.array(lower[:-1] + upper[:-1])


@dataclass(frozen=True, eq=False)
class ConvexRegion:
    """Filled convex polygon with CCW vertices (or a point / segment)."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float).reshape(-1, 2)
        if len(v) == 0:
            raise EmptyInput("a region needs at least one vertex")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def is_point(self) -> bool:
        return len(self.vertices) == 1

    @property
    def is_segment(self) -> bool:
        return len(self.vertices) == 2

    def area(self) -> float:
        if len(self.vertices) < 3:
            return 0.0
        x, y = self.vertices[:, 0], self.vertices[:, 1]
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))

    def diameter(self) -> float:
        v = self.vertices
        if len(v) == 1:
            return 0.0
        d = v[:, None, :] - v[None, :, :]
        return float(np.sqrt((d**2).sum(-1)).max())

    def bbox(self) -> tuple[float, float, float, float]:
        lo, hi = self.vertices.min(0), self.vertices.max(0)
        return float(lo[0]), float(hi[0]), float(lo[1]), float(hi[1])

    def max_norm(self) -> float:
        """Largest Euclidean norm of a point of the region."""
        return float(np.hypot(self.vertices[:, 0], self.vertices[:, 1]).max())

    def centroid(self) -> np.ndarray:
        return self.vertices.mean(0)

    def scaled(self, k: float) -> "ConvexRegion":
        if k == 0:
            return ConvexRegion(np.zeros((1, 2)))
        # negative scaling is a half-turn, so CCW order survives
        return ConvexRegion(self.vertices * k)

    def translated(self, v) -> "ConvexRegion":
        return ConvexRegion(self.vertices + np.asarray(v, dtype=float))

    def distance(self, pts) -> np.ndarray:
        """Euclidean distance from each point to the filled region."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        v = self.vertices
        if len(v) == 1:
            return np.hypot(*(pts - v[0]).T)
        a = v
        b = np.roll(v, -1, axis=0) if len(v) > 2 else v[[1]]
        if len(v) == 2:
            a = v[[0]]
        ab = b - a
        ap = pts[:, None, :] - a[None, :, :]
        denom = np.maximum((ab**2).sum(-1), np.finfo(float).tiny)
        t = np.clip((ap * ab[None]).sum(-1) / denom[None], 0.0, 1.0)
        closest = a[None] + t[..., None] * ab[None]
        dist = np.sqrt(((pts[:, None, :] - closest) ** 2).sum(-1)).min(1)
        # direct vertex distances keep d(vertex, region) exactly zero
        dist = np.minimum(dist, np.sqrt(((pts[:, None, :] - v[None]) ** 2).sum(-1)).min(1))
        if len(v) > 2:
            cross = ab[None, :, 0] * ap[..., 1] - ab[None, :, 1] * ap[..., 0]
            inside = np.all(cross >= 0, axis=1)
            dist = np.where(inside, 0.0, dist)
        return dist

    def contains(self, pts, tol: float = 1e-9) -> np.ndarray:
        return self.distance(pts) <= tol

    def contains_region(self, other: "ConvexRegion", tol: float = 1e-9) -> bool:
        return bool(np.all(self.contains(other.vertices, tol)))

    def __repr__(self) -> str:
        return f"ConvexRegion({self.vertices.tolist()})"


def hull(points) -> ConvexRegion:
    """Convex hull of a finite point set, CCW, without collinear vertices.

    Degenerate inputs give a segment or a single point.  Cross products at or
    below ``COLLINEAR_TOL * scale^2`` count as collinear.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        raise EmptyInput("hull of an empty point set")
    if not np.all(np.isfinite(pts)):
        raise ValueError("hull input contains non-finite coordinates")
    pts = np.unique(pts, axis=0)
    lo, hi = pts.min(0), pts.max(0)
    scale = float(np.max(hi - lo))
    if len(pts) == 1 or scale == 0.0:
        return ConvexRegion(pts[:1])
    if len(pts) > 64:
        try:
            pts = pts[np.sort(ConvexHull(pts).vertices)]
        except QhullError:
            pass
    tol = COLLINEAR_TOL * scale * scale
    v = _collinear_extremes(pts, tol)
    if v is None:
        v = _monotone_chain(pts, tol)
    if len(v) == 2 and np.max(np.abs(v[0] - v[1])) <= COLLINEAR_TOL * scale:
        v = v[:1]
    return ConvexRegion(v)


def box(xmin: float, xmax: float, ymin: float, ymax: float) -> ConvexRegion:
    return hull([[xmin, ymin], [xmax, ymin], [xmax, ymax], [xmin, ymax]])


def directed_hausdorff(A: ConvexRegion, B: ConvexRegion) -> float:
    # distance to a convex set is convex, so its max over A sits at a vertex
    return float(B.distance(A.vertices).max())


def hausdorff(A: ConvexRegion, B: ConvexRegion) -> float:
    return max(directed_hausdorff(A, B), directed_hausdorff(B, A))


def minkowski_sum(A: ConvexRegion, B: ConvexRegion) -> ConvexRegion:
    sums = A.vertices[:, None, :] + B.vertices[None, :, :]
    return hull(sums.reshape(-1, 2))


def disk_polygon(r: float, arcs: int = DISK_ARCS) -> ConvexRegion:
    """Regular polygon circumscribed about the disk of radius ``r``."""
    theta = 2.0 * np.pi * np.arange(arcs) / arcs
    R = r / math.cos(math.pi / arcs)
    return ConvexRegion(np.column_stack([R * np.cos(theta), R * np.sin(theta)]))


def inflate(A: ConvexRegion, r: float, arcs: int = DISK_ARCS) -> ConvexRegion:
    """Outer polygonal approximation of ``A + B(0, r)``.

    The disk is replaced by a circumscribed ``arcs``-gon, so the result
    contains the true sum and overshoots it by ``r (sec(pi/arcs) - 1)``,
    about ``r / 800`` at the default 64 arcs.
    """
    if r < 0:
        raise ValueError("inflation radius must be non-negative")
    if r == 0:
        return A
    if arcs < 64:
        raise ValueError("use at least 64 arcs")
    return minkowski_sum(A, disk_polygon(r, arcs))


def line_region_distance(line: PlanarLine | EmptyInPlane, A: ConvexRegion) -> float:
    """Distance between a line and a filled region; 0 when they meet."""
    if line is EMPTY_IN_PLANE:
        return math.inf
    d = line.signed_distance(A.vertices)
    if np.all(d > 0) or np.all(d < 0):
        return float(np.abs(d).min())
    return 0.0


def apply_hat_region(L: IntMatrix3, A: ConvexRegion) -> ConvexRegion:
    """Image of a region under the planar projective map of ``L``.

    ``L`` sends segments missing the singular line to segments, so the image
    of ``A`` is the hull of its vertex images.
    """
    line = pullback_infinity_line(L)
    if line_region_distance(line, A) <= 0:
        raise RegionMeetsInfinityLine("region meets the line sent to infinity")
    image = hull(apply_hat(L, A.vertices))
    if len(A) > 1:
        edges = A.vertices if len(A) > 2 else A.vertices[:1]
        mids = 0.5 * (edges + np.roll(A.vertices, -1, axis=0)[: len(edges)])
        scale = 1.0 + image.max_norm()
        if not np.all(image.contains(apply_hat(L, mids), 1e-9 * scale)):
            raise AssertionError("projective image of an edge midpoint left the hull")
    return image
