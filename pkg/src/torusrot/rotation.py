"""Rotation-set estimators.

Two estimators live here.  :func:`classical_rotation_set` hulls the sampled
displacement sets ``D(F^n) / n`` along a ladder of iterates.
:func:`zaction_rotation_set` works from the return-time definition for a
Z^3 action: it enumerates integer triples ``(m, n, p)`` and records those
for which ``U^-m V^-n G^p`` brings a compact box back onto itself.

Error bars on both are heuristic and are reported as such.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .dynamics import (
    F_WORD,
    S_WORD,
    T_WORD,
    ActionWord,
    OrbitCache,
    TorusLift,
    displacement_samples,
)
from .geometry import ConvexRegion, box, hausdorff, hull, inflate, minkowski_sum

# padding below this is floating-point noise, not curvature
PAD_NOISE_FLOOR = 1e-12
HIT_TOL = 1e-9


class EmptyHitSet(RuntimeError):
    """No triple passed the return test; the estimate is undefined."""


@dataclass
class RotationSetEstimate:
    outer: ConvexRegion
    inner: ConvexRegion
    iterate_ladder: list[int]
    grid_n: int
    hausdorff_trace: list[float]
    margin: float = 0.0
    method: str = "classical"

    @property
    def error_bar(self) -> float:
        return hausdorff(self.outer, self.inner)


def default_ladder(n_max: int) -> list[int]:
    """Doubling ladder ``1, 2, 4, ...`` closed off by ``n_max``."""
    if n_max < 1:
        raise ValueError("n_max must be positive")
    ladder = []
    n = 1
    while n < n_max:
        ladder.append(n)
        n *= 2
    ladder.append(n_max)
    return ladder


def _rotation_samples(F: TorusLift, n: int, grid_n: int, cache: OrbitCache) -> np.ndarray:
    """Sampled ``(F^n(z) - z) / n``.

    A rigid translation has ``F^n(z) - z = n (alpha, beta)`` everywhere, and
    dividing the floating-point sum by ``n`` need not round back to
    ``(alpha, beta)``, so that case uses the constant directly.
    """
    const = F.constant_displacement()
    if const is not None:
        return const[None, :]
    return displacement_samples(F, n, grid_n, cache) / n


def classical_rotation_set(
    F: TorusLift,
    ladder: Sequence[int] | None = None,
    grid_n: int = 64,
    cache: OrbitCache | None = None,
) -> RotationSetEstimate:
    """Estimate the rotation set of a lift from displacement hulls.

    For every ``n`` in ``ladder`` the hull of ``D(F^n)`` sampled on the seed
    grid is divided by ``n``.  The last hull is the inner estimate; the outer
    one inflates it by the last successive Hausdorff gap plus
    ``diam(D(F)) / n_last``.
    """
    ladder = list(default_ladder(64) if ladder is None else ladder)
    if not ladder or ladder[0] < 1 or any(b <= a for a, b in zip(ladder, ladder[1:])):
        raise ValueError("ladder must be strictly increasing positive integers")
    cache = cache if cache is not None else OrbitCache(F)

    hulls = [hull(_rotation_samples(F, n, grid_n, cache)) for n in ladder]
    trace = [hausdorff(a, b) for a, b in zip(hulls, hulls[1:])]
    first = hull(displacement_samples(F, 1, grid_n, cache))
    margin = (trace[-1] if trace else 0.0) + first.diameter() / ladder[-1]
    return RotationSetEstimate(
        outer=inflate(hulls[-1], margin),
        inner=hulls[-1],
        iterate_ladder=ladder,
        grid_n=grid_n,
        hausdorff_trace=trace,
        margin=margin,
    )


@dataclass(frozen=True)
class Box:
    xmin: float = 0.0
    xmax: float = 1.0
    ymin: float = 0.0
    ymax: float = 1.0

    def __post_init__(self):
        if not (self.xmax > self.xmin and self.ymax > self.ymin):
            raise ValueError("box must have positive area")

    def region(self) -> ConvexRegion:
        return box(self.xmin, self.xmax, self.ymin, self.ymax)

    def diameter(self) -> float:
        return math.hypot(self.xmax - self.xmin, self.ymax - self.ymin)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.xmin, self.xmax, self.ymin, self.ymax)

    def swapped(self) -> "Box":
        return Box(self.ymin, self.ymax, self.xmin, self.xmax)


UNIT_BOX = Box()


def _box_samples(K: Box, per_edge: int, interior: int = 8):
    """Closed boundary ring of K, the midpoints of its steps, and an interior grid."""
    t = np.arange(per_edge) / per_edge
    x0, x1, y0, y1 = K.as_tuple()
    w, h = x1 - x0, y1 - y0
    ring = np.concatenate(
        [
            np.column_stack([x0 + w * t, np.full_like(t, y0)]),
            np.column_stack([np.full_like(t, x1), y0 + h * t]),
            np.column_stack([x1 - w * t, np.full_like(t, y1)]),
            np.column_stack([np.full_like(t, x0), y1 - h * t]),
        ]
    )
    mids = 0.5 * (ring + np.roll(ring, -1, axis=0))
    c = (np.arange(interior) + 0.5) / interior
    gx, gy = np.meshgrid(x0 + w * c, y0 + h * c, indexing="ij")
    inner = np.column_stack([gx.ravel(), gy.ravel()])
    return ring, mids, inner


@dataclass
class _ImageRegion:
    image: ConvexRegion  # padded hull of F^f(K)
    shifts: ConvexRegion  # translations v with (image + v) meeting K
    padding: float


class BoxImageCache:
    """Padded hulls of ``F^f(K)`` for a fixed lift and box, keyed by ``f``.

    The hull is taken over images of a dense boundary ring (which bounds the
    image of K for a homeomorphism) and a coarse interior grid.  Padding is
    twice the largest gap between the image of a ring-step midpoint and the
    midpoint of the images of its endpoints, a local measure of how far the
    image curve can bulge past the sampled chords.
    """

    def __init__(self, F: TorusLift, K: Box = UNIT_BOX, per_edge: int = 512):
        self.F = F
        self.K = K
        self.K_region = K.region()
        ring, mids, inner = _box_samples(K, per_edge)
        self._n_ring = len(ring)
        self._pts = np.concatenate([ring, mids, inner])
        self._disp = {0: np.zeros_like(self._pts)}
        self._regions: dict[int, _ImageRegion] = {}

    def _displacement(self, f: int) -> np.ndarray:
        if f in self._disp:
            return self._disp[f]
        frontier = max(self._disp) if f > 0 else min(self._disp)
        if abs(frontier) > abs(f):
            frontier = 0
        disp = self._disp[frontier]
        for _ in range(abs(f - frontier)):
            pos = self._pts + disp
            if f > 0:
                disp = disp + self.F.displacement(pos)
            else:
                disp = disp - self.F.inverse_displacement(pos)
        self._disp[f] = disp
        # retain zero and the two frontiers only
        keep = {0, max(self._disp), min(self._disp)}
        self._disp = {j: d for j, d in self._disp.items() if j in keep}
        return disp

    def region(self, f: int) -> _ImageRegion:
        r = self._regions.get(f)
        if r is not None:
            return r
        img = self._pts + self._displacement(f)
        n = self._n_ring
        ring, mids, inner = img[:n], img[n : 2 * n], img[2 * n :]
        chord_mid = 0.5 * (ring + np.roll(ring, -1, axis=0))
        pad = 2.0 * float(np.hypot(*(mids - chord_mid).T).max())
        if pad < PAD_NOISE_FLOOR * (1.0 + float(np.abs(img).max())):
            pad = 0.0
        image = inflate(hull(np.concatenate([ring, inner])), pad)
        shifts = minkowski_sum(self.K_region, image.scaled(-1.0))
        r = _ImageRegion(image, shifts, pad)
        self._regions[f] = r
        return r

    def prepare(self, f_lo: int, f_hi: int) -> None:
        """Sweep ``f_lo..f_hi`` once in each direction from zero."""
        for f in range(0, f_hi + 1):
            self.region(f)
        for f in range(0, f_lo - 1, -1):
            self.region(f)


def _inside_convex(region: ConvexRegion, pts: np.ndarray, tol: float) -> np.ndarray:
    """Half-plane test for points of a convex polygon with positive area."""
    v = region.vertices
    if len(v) < 3:
        return region.distance(pts) <= tol
    lo, hi = v.min(0) - tol, v.max(0) + tol
    ok = np.all((pts >= lo) & (pts <= hi), axis=1)
    idx = np.nonzero(ok)[0]
    if len(idx) == 0:
        return ok
    e = np.roll(v, -1, axis=0) - v
    nrm = np.hypot(e[:, 0], e[:, 1])
    q = pts[idx]
    cross = e[None, :, 0] * (q[:, None, 1] - v[None, :, 1]) - e[None, :, 1] * (q[:, None, 0] - v[None, :, 0])
    ok[idx] = np.all(cross >= -tol * nrm[None, :], axis=1)
    return ok


def image_intersects(
    word: ActionWord, F: TorusLift, K: Box = UNIT_BOX, cache: BoxImageCache | None = None
) -> bool:
    """Conservative test for ``word(K) ∩ K != ∅``.

    Returns True whenever the sampled, padded hull of the image meets K, so
    it can err only towards reporting an intersection.
    """
    if cache is None:
        cache = BoxImageCache(F, K)
    elif cache.F != F or cache.K != K:
        raise ValueError("cache belongs to a different lift or box")
    r = cache.region(word.f)
    shift = np.array([[word.s, word.t]], dtype=float)
    return bool(_inside_convex(r.shifts, shift, HIT_TOL)[0])


@dataclass(frozen=True)
class TripleHit:
    m: int
    n: int
    p: int

    @property
    def quotient(self) -> tuple[float, float]:
        return (self.m / self.p, self.n / self.p)


@dataclass
class ZActionProblem:
    """Return-time problem for the Z^3 action generated by U, V, G.

    ``slope_window`` is ``(xmin, xmax, ymin, ymax)`` for the admissible
    quotients ``(m/p, n/p)``.
    """

    U: ActionWord
    V: ActionWord
    G: ActionWord
    F: TorusLift
    K: Box = UNIT_BOX
    p_max: int = 64
    slope_window: tuple[float, float, float, float] = (-2.0, 2.0, -2.0, 2.0)
    p_min: int = 1
    per_edge: int = 512
    threads: int = 1

    def __post_init__(self):
        if self.p_max < 1 or self.p_min < 1 or self.p_min > self.p_max:
            raise ValueError("need 1 <= p_min <= p_max")
        self.slope_window = tuple(float(x) for x in self.slope_window)

    def word(self, m: int, n: int, p: int) -> ActionWord:
        return (self.U ** -m) @ (self.V ** -n) @ (self.G**p)


@dataclass
class ZActionResult:
    hits: list[TripleHit]
    estimate: RotationSetEstimate
    deep_threshold: int
    max_padding: float


def _window_range(lo: float, hi: float, p: int) -> np.ndarray:
    return np.arange(math.ceil(lo * p - 1e-9), math.floor(hi * p + 1e-9) + 1, dtype=np.int64)


def _exponent_grid(prob: ZActionProblem, p: int):
    wx0, wx1, wy0, wy1 = prob.slope_window
    ms, ns = _window_range(wx0, wx1, p), _window_range(wy0, wy1, p)
    if len(ms) == 0 or len(ns) == 0:
        return None
    mm, nn = np.meshgrid(ms, ns, indexing="ij")
    mm, nn = mm.ravel(), nn.ravel()
    U, V, G = prob.U, prob.V, prob.G
    s = -mm * U.s - nn * V.s + p * G.s
    t = -mm * U.t - nn * V.t + p * G.t
    f = -mm * U.f - nn * V.f + p * G.f
    return mm, nn, s, t, f


def _hits_for_p(prob: ZActionProblem, cache: BoxImageCache, p: int) -> np.ndarray:
    grid = _exponent_grid(prob, p)
    if grid is None:
        return np.empty((0, 3), dtype=np.int64)
    mm, nn, s, t, f = grid
    shifts = np.column_stack([s, t]).astype(float)
    hit = np.zeros(len(mm), dtype=bool)
    for fv in np.unique(f):
        sel = np.nonzero(f == fv)[0]
        r = cache.region(int(fv))
        hit[sel] = _inside_convex(r.shifts, shifts[sel], HIT_TOL)
    out = np.column_stack([mm[hit], nn[hit], np.full(int(hit.sum()), p, dtype=np.int64)])
    return out


def zaction_rotation_set(prob: ZActionProblem) -> ZActionResult:
    """Estimate the rotation set of G with respect to U and V.

    Every ``p`` in ``p_min..p_max`` and every ``(m, n)`` with ``(m/p, n/p)``
    inside the slope window is tested with the conservative return test.
    The inner estimate hulls the quotients of hits with ``p >= p_max/2``;
    the outer one inflates it by ``(2 diam K + padding) / (p_max/2)``.
    """
    cache = BoxImageCache(prob.F, prob.K, prob.per_edge)
    f_lo, f_hi = 0, 0
    for p in range(prob.p_min, prob.p_max + 1):
        grid = _exponent_grid(prob, p)
        if grid is not None:
            f_lo, f_hi = min(f_lo, int(grid[4].min())), max(f_hi, int(grid[4].max()))
    cache.prepare(f_lo, f_hi)

    ps = range(prob.p_min, prob.p_max + 1)
    if prob.threads > 1:
        with ThreadPoolExecutor(prob.threads) as pool:
            blocks = list(pool.map(lambda p: _hits_for_p(prob, cache, p), ps))
    else:
        blocks = [_hits_for_p(prob, cache, p) for p in ps]
    arr = np.concatenate(blocks) if blocks else np.empty((0, 3), dtype=np.int64)
    hits = [TripleHit(int(m), int(n), int(p)) for m, n, p in arr]
    if not hits:
        raise EmptyHitSet("no triple (m, n, p) passed the return test")

    deep = max(prob.p_min, math.ceil(prob.p_max / 2))
    deep_arr = arr[arr[:, 2] >= deep]
    if len(deep_arr) == 0:
        raise EmptyHitSet(f"no hits with p >= {deep}")
    quotients = deep_arr[:, :2] / deep_arr[:, 2:3]
    inner = hull(quotients)
    max_pad = max(cache.region(f).padding for f in range(f_lo, f_hi + 1))
    margin = (2.0 * prob.K.diameter() + max_pad) / (prob.p_max / 2.0)
    est = RotationSetEstimate(
        outer=inflate(inner, margin),
        inner=inner,
        iterate_ladder=[deep, prob.p_max],
        grid_n=prob.per_edge,
        hausdorff_trace=[],
        margin=margin,
        method="zaction",
    )
    return ZActionResult(hits, est, deep, max_pad)


def default_slope_window(region: ConvexRegion, pad: float = 0.5) -> tuple[float, float, float, float]:
    x0, x1, y0, y1 = region.bbox()
    return (x0 - pad, x1 + pad, y0 - pad, y1 + pad)


@dataclass
class EquivalenceReport:
    classical: RotationSetEstimate
    zaction: ZActionResult
    distance: float
    bound: float
    within_bound: bool
    params: dict = field(default_factory=dict)


def remark1_equivalence_check(
    F: TorusLift,
    ladder: Sequence[int] | None = None,
    grid_n: int = 64,
    p_max: int = 64,
    slope_window: tuple[float, float, float, float] | None = None,
    K: Box = UNIT_BOX,
    threads: int = 1,
) -> EquivalenceReport:
    """Compare the classical estimate with the Z^3 estimate for ``(S, T, F)``.

    The bound is the sum of the two estimates' own error bars.
    """
    ladder = list(default_ladder(64) if ladder is None else ladder)
    classical = classical_rotation_set(F, ladder, grid_n)
    window = slope_window or default_slope_window(classical.outer)
    prob = ZActionProblem(S_WORD, T_WORD, F_WORD, F, K, p_max, window, threads=threads)
    z = zaction_rotation_set(prob)
    d = hausdorff(classical.inner, z.estimate.inner)
    bound = classical.error_bar + z.estimate.error_bar
    return EquivalenceReport(
        classical,
        z,
        d,
        bound,
        d <= bound,
        {"ladder": ladder, "grid_n": grid_n, "p_max": p_max, "slope_window": list(window), "K": list(K.as_tuple())},
    )
