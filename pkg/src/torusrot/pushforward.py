"""Projective pushforward of a rotation set.

Given a lift F and ``L`` in SL(3, Z) with inverse rows ``(a1 a2 a3)``,
``(b1 b2 b3)``, ``(c1 c2 c3)``, the words

    U = S^a1 T^b1 F^-c1,   V = S^a2 T^b2 F^-c2,   G = S^-a3 T^-b3 F^c3

generate a Z^3 action whose rotation set of G with respect to (U, V) is the
image of the rotation set of F under the planar projective map of L.  This
module builds the words, checks the disjointness hypothesis, produces a
sampled proper-discontinuity certificate for <U, V>, and compares both
sides of the set identity numerically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .dynamics import ActionWord, OrbitCache, TorusLift, displacement_samples, word_evaluate
from .geometry import (
    ConvexRegion,
    RegionMeetsInfinityLine,
    apply_hat_region,
    hausdorff,
    hull,
    inflate,
    line_region_distance,
)
from .projective import IntMatrix3, NotUnimodular, matrix_apply, pullback_infinity_line
from .rotation import (
    UNIT_BOX,
    Box,
    BoxImageCache,
    EmptyHitSet,
    RotationSetEstimate,
    ZActionProblem,
    ZActionResult,
    classical_rotation_set,
    default_ladder,
    default_slope_window,
    image_intersects,
    zaction_rotation_set,
)

# neighbourhood radius used when the pulled-back line is at infinity
AFFINE_NEIGHBOURHOOD = 0.5
CONTAIN_TOL = 1e-9


class CertificateFailed(RuntimeError):
    pass


@dataclass(frozen=True)
class PushforwardSystem:
    L: IntMatrix3
    L_inv: IntMatrix3
    U: ActionWord
    V: ActionWord
    G: ActionWord
    F: TorusLift

    @property
    def words(self) -> tuple[ActionWord, ActionWord, ActionWord]:
        return (self.U, self.V, self.G)


def build_pushforward(F: TorusLift, L: IntMatrix3) -> PushforwardSystem:
    if L.det() != 1:
        raise NotUnimodular(f"det L = {L.det()}, expected 1")
    Li = L.inverse()
    (a1, a2, a3), (b1, b2, b3), (c1, c2, c3) = Li.entries
    U = ActionWord(a1, b1, -c1)
    V = ActionWord(a2, b2, -c2)
    G = ActionWord(-a3, -b3, c3)
    if not (L @ Li).is_identity():
        raise AssertionError("adjugate inverse failed")
    return PushforwardSystem(L, Li, U, V, G, F)


def word_matrix(sys: PushforwardSystem) -> IntMatrix3:
    """Integer matrix whose columns are the exponent triples of U, V, G."""
    cols = [w.as_tuple() for w in sys.words]
    return IntMatrix3(tuple(tuple(cols[j][i] for j in range(3)) for i in range(3)))


def check_hypothesis(sys: PushforwardSystem, rho: RotationSetEstimate) -> float:
    """Clearance between the outer rotation-set estimate and the line L sends to infinity.

    ``inf`` when L is affine, 0 when they meet.
    """
    return line_region_distance(pullback_infinity_line(sys.L), rho.outer)


def word_correspondence(
    sys: PushforwardSystem, t: Sequence[int]
) -> tuple[ActionWord, ActionWord]:
    """Both sides of ``S^-m T^-n F^p = U^-mu V^-nu G^pi`` with ``(mu, nu, pi) = L (m, n, p)``."""
    m, n, p = (int(x) for x in t)
    mu, nu, pi = matrix_apply(sys.L, (m, n, p))
    left = ActionWord(-m, -n, p)
    right = (sys.U ** -mu) @ (sys.V ** -nu) @ (sys.G**pi)
    if left != right:
        raise AssertionError(f"word identity broken for {(m, n, p)}: {left} vs {right}")
    return left, right


@dataclass
class DiscontinuityCertificate:
    """Sampled constants for the proper-discontinuity argument.

    With ``tau1 = (2R + R') / eps`` and ``tau2 = 2R + R' + R''``, any
    ``(m, n)`` with ``||(m, n)|| > mn_bound`` has either
    ``|m c1 + n c2| > tau1`` or ``||(m a1 + n a2, m b1 + n b2)|| > tau2``,
    and either one forces ``U^m V^n B(0, R)`` off ``B(0, R)``.
    Containments are checked on grid samples for ``|k| <= k_scan`` only.
    """

    R: float
    epsilon: float
    neighbourhood: ConvexRegion
    k0: int
    R_prime: float
    R_dprime: float
    mn_bound: float
    k_scan: int
    grid_n: int
    clearance: float
    tau1: float
    tau2: float
    sigma_min: float
    defects: dict[int, float] = field(default_factory=dict)
    sampled: bool = True


def _defect(sample_hull: ConvexRegion, target: ConvexRegion) -> float:
    """How far the sampled hull sticks out of ``target``."""
    return float(target.distance(sample_hull.vertices).max())


def discontinuity_certificate(
    sys: PushforwardSystem,
    rho: RotationSetEstimate,
    R: float = 1.0,
    k_scan: int = 128,
    grid_n: int = 32,
) -> DiscontinuityCertificate:
    clearance = check_hypothesis(sys, rho)
    if not clearance > 0:
        raise CertificateFailed("rotation set estimate meets the pulled-back line")
    line = pullback_infinity_line(sys.L)
    radius = AFFINE_NEIGHBOURHOOD if math.isinf(clearance) else clearance / 2.0
    O = inflate(rho.outer, radius)
    eps = line_region_distance(line, O)
    if not eps > 0:
        raise CertificateFailed("neighbourhood reaches the pulled-back line")

    cache = OrbitCache(sys.F)
    defects: dict[int, float] = {0: 0.0}
    for k in range(1, k_scan + 1):
        for kk in (k, -k):
            h = hull(displacement_samples(sys.F, kk, grid_n, cache))
            defects[kk] = _defect(h, O.scaled(kk))

    def ok(k):
        return defects[k] <= CONTAIN_TOL * (1.0 + abs(k) * O.max_norm())

    k0 = None
    for cand in range(k_scan, 0, -1):
        if ok(cand) and ok(-cand):
            k0 = cand
        else:
            break
    if k0 is None:
        raise CertificateFailed(f"no k0 <= {k_scan} keeps the sampled D(F^k) inside k*O")
    R_prime = max(defects[k] for k in defects if abs(k) < k0)

    (a1, a2, _), (b1, b2, _), (c1, c2, _) = sys.L_inv.entries
    tau1 = (2 * R + R_prime) / eps
    j_max = math.floor(tau1) if math.isfinite(tau1) else 0
    R_dprime = j_max * O.max_norm()
    tau2 = 2 * R + R_prime + R_dprime
    A = np.array([[a1, a2], [b1, b2], [c1, c2]], dtype=float)
    sigma = float(np.linalg.svd(A, compute_uv=False).min())
    if sigma <= 0:
        raise CertificateFailed("first two columns of L^-1 are dependent")
    # rounding margin on the singular value
    mn_bound = math.hypot(tau1, tau2) / sigma * (1.0 + 1e-9)

    return DiscontinuityCertificate(
        R=R,
        epsilon=eps,
        neighbourhood=O,
        k0=k0,
        R_prime=R_prime,
        R_dprime=R_dprime,
        mn_bound=mn_bound,
        k_scan=k_scan,
        grid_n=grid_n,
        clearance=clearance,
        tau1=tau1,
        tau2=tau2,
        sigma_min=sigma,
        defects=defects,
    )


@dataclass
class EmpiricalReport:
    trials: int
    violations: list[tuple[int, int]]
    box_hits: int
    sampled: list[tuple[int, int]]

    @property
    def passed(self) -> bool:
        return not self.violations


def _sample_annulus(rng: np.random.Generator, lo: float, hi: float, trials: int) -> list[tuple[int, int]]:
    top = int(math.floor(hi))
    ms, ns = np.meshgrid(np.arange(-top, top + 1), np.arange(-top, top + 1), indexing="ij")
    norm = np.hypot(ms, ns)
    sel = (norm > lo) & (norm <= hi)
    pool = np.column_stack([ms[sel], ns[sel]])
    if len(pool) == 0:
        return []
    idx = rng.choice(len(pool), size=trials, replace=len(pool) < trials)
    return [(int(m), int(n)) for m, n in pool[np.sort(idx)]]


def _ball_image_meets_ball(word: ActionWord, F: TorusLift, R: float, samples: int = 2048) -> bool:
    """Padded hull of the image of the circle |z| = R, tested against the disk."""
    theta = 2 * np.pi * np.arange(samples) / samples
    circle = R * np.column_stack([np.cos(theta), np.sin(theta)])
    half = theta + np.pi / samples
    mids = R * np.column_stack([np.cos(half), np.sin(half)])
    img = word_evaluate(word, F, circle)
    img_mid = word_evaluate(word, F, mids)
    # a chord of the circle sits R(1 - cos(pi/samples)) inside it
    bulge = np.hypot(*(img_mid - 0.5 * (img + np.roll(img, -1, axis=0))).T).max()
    pad = 2.0 * float(bulge) + R * (1 - math.cos(math.pi / samples))
    region = hull(img)
    return bool(region.distance([[0.0, 0.0]])[0] <= R + pad)


def discontinuity_empirical_check(
    sys: PushforwardSystem,
    cert: DiscontinuityCertificate,
    trials: int = 500,
    seed: int = 0,
) -> EmpiricalReport:
    """Sample ``mn_bound < ||(m, n)|| <= 2 mn_bound`` and look for returns of B(0, R).

    The bounding box of the ball is screened first with the conservative
    box test; only box hits are re-examined against the ball itself.
    """
    rng = np.random.default_rng(seed)
    pairs = _sample_annulus(rng, cert.mn_bound, 2 * cert.mn_bound, trials)
    K = Box(-cert.R, cert.R, -cert.R, cert.R)
    cache = BoxImageCache(sys.F, K, per_edge=256)
    violations, box_hits = [], 0
    for m, n in pairs:
        if (m, n) == (0, 0):
            continue
        w = (sys.U**m) @ (sys.V**n)
        if image_intersects(w, sys.F, K, cache):
            box_hits += 1
            if _ball_image_meets_ball(w, sys.F, cert.R):
                violations.append((m, n))
    return EmpiricalReport(len(pairs), violations, box_hits, pairs)


@dataclass
class TheoremReport:
    classical: RotationSetEstimate
    image_inner: ConvexRegion
    image_outer: ConvexRegion
    zaction: ZActionResult | None
    distance: float
    bar: float
    passed: bool
    params: dict = field(default_factory=dict)
    note: str = ""


def verify_theorem(
    sys: PushforwardSystem,
    ladder: Sequence[int] | None = None,
    grid_n: int = 64,
    p_max: int = 64,
    slope_window: tuple[float, float, float, float] | None = None,
    K: Box = UNIT_BOX,
    threads: int = 1,
    classical: RotationSetEstimate | None = None,
    per_edge: int = 512,
) -> TheoremReport:
    """Compare the projective image of the classical estimate with the Z^3 estimate.

    The check passes when the Hausdorff distance between the two inner sets
    is at most the sum of their error bars (outer-to-inner distances).
    """
    ladder = list(default_ladder(64) if ladder is None else ladder)
    if classical is None:
        classical = classical_rotation_set(sys.F, ladder, grid_n)
    if not check_hypothesis(sys, classical) > 0:
        raise RegionMeetsInfinityLine("hypothesis fails: estimate meets the pulled-back line")
    A_in = apply_hat_region(sys.L, classical.inner)
    A_out = apply_hat_region(sys.L, classical.outer)
    window = slope_window or default_slope_window(A_out)
    params = {
        "ladder": ladder,
        "grid_n": grid_n,
        "p_max": p_max,
        "slope_window": list(window),
        "K": list(K.as_tuple()),
        "per_edge": per_edge,
    }
    prob = ZActionProblem(sys.U, sys.V, sys.G, sys.F, K, p_max, window, per_edge=per_edge, threads=threads)
    try:
        z = zaction_rotation_set(prob)
    except EmptyHitSet as exc:
        return TheoremReport(classical, A_in, A_out, None, math.inf, 0.0, False, params, str(exc))
    d = hausdorff(A_in, z.estimate.inner)
    bar = hausdorff(A_out, A_in) + z.estimate.error_bar
    return TheoremReport(classical, A_in, A_out, z, d, bar, d <= bar, params)
