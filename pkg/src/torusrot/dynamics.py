"""Torus lifts and the commuting group generated by S, T and F.

A lift is stored through its periodic displacement ``delta(z) = F(z) - z``.
All evaluation is vectorised over ``(N, 2)`` arrays of points.  Iterates are
tracked as accumulated displacements rather than positions, which keeps the
arguments of the periodic functions reduced mod 1 and the numbers small.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1

TWO_PI = 2.0 * math.pi

INVERSE_TOL = 1e-12
INVERSE_MAX_ITER = 200
INVERSE_NEWTON_ITER = 30


class InverseNotConverged(RuntimeError):
    pass


def _as_points(z) -> tuple[np.ndarray, bool]:
    z = np.asarray(z, dtype=float)
    single = z.ndim == 1
    return np.atleast_2d(z), single


class TorusLift:
    """Base class: a lift ``F(z) = z + delta(z)`` with Z^2-periodic ``delta``.

    Subclasses implement :meth:`_delta` on points already reduced to
    ``[0, 1)^2``.
    """

    name = "lift"

    def _delta(self, frac: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def displacement(self, z) -> np.ndarray:
        pts, single = _as_points(z)
        out = self._delta(pts - np.floor(pts))
        return out[0] if single else out

    def __call__(self, z) -> np.ndarray:
        pts, single = _as_points(z)
        out = pts + self._delta(pts - np.floor(pts))
        return out[0] if single else out

    def inverse_displacement(self, z, damping: float = 1.0) -> np.ndarray:
        """Return ``d`` with ``F(z - d) = z``, so ``F^{-1}(z) = z - d``.

        Solved by the fixed-point iteration ``d <- delta(z - d)`` started
        at ``delta(z)``, relaxed by ``damping``.  When the contraction is
        too weak to reach the tolerance in the iteration budget, the last
        iterate is finished with Newton steps on ``d - delta(z - d) = 0``
        using a finite-difference Jacobian of ``delta``.
        """
        pts, single = _as_points(z)
        frac = pts - np.floor(pts)
        d = self._delta(frac)
        for _ in range(INVERSE_MAX_ITER):
            w = frac - d
            d_new = (1.0 - damping) * d + damping * self._delta(w - np.floor(w))
            err = np.max(np.abs(d_new - d)) if d.size else 0.0
            d = d_new
            if err <= INVERSE_TOL:
                return d[0] if single else d
        for _ in range(INVERSE_NEWTON_ITER):
            w = frac - d
            resid = d - self._delta(w - np.floor(w))
            # g'(d) = I + J(z - d) where J is the Jacobian of delta
            jac = np.eye(2)[None] + self._delta_jacobian(w)
            step = np.linalg.solve(jac, resid[..., None])[..., 0]
            d = d - step
            if (np.max(np.abs(step)) if d.size else 0.0) <= INVERSE_TOL:
                return d[0] if single else d
        raise InverseNotConverged(
            f"{self.name}: solve for F^-1 did not reach {INVERSE_TOL}"
        )

    def _delta_jacobian(self, w: np.ndarray, h: float = 1e-6) -> np.ndarray:
        """Central-difference Jacobian of ``delta``, shape ``(N, 2, 2)``."""
        jac = np.empty((len(w), 2, 2))
        for j in range(2):
            e = np.zeros(2)
            e[j] = h
            wp, wm = w + e, w - e
            jac[:, :, j] = (self._delta(wp - np.floor(wp)) - self._delta(wm - np.floor(wm))) / (2 * h)
        return jac

    def inverse(self, z) -> np.ndarray:
        pts, single = _as_points(z)
        out = pts - self.inverse_displacement(pts)
        return out[0] if single else out

    def params(self) -> dict:
        raise NotImplementedError

    def constant_displacement(self) -> np.ndarray | None:
        """``delta`` when it does not depend on the point, else None."""
        return None


@dataclass(frozen=True)
class Translation(TorusLift):
    alpha: float
    beta: float

    name = "translation"

    def _delta(self, frac):
        out = np.empty_like(frac)
        out[:, 0] = self.alpha
        out[:, 1] = self.beta
        return out

    def params(self):
        return {"alpha": self.alpha, "beta": self.beta}

    def constant_displacement(self):
        return np.array([self.alpha, self.beta], dtype=float)


@dataclass(frozen=True)
class SkewShear(TorusLift):
    """Skew product along one axis.

    ``axis="vertical"``: ``F(x, y) = (x + omega, y + psi(x))``;
    ``axis="horizontal"``: ``F(x, y) = (x + psi(y), y + omega)``, with

        psi(s) = constant + sum_k cos[k-1] cos(2 pi k s) + sin[k-1] sin(2 pi k s).

    With ``omega = 0`` every fibre is invariant and the rotation set is the
    segment ``{0} x [min psi, max psi]`` (or its transpose).
    """

    axis: str = "vertical"
    omega: float = 0.0
    constant: float = 0.0
    cos: tuple[float, ...] = ()
    sin: tuple[float, ...] = ()

    name = "skew"

    def __post_init__(self):
        if self.axis not in ("vertical", "horizontal"):
            raise ValueError(f"axis must be 'vertical' or 'horizontal', not {self.axis!r}")
        object.__setattr__(self, "cos", tuple(float(c) for c in self.cos))
        object.__setattr__(self, "sin", tuple(float(c) for c in self.sin))

    def psi(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        out = np.full_like(s, self.constant)
        for k, c in enumerate(self.cos, start=1):
            out = out + c * np.cos(TWO_PI * k * s)
        for k, c in enumerate(self.sin, start=1):
            out = out + c * np.sin(TWO_PI * k * s)
        return out

    def psi_range(self, n: int = 1 << 16) -> tuple[float, float]:
        vals = self.psi(np.arange(n) / n)
        return float(vals.min()), float(vals.max())

    def _delta(self, frac):
        out = np.empty_like(frac)
        if self.axis == "vertical":
            out[:, 0] = self.omega
            out[:, 1] = self.psi(frac[:, 0])
        else:
            out[:, 0] = self.psi(frac[:, 1])
            out[:, 1] = self.omega
        return out

    def params(self):
        return {
            "axis": self.axis,
            "omega": self.omega,
            "constant": self.constant,
            "cos": list(self.cos),
            "sin": list(self.sin),
        }


@dataclass(frozen=True)
class TwoWave(TorusLift):
    """``F(x, y) = (x + p1 + q1 sin 2 pi y, y + p2 + q2 sin 2 pi x)``.

    Requires ``2 pi |q1| < 1`` and ``2 pi |q2| < 1``: the Jacobian is then
    strictly diagonally dominant everywhere, so F is a homeomorphism and the
    inverse fixed-point iteration is a contraction.
    """

    p1: float = 0.0
    p2: float = 0.0
    q1: float = 0.0
    q2: float = 0.0

    name = "twowave"

    def __post_init__(self):
        if TWO_PI * max(abs(self.q1), abs(self.q2)) >= 1.0:
            raise ValueError(
                f"TwoWave needs 2*pi*|q| < 1 for both amplitudes, got q1={self.q1}, q2={self.q2}"
            )

    def _delta(self, frac):
        out = np.empty_like(frac)
        out[:, 0] = self.p1 + self.q1 * np.sin(TWO_PI * frac[:, 1])
        out[:, 1] = self.p2 + self.q2 * np.sin(TWO_PI * frac[:, 0])
        return out

    def params(self):
        return {"p1": self.p1, "p2": self.p2, "q1": self.q1, "q2": self.q2}


def _add_int64(*xs: int) -> int:
    total = sum(xs)
    if not INT64_MIN <= total <= INT64_MAX:
        raise OverflowError(f"word exponent {total} does not fit in 64 bits")
    return total


@dataclass(frozen=True)
class ActionWord:
    """The composite ``S^s T^t F^f`` of the commuting generators.

    Since S, T and F commute, every product of their powers has exactly one
    such exponent triple.
    """

    s: int
    t: int
    f: int

    def __post_init__(self):
        for name in ("s", "t", "f"):
            object.__setattr__(self, name, _add_int64(int(getattr(self, name))))

    def __iter__(self):
        return iter((self.s, self.t, self.f))

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.s, self.t, self.f)

    def __matmul__(self, other: "ActionWord") -> "ActionWord":
        return word_compose(self, other)

    def __pow__(self, k: int) -> "ActionWord":
        k = int(k)
        return ActionWord(self.s * k, self.t * k, self.f * k)

    def inverse(self) -> "ActionWord":
        return ActionWord(-self.s, -self.t, -self.f)

    def __str__(self) -> str:
        return f"({self.s},{self.t},{self.f})"


S_WORD = ActionWord(1, 0, 0)
T_WORD = ActionWord(0, 1, 0)
F_WORD = ActionWord(0, 0, 1)
IDENTITY_WORD = ActionWord(0, 0, 0)


def word_compose(w1: ActionWord, *rest: ActionWord) -> ActionWord:
    s, t, f = w1.as_tuple()
    for w in rest:
        s, t, f = _add_int64(s, w.s), _add_int64(t, w.t), _add_int64(f, w.f)
    return ActionWord(s, t, f)


def lift_power_displacement(F: TorusLift, z, k: int) -> np.ndarray:
    """``F^k(z) - z`` for an integer ``k`` (negative powers use F^-1)."""
    pts, single = _as_points(z)
    disp = np.zeros_like(pts)
    if k >= 0:
        for _ in range(k):
            disp += F.displacement(pts + disp)
    else:
        for _ in range(-k):
            disp -= F.inverse_displacement(pts + disp)
    return disp[0] if single else disp


def word_evaluate(w: ActionWord, F: TorusLift, z) -> np.ndarray:
    """``S^s T^t F^f (z) = F^f(z) + (s, t)``."""
    pts, single = _as_points(z)
    out = pts + lift_power_displacement(F, pts, w.f) + np.array([w.s, w.t], dtype=float)
    return out[0] if single else out


def grid_seeds(grid_n: int) -> np.ndarray:
    """Cell centres ``((i + 1/2)/n, (j + 1/2)/n)`` of the uniform n x n grid."""
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    c = (np.arange(grid_n) + 0.5) / grid_n
    xx, yy = np.meshgrid(c, c, indexing="ij")
    return np.column_stack([xx.ravel(), yy.ravel()])


@dataclass
class _GridTables:
    seeds: np.ndarray
    tables: dict[int, np.ndarray] = field(default_factory=dict)


class OrbitCache:
    """Displacement tables ``Delta_k(z) = F^k(z) - z`` over grid seeds.

    Tables are extended incrementally with the cocycle rule
    ``Delta_{k+1}(z) = Delta_k(z) + delta(z + Delta_k(z))`` (and the inverse
    rule for negative k).  Only tables that were asked for, plus the
    extremal ones, are retained.  Single writer.
    """

    def __init__(self, F: TorusLift):
        self.F = F
        self._grids: dict[int, _GridTables] = {}

    def _grid(self, grid_n: int) -> _GridTables:
        g = self._grids.get(grid_n)
        if g is None:
            seeds = grid_seeds(grid_n)
            g = _GridTables(seeds, {0: np.zeros_like(seeds)})
            self._grids[grid_n] = g
        return g

    def table(self, k: int, grid_n: int) -> np.ndarray:
        g = self._grid(grid_n)
        if k in g.tables:
            return g.tables[k]
        same_sign = [j for j in g.tables if (j >= 0) == (k >= 0) and abs(j) < abs(k)]
        start = max(same_sign, key=abs) if same_sign else 0
        disp = g.tables[start].copy()
        step = 1 if k > 0 else -1
        for _ in range(abs(k - start)):
            pts = g.seeds + disp
            if step > 0:
                disp += self.F.displacement(pts)
            else:
                disp -= self.F.inverse_displacement(pts)
        disp.setflags(write=False)
        g.tables[k] = disp
        return disp

    def seeds(self, grid_n: int) -> np.ndarray:
        return self._grid(grid_n).seeds


def displacement_samples(
    F: TorusLift, k: int, grid_n: int, cache: OrbitCache | None = None
) -> np.ndarray:
    """Samples of the displacement set ``D(F^k)`` over an n x n seed grid.

    One fundamental domain suffices because ``F^k(z) - z`` is Z^2-periodic.
    """
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    if cache is None:
        cache = OrbitCache(F)
    elif cache.F != F:
        raise ValueError("cache belongs to a different lift")
    return cache.table(int(k), grid_n)


def make_lift(family: str, **params) -> TorusLift:
    """Build one of the built-in families by name."""
    family = family.lower()
    if family == "translation":
        return Translation(float(params.pop("alpha")), float(params.pop("beta")))
    if family == "skew":
        return SkewShear(
            axis=params.pop("axis", "vertical"),
            omega=float(params.pop("omega", 0.0)),
            constant=float(params.pop("constant", 0.0)),
            cos=tuple(params.pop("cos", ())),
            sin=tuple(params.pop("sin", ())),
        )
    if family == "twowave":
        return TwoWave(
            float(params.pop("p1", 0.0)),
            float(params.pop("p2", 0.0)),
            float(params.pop("q1", 0.0)),
            float(params.pop("q2", 0.0)),
        )
    raise ValueError(f"unknown map family {family!r}")
