"""Exact integer projective algebra over SL(3, Z).

Matrices are kept as Python integers and range-checked against int64 so
that every word identity built on top of them stays exact.  Points of the
plane are embedded as ``[x : y : 1]`` and read back through the affine
chart ``[x : y : z] -> (x/z, y/z)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1

# |z| below this fraction of the max-norm puts a point on the line at infinity.
CHART_TOL = 1e-9


class AtInfinity(ValueError):
    """A homogeneous point has no image in the affine chart."""


class NotUnimodular(ValueError):
    pass


def _check_int64(value: int) -> int:
    if not INT64_MIN <= value <= INT64_MAX:
        raise OverflowError(f"integer {value} does not fit in 64 bits")
    return value


@dataclass(frozen=True)
class IntMatrix3:
    """3x3 integer matrix, row-major.

    Only determinant-one matrices are accepted by :meth:`inverse` and by the
    pushforward construction; the class itself also stores arbitrary integer
    matrices so that products can be formed before checking.
    """

    entries: tuple[tuple[int, int, int], tuple[int, int, int], tuple[int, int, int]]

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in row) for row in self.entries)
        if len(rows) != 3 or any(len(r) != 3 for r in rows):
            raise ValueError("IntMatrix3 needs exactly 3x3 entries")
        for row in rows:
            for x in row:
                _check_int64(x)
        object.__setattr__(self, "entries", rows)

    @classmethod
    def from_flat(cls, values: Iterable[int]) -> "IntMatrix3":
        vals = [int(v) for v in values]
        if len(vals) != 9:
            raise ValueError(f"expected 9 integers, got {len(vals)}")
        return cls((tuple(vals[0:3]), tuple(vals[3:6]), tuple(vals[6:9])))

    @classmethod
    def parse(cls, text: str) -> "IntMatrix3":
        """Read nine whitespace-separated integers, row-major."""
        return cls.from_flat(int(tok) for tok in text.split())

    @classmethod
    def identity(cls) -> "IntMatrix3":
        return cls(((1, 0, 0), (0, 1, 0), (0, 0, 1)))

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i][j]

    def row(self, i: int) -> tuple[int, int, int]:
        return self.entries[i]

    def column(self, j: int) -> tuple[int, int, int]:
        return tuple(self.entries[i][j] for i in range(3))

    def flat(self) -> list[int]:
        return [x for row in self.entries for x in row]

    def to_array(self) -> np.ndarray:
        return np.array(self.entries, dtype=float)

    def det(self) -> int:
        (a, b, c), (d, e, f), (g, h, i) = self.entries
        return _check_int64(a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g))

    def adjugate(self) -> "IntMatrix3":
        m = self.entries
        cof = [[0] * 3 for _ in range(3)]
        for i in range(3):
            for j in range(3):
                r = [k for k in range(3) if k != i]
                c = [k for k in range(3) if k != j]
                minor = m[r[0]][c[0]] * m[r[1]][c[1]] - m[r[0]][c[1]] * m[r[1]][c[0]]
                cof[i][j] = (-1) ** (i + j) * minor
        # adjugate is the transposed cofactor matrix
        return IntMatrix3(tuple(tuple(cof[j][i] for j in range(3)) for i in range(3)))

    def inverse(self) -> "IntMatrix3":
        if self.det() != 1:
            raise NotUnimodular(f"determinant is {self.det()}, expected 1")
        return self.adjugate()

    def __matmul__(self, other: "IntMatrix3") -> "IntMatrix3":
        a, b = self.entries, other.entries
        return IntMatrix3(
            tuple(
                tuple(sum(a[i][k] * b[k][j] for k in range(3)) for j in range(3))
                for i in range(3)
            )
        )

    def is_identity(self) -> bool:
        return self == IntMatrix3.identity()

    def is_affine(self) -> bool:
        """Third row ``(0, 0, 1)``: the map preserves the line at infinity."""
        return self.entries[2] == (0, 0, 1)

    def __str__(self) -> str:
        return " ".join(str(x) for x in self.flat())


def matrix_apply(L: IntMatrix3, t: Sequence[int]) -> tuple[int, int, int]:
    """Exact product ``L @ t`` for an integer triple."""
    if len(t) != 3:
        raise ValueError("expected an integer triple")
    vec = [int(x) for x in t]
    return tuple(
        _check_int64(sum(L.entries[i][k] * vec[k] for k in range(3))) for i in range(3)
    )


def embed(v) -> np.ndarray:
    """``(x, y) -> [x : y : 1]``; works row-wise on ``(N, 2)`` arrays."""
    v = np.asarray(v, dtype=float)
    ones = np.ones(v.shape[:-1] + (1,))
    return np.concatenate([v, ones], axis=-1)


def chart(p) -> np.ndarray:
    """Affine chart ``[x : y : z] -> (x/z, y/z)``.

    Accepts a single triple or an ``(N, 3)`` array.  Raises
    :class:`AtInfinity` if any point lies on the line at infinity (within
    ``CHART_TOL`` relative to its max-norm).
    """
    p = np.asarray(p, dtype=float)
    if p.shape[-1] != 3:
        raise ValueError("homogeneous points need three coordinates")
    scale = np.max(np.abs(p), axis=-1)
    if np.any(scale == 0):
        raise ValueError("[0 : 0 : 0] is not a projective point")
    z = p[..., 2]
    if np.any(np.abs(z) < CHART_TOL * scale):
        raise AtInfinity("point lies on the line at infinity")
    return p[..., :2] / z[..., None]


def apply_hat(L: IntMatrix3, v) -> np.ndarray:
    """The planar map induced by ``L``: ``chart(L @ [v : 1])``."""
    h = embed(v) @ L.to_array().T
    return chart(h)


@dataclass(frozen=True)
class PlanarLine:
    """The line ``{(x, y) : u x + v y + w = 0}``."""

    u: float
    v: float
    w: float

    def __post_init__(self):
        if self.u == 0 and self.v == 0:
            raise ValueError("(u, v) must not both vanish")

    @property
    def normal_norm(self) -> float:
        return float(np.hypot(self.u, self.v))

    def signed_distance(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        return (self.u * pts[..., 0] + self.v * pts[..., 1] + self.w) / self.normal_norm

    def point_and_direction(self) -> tuple[np.ndarray, np.ndarray]:
        n = np.array([self.u, self.v]) / self.normal_norm
        base = -self.w / self.normal_norm * n
        return base, np.array([-n[1], n[0]])


class EmptyInPlane:
    """Pulled-back line that lies entirely at infinity (affine ``L``)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "EMPTY_IN_PLANE"


EMPTY_IN_PLANE = EmptyInPlane()


def pullback_infinity_line(L: IntMatrix3) -> PlanarLine | EmptyInPlane:
    """Planar points that ``L`` sends to the line at infinity.

    Those are the ``(x, y)`` whose image has vanishing third coordinate,
    i.e. the zero set of the third row of ``L``.
    """
    u, v, w = L.row(2)
    if u == 0 and v == 0:
        return EMPTY_IN_PLANE
    return PlanarLine(float(u), float(v), float(w))


def random_sl3z(rng: np.random.Generator, max_entry: int = 5, steps: int = 12) -> IntMatrix3:
    """Random element of SL(3, Z) built from elementary row operations.

    Each step adds +-1 times one row to another; steps that would push an
    entry past ``max_entry`` in absolute value are skipped.
    """
    m = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    for _ in range(steps):
        i, j = rng.choice(3, size=2, replace=False)
        sign = 1 if rng.random() < 0.5 else -1
        new = [m[i][c] + sign * m[j][c] for c in range(3)]
        if max(abs(x) for x in new) <= max_entry:
            m[i] = new
    return IntMatrix3(tuple(tuple(r) for r in m))
