"""Half-space model of hyperbolic space in D-1 dimensions.

Points carry a height y > 0 and a flat coordinate vector x of length D-2,
so the ambient dimension D is len(x) + 2.  The metric is
(dy^2 + sum dx^2) / y^2.  Everything here is a pure function of its
inputs; points are immutable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

__all__ = [
    "HoricyclicPoint",
    "HyperboloidPoint",
    "IsometryRecord",
    "RadialArgs",
    "Translation",
    "Dilation",
    "Inversion",
    "to_hyperboloid",
    "from_hyperboloid",
    "geodesic_distance",
    "normalize_pair",
    "laplace_beltrami_apply",
    "log_height",
    "minkowski_dot",
    "sphere_surface_area",
]

_EPS = 2.220446049250313e-16


def _arccosh_from_excess(u: float) -> float:
    """arccosh(1 + u) for u >= 0, accurate also for tiny u."""
    if u < 0.0:
        if u < -1e-14:
            raise ValueError(f"arccosh argument below 1 by {-u:g}")
        u = 0.0
    return math.log1p(u + math.sqrt(u * (u + 2.0)))


@dataclass(frozen=True)
class HoricyclicPoint:
    """Point (y, x^1..x^{D-2}) in the upper half-space, y > 0."""

    y: float
    x: tuple[float, ...]

    def __init__(self, y: float, x: Sequence[float]):
        y = float(y)
        if not (y > 0.0) or not math.isfinite(y):
            raise ValueError(f"half-space height must be positive and finite, got {y}")
        xt = tuple(float(v) for v in x)
        if len(xt) < 1:
            raise ValueError("need at least one flat coordinate (ambient dimension >= 3)")
        if not all(math.isfinite(v) for v in xt):
            raise ValueError("flat coordinates must be finite")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "x", xt)

    @property
    def dim(self) -> int:
        """Ambient dimension D."""
        return len(self.x) + 2


@dataclass(frozen=True)
class HyperboloidPoint:
    """Point Z^0..Z^{D-1} on the upper sheet of the unit hyperboloid."""

    z: tuple[float, ...]

    def __init__(self, z: Sequence[float]):
        zt = tuple(float(v) for v in z)
        if len(zt) < 3:
            raise ValueError("hyperboloid points need at least 3 components")
        if zt[0] <= 0.0:
            raise ValueError("not on the upper sheet (Z^0 <= 0)")
        sq = sum(v * v for v in zt)
        defect = zt[0] * zt[0] - sum(v * v for v in zt[1:]) - 1.0
        # 1e-12 for moderate points; scale with the squared magnitudes so that
        # legitimate far-out points are not rejected for pure rounding.
        tol = max(1e-12, 64.0 * _EPS * sq)
        if abs(defect) > tol:
            raise ValueError(f"hyperboloid constraint violated by {defect:g}")
        object.__setattr__(self, "z", zt)

    @property
    def dim(self) -> int:
        return len(self.z)


def minkowski_dot(p1: HyperboloidPoint, p2: HyperboloidPoint) -> float:
    """Z1^0 Z2^0 - sum_i Z1^i Z2^i."""
    a, b = p1.z, p2.z
    return a[0] * b[0] - sum(u * v for u, v in zip(a[1:], b[1:]))


@dataclass(frozen=True)
class RadialArgs:
    """Chain of radial variables appearing in the integral equation.

    s is a running geodesic arc with l = cosh s; k >= l is the integration
    variable; d is the fixed pair separation with u = cosh d.  Unpopulated
    members are None; populated pairs must be consistent.
    """

    s: float | None = None
    l: float | None = None
    k: float | None = None
    u: float | None = None
    d: float | None = None

    def __post_init__(self):
        for arc, sec, names in ((self.s, self.l, "s/l"), (self.d, self.u, "d/u")):
            if arc is not None and arc < 0.0:
                raise ValueError(f"arc in {names} must be nonnegative")
            if sec is not None and sec < 1.0:
                raise ValueError(f"cosh member in {names} must be >= 1")
            if arc is not None and sec is not None:
                want = math.cosh(arc)
                if abs(sec - want) > 1e-14 * want:
                    raise ValueError(f"{names} pair inconsistent: cosh({arc}) != {sec}")
        if self.k is not None:
            if self.l is not None and self.k < self.l:
                raise ValueError("integration variable k must satisfy k >= l")
            if self.k < 1.0:
                raise ValueError("integration variable k must be >= 1")

    @classmethod
    def from_arc(cls, s: float, k: float | None = None) -> "RadialArgs":
        return cls(s=s, l=math.cosh(s), k=k)

    @classmethod
    def for_pair(cls, q1: HoricyclicPoint, q2: HoricyclicPoint, k: float | None = None) -> "RadialArgs":
        d = geodesic_distance(q1, q2)
        return cls(k=k, u=math.cosh(d), d=d)


def to_hyperboloid(q: HoricyclicPoint) -> HyperboloidPoint:
    """Embed a half-space point into the ambient hyperboloid."""
    y = q.y
    w = y * y + sum(v * v for v in q.x)
    z0 = (1.0 + w) / (2.0 * y)
    z1 = (1.0 - w) / (2.0 * y)
    rest = tuple(v / y for v in q.x)
    return HyperboloidPoint((z0, z1) + rest)


def from_hyperboloid(p: HyperboloidPoint) -> HoricyclicPoint:
    """Inverse of :func:`to_hyperboloid`; requires Z^0 + Z^1 > 0."""
    den = p.z[0] + p.z[1]
    if den <= 0.0:
        raise ValueError("point not representable with y > 0 (Z^0 + Z^1 <= 0)")
    y = 1.0 / den
    return HoricyclicPoint(y, tuple(y * v for v in p.z[2:]))


def _check_same_dim(q1: HoricyclicPoint, q2: HoricyclicPoint) -> None:
    if len(q1.x) != len(q2.x):
        raise ValueError("points have different ambient dimensions")


def distance_excess(q1: HoricyclicPoint, q2: HoricyclicPoint) -> float:
    """cosh(d) - 1, computed without cancellation."""
    _check_same_dim(q1, q2)
    r2 = sum((a - b) ** 2 for a, b in zip(q1.x, q2.x))
    dy = q2.y - q1.y
    return (r2 + dy * dy) / (2.0 * q1.y * q2.y)


def geodesic_distance(q1: HoricyclicPoint, q2: HoricyclicPoint) -> float:
    """Hyperbolic distance between two half-space points.

    Uses cosh(d) - 1 = (|x2-x1|^2 + (y2-y1)^2) / (2 y1 y2), which is a sum
    of squares, so the arccosh argument never falls below 1 and nearby
    points keep full relative accuracy.
    """
    return _arccosh_from_excess(distance_excess(q1, q2))


def log_height(q: HoricyclicPoint) -> float:
    """z = ln y."""
    return math.log(q.y)


# --- isometries -------------------------------------------------------------

@dataclass(frozen=True)
class Translation:
    """x -> x + offset at fixed height."""

    offset: tuple[float, ...]

    def apply(self, q: HoricyclicPoint) -> HoricyclicPoint:
        return HoricyclicPoint(q.y, tuple(a + b for a, b in zip(q.x, self.offset)))


@dataclass(frozen=True)
class Dilation:
    """(y, x) -> lam * (y, x), lam > 0."""

    lam: float

    def apply(self, q: HoricyclicPoint) -> HoricyclicPoint:
        return HoricyclicPoint(self.lam * q.y, tuple(self.lam * v for v in q.x))


@dataclass(frozen=True)
class Inversion:
    """Euclidean inversion in the unit sphere centred at the boundary origin."""

    def apply(self, q: HoricyclicPoint) -> HoricyclicPoint:
        m = q.y * q.y + sum(v * v for v in q.x)
        return HoricyclicPoint(q.y / m, tuple(v / m for v in q.x))


@dataclass(frozen=True)
class IsometryRecord:
    """Ordered composition of half-space isometry generators."""

    ops: tuple[object, ...]

    def apply(self, q: HoricyclicPoint) -> HoricyclicPoint:
        for op in self.ops:
            q = op.apply(q)
        return q


def normalize_pair(
    q1: HoricyclicPoint, q2: HoricyclicPoint
) -> tuple[HoricyclicPoint, HoricyclicPoint, IsometryRecord]:
    """Move a pair of points onto the y-axis by a recorded isometry.

    The geodesic through the pair meets the boundary plane at two points
    b1, b2 (b2 = infinity for a vertical pair).  Sending b2 -> 0 by a
    translation, 0 -> infinity by the unit inversion, and the image of b1
    to 0 by a second translation maps the geodesic onto the vertical axis,
    hence both points acquire vanishing flat coordinates while every step
    is an isometry of the half-space metric.
    """
    _check_same_dim(q1, q2)
    n = len(q1.x)
    diff = tuple(b - a for a, b in zip(q1.x, q2.x))
    delta = math.sqrt(sum(v * v for v in diff))
    if delta == 0.0:
        if all(v == 0.0 for v in q1.x):
            rec = IsometryRecord(())
        else:
            rec = IsometryRecord((Translation(tuple(-v for v in q1.x)),))
        return rec.apply(q1), rec.apply(q2), rec

    e = tuple(v / delta for v in diff)
    t = (delta * delta + q2.y * q2.y - q1.y * q1.y) / (2.0 * delta)
    rho = math.hypot(t, q1.y)
    # boundary endpoints of the geodesic half-circle
    b1 = tuple(a + (t - rho) * u for a, u in zip(q1.x, e))
    b2 = tuple(a + (t + rho) * u for a, u in zip(q1.x, e))
    back = tuple(u / (2.0 * rho) for u in e)  # image of b1 after the inversion, negated
    rec = IsometryRecord(
        (
            Translation(tuple(-v for v in b2)),
            Inversion(),
            Translation(back),
        )
    )
    return rec.apply(q1), rec.apply(q2), rec


# --- differential operator --------------------------------------------------

def laplace_beltrami_apply(
    f: Callable[[HoricyclicPoint], float], q: HoricyclicPoint, h: float
) -> float:
    """Second-order central-difference Laplace-Beltrami operator at q.

    Approximates y^2 (d^2/dy^2 + sum_mu d^2/dx_mu^2) f - (D-3) y df/dy
    with a 2(D-1)+1 point stencil; truncation error O(h^2).
    """
    if h <= 0.0:
        raise ValueError("step size must be positive")
    if q.y - h <= 0.0:
        raise ValueError("stencil leaves the half-space (y - h <= 0)")
    d = q.dim
    c = f(q)
    up = f(HoricyclicPoint(q.y + h, q.x))
    dn = f(HoricyclicPoint(q.y - h, q.x))
    lap = (up - 2.0 * c + dn) / (h * h)
    dy = (up - dn) / (2.0 * h)
    for mu in range(d - 2):
        xp = list(q.x)
        xp[mu] += h
        xm = list(q.x)
        xm[mu] -= h
        lap += (f(HoricyclicPoint(q.y, xp)) - 2.0 * c + f(HoricyclicPoint(q.y, xm))) / (h * h)
    return q.y * q.y * lap - (d - 3) * q.y * dy


def sphere_surface_area(n: int) -> float:
    """Surface area of the unit n-sphere, 2 pi^((n+1)/2) / Gamma((n+1)/2)."""
    if n < 0:
        raise ValueError("sphere dimension must be nonnegative")
    return 2.0 * math.pi ** ((n + 1) / 2.0) / math.gamma((n + 1) / 2.0)
