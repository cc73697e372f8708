"""Deterministic adaptive quadrature for Gaussian-decay radial integrands.

The core is an embedded Gauss-Legendre 10/21 pair with bisection of the
worst interval.  Semi-infinite domains are truncated where the decay
envelope drops below exp(-sigma^2/2) and the tail bound is folded into the
error estimate.  Endpoint inverse-square-root singularities are removed by
the substitution s = d + v^2, whose Jacobian combines with the weight into
the everywhere-regular factor 1/sqrt(sinh(d + v^2/2) * sinhc(v^2/2)).
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "QuadratureSpec",
    "NonConvergenceError",
    "integrate_finite",
    "integrate_semi_infinite",
    "integrate_endpoint_singular",
    "abel_identity_check",
]

_NODES_LO, _WEIGHTS_LO = (tuple(map(float, a)) for a in np.polynomial.legendre.leggauss(10))
_NODES_HI, _WEIGHTS_HI = (tuple(map(float, a)) for a in np.polynomial.legendre.leggauss(21))


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and budget for one integral."""

    rel_tol: float = 1e-9
    abs_tol: float = 1e-14
    max_subdivisions: int = 60
    truncation_sigma: float = 12.0

    def __post_init__(self):
        if self.rel_tol <= 0.0 or self.abs_tol <= 0.0:
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be at least 1")
        if self.truncation_sigma <= 0.0:
            raise ValueError("truncation_sigma must be positive")


DEFAULT_SPEC = QuadratureSpec()


class NonConvergenceError(RuntimeError):
    """Subdivision budget exhausted with the error estimate above tolerance."""

    def __init__(self, value: float, err_est: float, message: str = ""):
        super().__init__(message or f"quadrature did not converge (err_est={err_est:g})")
        self.value = value
        self.err_est = err_est


def _rule(f: Callable[[float], float], lo: float, hi: float) -> tuple[float, float]:
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    hi_sum = 0.0
    for x, w in zip(_NODES_HI, _WEIGHTS_HI):
        hi_sum += w * f(mid + half * x)
    lo_sum = 0.0
    for x, w in zip(_NODES_LO, _WEIGHTS_LO):
        lo_sum += w * f(mid + half * x)
    value = half * hi_sum
    err = abs(half * (hi_sum - lo_sum)) + 1e-16 * abs(value)
    return value, err


def integrate_finite(
    f: Callable[[float], float],
    breakpoints: list[float] | tuple[float, ...],
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> tuple[float, float]:
    """Adaptive integration over [breakpoints[0], breakpoints[-1]].

    Interior breakpoints seed the subdivision (useful when most of the mass
    sits near one end of a long interval).  Deterministic: the worst
    interval (largest error estimate, ties broken by insertion order) is
    bisected until the summed estimate meets the tolerance.
    """
    pts = [float(b) for b in breakpoints]
    if len(pts) < 2 or any(b >= c for b, c in zip(pts, pts[1:])):
        raise ValueError("breakpoints must be strictly increasing with at least 2 entries")
    heap = []
    counter = 0
    total = 0.0
    total_err = 0.0
    for lo, hi in zip(pts, pts[1:]):
        v, e = _rule(f, lo, hi)
        heapq.heappush(heap, (-e, counter, lo, hi, v))
        counter += 1
        total += v
        total_err += e
    splits = 0
    resolution_err = 0.0  # estimates stuck at float resolution, kept in the total
    while total_err > max(spec.rel_tol * abs(total), spec.abs_tol):
        if splits >= spec.max_subdivisions or not heap:
            raise NonConvergenceError(total, total_err)
        neg_e, _, lo, hi, v = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            # interval at float resolution: its estimate cannot improve;
            # move it out of the work queue so the loop terminates
            resolution_err += -neg_e
            total_err += neg_e
            if resolution_err > max(spec.rel_tol * abs(total), spec.abs_tol):
                raise NonConvergenceError(total, total_err + resolution_err)
            continue
        v1, e1 = _rule(f, lo, mid)
        v2, e2 = _rule(f, mid, hi)
        total += v1 + v2 - v
        total_err += e1 + e2 + neg_e  # neg_e = -(old error)
        heapq.heappush(heap, (-e1, counter, lo, mid, v1))
        counter += 1
        heapq.heappush(heap, (-e2, counter, mid, hi, v2))
        counter += 1
        splits += 1
    return total, total_err + resolution_err


def _geometric_breakpoints(lo: float, hi: float, n_halvings: int = 6) -> list[float]:
    """lo plus the points lo + span/2^k, concentrating panels near lo."""
    span = hi - lo
    pts = [lo]
    for k in range(n_halvings, 0, -1):
        cand = lo + span / float(2**k)
        if cand > pts[-1]:
            pts.append(cand)
    if hi > pts[-1]:
        pts.append(hi)
    return pts


def gaussian_cutoff(lower: float, decay_rate: float, sigma: float, linear_growth: float = 0.0) -> float:
    """Upper limit T where the envelope exp(-rate t^2 + growth t) has dropped
    by exp(-sigma^2/2) relative to its maximum over [max(lower, 0), inf)."""
    l0 = max(lower, 0.0)
    peak = max(l0, 0.5 * linear_growth / decay_rate)
    target = decay_rate * peak * peak - linear_growth * peak + 0.5 * sigma * sigma
    t = (linear_growth + math.sqrt(linear_growth * linear_growth + 4.0 * decay_rate * target)) / (
        2.0 * decay_rate
    )
    return max(t, lower + 1.0 / math.sqrt(decay_rate))


def integrate_semi_infinite(
    f: Callable[[float], float],
    lower: float,
    decay_rate: float,
    spec: QuadratureSpec = DEFAULT_SPEC,
    linear_growth: float = 0.0,
) -> tuple[float, float]:
    """Integral of f over [lower, inf) for |f| <= C exp(-rate t^2 + growth t).

    The domain is truncated where the envelope has fallen by
    exp(-truncation_sigma^2/2) relative to the lower endpoint; an envelope
    tail bound is added to the returned error estimate.
    """
    if decay_rate <= 0.0:
        raise ValueError("decay_rate must be positive")
    cutoff = gaussian_cutoff(lower, decay_rate, spec.truncation_sigma, linear_growth)
    value, err = integrate_finite(f, _geometric_breakpoints(lower, cutoff), spec)
    denom = 2.0 * decay_rate * cutoff - linear_growth
    tail = abs(f(cutoff)) / denom if denom > 0.0 else abs(f(cutoff))
    return value, err + tail


def _sinhc(x: float) -> float:
    return math.sinh(x) / x if x != 0.0 else 1.0


def integrate_endpoint_singular(
    f: Callable[[float], float],
    d: float,
    decay_rate: float,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> tuple[float, float]:
    """Integral of f(s) / sqrt(cosh s - cosh d) over [d, inf).

    Substituting s = d + v^2 and using
    cosh s - cosh d = 2 sinh((s+d)/2) sinh((s-d)/2) turns the integrand into
    2 f(d + v^2) / sqrt(sinh(d + v^2/2) * sinhc(v^2/2)), regular at v = 0
    for d > 0 (value 2 f(d)/sqrt(sinh d)); f must decay like
    exp(-decay_rate s^2).
    """
    if d < 0.0:
        raise ValueError("lower endpoint must be nonnegative")
    if decay_rate <= 0.0:
        raise ValueError("decay_rate must be positive")
    s_max = gaussian_cutoff(d, decay_rate, spec.truncation_sigma)
    v_max = math.sqrt(s_max - d)

    def g(v: float) -> float:
        half_sq = 0.5 * v * v
        return 2.0 * f(d + v * v) / math.sqrt(math.sinh(d + half_sq) * _sinhc(half_sq))

    value, err = integrate_finite(g, _geometric_breakpoints(0.0, v_max), spec)
    weight_tail = math.sqrt(max(math.cosh(s_max) - math.cosh(d), 1e-300))
    tail = abs(f(s_max)) / (2.0 * decay_rate * s_max * weight_tail)
    return value, err + tail


def abel_identity_check(
    f: Callable[[float], float],
    u: float,
    spec: QuadratureSpec = DEFAULT_SPEC,
    decay_rate: float = 1.0,
) -> tuple[float, float, float]:
    """Both sides of the half-order double-integral collapse identity.

    lhs = int_u^inf dl (l-u)^(-1/2) int_l^inf dk f(k) (k-l)^(-1/2)
    rhs = pi * int_u^inf f(k) dk

    for f with |f(k)| <= C exp(-decay_rate k).  Returns (lhs, rhs,
    |lhs - rhs| / |rhs|).  Engine self-test; both inverse-square-root
    layers are regularized by the same v^2 substitution used elsewhere.
    """
    if u < 1.0:
        raise ValueError("u must be at least 1")
    if decay_rate <= 0.0:
        raise ValueError("decay_rate must be positive")

    def inner(l: float) -> float:
        value, _ = integrate_semi_infinite(lambda w: f(l + w * w), 0.0, decay_rate, spec)
        return 2.0 * value

    lhs_half, _ = integrate_semi_infinite(lambda v: inner(u + v * v), 0.0, decay_rate, spec)
    lhs = 2.0 * lhs_half
    rhs_half, _ = integrate_semi_infinite(lambda w: w * f(u + w * w), 0.0, decay_rate, spec)
    rhs = 2.0 * math.pi * rhs_half
    return lhs, rhs, abs(lhs - rhs) / abs(rhs)
