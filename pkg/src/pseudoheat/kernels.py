"""Closed-form heat kernels on the (D-1)-dimensional hyperbolic space.

All evaluation happens on the diffusive branch: the real-time rate alpha/T
becomes a = m/(2 hbar tau) > 0 and the constant action shift becomes
E = -(hbar (D-1)(D-3) / (8 m)) tau, so every kernel is a positive function
of the geodesic distance s:

    D = 3     sqrt(2) (a/pi)^(3/2) e^E  int_s^inf  sig e^(-a sig^2)
                                        / sqrt(cosh sig - cosh s) dsig
    D = 4     (a/pi)^(3/2) (s / sinh s) exp(-a s^2 + E)
    D even    (-1/(2 pi))^((D-2)/2) G^((D-2)/2)(s)
    D odd     sqrt(2) (-1/(2 pi))^((D-1)/2)
              int_s^inf d/dsig[G^((D-3)/2)](sig) / sqrt(cosh sig - cosh s) dsig

with G the radial Gaussian of the gfunc module.  The oscillatory real-time
propagator is this family continued back through tau -> i T; it is not
evaluated numerically here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import gfunc
from .quadrature import DEFAULT_SPEC, QuadratureSpec, integrate_endpoint_singular

__all__ = ["EvalParams", "KernelValue", "kernel", "kernel_d3", "kernel_d4", "kernel_even", "kernel_odd"]


@dataclass(frozen=True)
class EvalParams:
    """Dimension, units and diffusive time for one kernel evaluation."""

    D: int
    tau: float
    m: float = 0.5
    hbar: float = 1.0

    def __post_init__(self):
        if not isinstance(self.D, int) or self.D < 3:
            raise ValueError("D must be an integer >= 3")
        for name in ("tau", "m", "hbar"):
            v = getattr(self, name)
            if not (v > 0.0 and math.isfinite(v)):
                raise ValueError(f"{name} must be positive and finite")

    @property
    def a(self) -> float:
        """Gaussian rate m / (2 hbar tau)."""
        return self.m / (2.0 * self.hbar * self.tau)

    @property
    def E(self) -> float:
        """Constant exponent shift; zero exactly at D = 3."""
        return -(self.hbar * (self.D - 1) * (self.D - 3) / (8.0 * self.m)) * self.tau

    @property
    def beta(self) -> float:
        """(hbar^2 / 4 m^2) (D-1)(D-3)."""
        return (self.hbar**2 / (4.0 * self.m**2)) * (self.D - 1) * (self.D - 3)

    @property
    def kappa(self) -> float:
        """Diffusivity hbar / (2 m) of the associated heat flow."""
        return self.hbar / (2.0 * self.m)

    def with_tau(self, tau: float) -> "EvalParams":
        return EvalParams(self.D, tau, self.m, self.hbar)


@dataclass(frozen=True)
class KernelValue:
    value: float
    err_est: float
    D: int
    s: float
    tau: float


def _check_s(s: float) -> float:
    s = float(s)
    if s < 0.0 or not math.isfinite(s):
        raise ValueError("geodesic distance must be nonnegative and finite")
    return s


def kernel_d3(params: EvalParams, s: float, spec: QuadratureSpec = DEFAULT_SPEC) -> KernelValue:
    """McKean-type integral kernel on the hyperbolic plane (D = 3)."""
    if params.D != 3:
        raise ValueError("kernel_d3 requires D = 3")
    s = _check_s(s)
    a = params.a

    def f(sig: float) -> float:
        return sig * math.exp(-a * sig * sig)

    integral, err = integrate_endpoint_singular(f, s, a, spec)
    front = math.sqrt(2.0) * (a / math.pi) ** 1.5 * math.exp(params.E)
    return KernelValue(front * integral, front * err, 3, s, params.tau)


def kernel_d4(params: EvalParams, s: float) -> KernelValue:
    """Closed form (a/pi)^(3/2) (s/sinh s) exp(-a s^2 + E) for D = 4."""
    if params.D != 4:
        raise ValueError("kernel_d4 requires D = 4")
    s = _check_s(s)
    a = params.a
    ratio = s / math.sinh(s) if s > 0.0 else 1.0
    value = (a / math.pi) ** 1.5 * ratio * math.exp(-a * s * s + params.E)
    return KernelValue(value, 0.0, 4, s, params.tau)


def kernel_even(params: EvalParams, s: float) -> KernelValue:
    """(-1/(2 pi))^((D-2)/2) G^((D-2)/2)(s) for even D >= 4."""
    if params.D % 2 != 0 or params.D < 4:
        raise ValueError("kernel_even requires even D >= 4")
    s = _check_s(s)
    n = (params.D - 2) // 2
    g = gfunc.expression(n, params.a, params.E)
    value = (-1.0 / (2.0 * math.pi)) ** n * gfunc.evaluate_auto(g, s)
    return KernelValue(value, 0.0, params.D, s, params.tau)


def _odd_integrand(params: EvalParams, order: int):
    """d/dsig of G^(order) as a callable, stable down to sig = 0.

    Above the series switch the exact termwise sigma-derivative of the
    algebra is summed; below it the identity d/ds G^(n) = sinh(s) G^(n+1)
    routes through the regular l-series.
    """
    g_n = gfunc.expression(order, params.a, params.E)
    deriv = gfunc.sigma_derivative(g_n)
    g_up = gfunc.expression(order + 1, params.a, params.E)

    def f(sig: float) -> float:
        if gfunc.series_ok(params.a, sig):
            return math.sinh(sig) * gfunc.evaluate_auto(g_up, sig)
        return gfunc._evaluate_terms(deriv, sig)

    return f


def kernel_odd(params: EvalParams, s: float, spec: QuadratureSpec = DEFAULT_SPEC) -> KernelValue:
    """Endpoint-singular integral over the differentiated algebra, odd D >= 5."""
    if params.D % 2 != 1 or params.D < 5:
        raise ValueError("kernel_odd requires odd D >= 5 (D = 3 has its own route)")
    s = _check_s(s)
    order = (params.D - 3) // 2
    f = _odd_integrand(params, order)
    integral, err = integrate_endpoint_singular(f, s, params.a, spec)
    front = math.sqrt(2.0) * (-1.0 / (2.0 * math.pi)) ** ((params.D - 1) // 2)
    return KernelValue(front * integral, abs(front) * err, params.D, s, params.tau)


def kernel(params: EvalParams, s: float, spec: QuadratureSpec = DEFAULT_SPEC) -> KernelValue:
    """Dispatch to the closed form for this dimension."""
    if params.D == 3:
        return kernel_d3(params, s, spec)
    if params.D == 4:
        return kernel_d4(params, s)
    if params.D % 2 == 0:
        return kernel_even(params, s)
    return kernel_odd(params, s, spec)
